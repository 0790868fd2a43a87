#pragma once

#include <memory>
#include <string>

#include "skelact/stream/pipeline.hpp"
#include "skelact/stream/replay.hpp"

namespace skelact {

// Frame source reading a SKELREC-JSONL stream from a TCP connection
// ("HOST:PORT"). The sender's pacing drives the stream.
class TcpFrameSource : public FrameSource {
public:
    explicit TcpFrameSource(const std::string& endpoint);
    ~TcpFrameSource() override;

    std::optional<SkeletonFrame> next() override;
    const JointSet& joint_set() const override;
    double fps() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Line-delimited JSON label publisher: accepts any number of clients and
// writes one LabelMessage object per line to each. Slow or dead clients are
// disconnected rather than blocking the pipeline.
class TcpLabelServer {
public:
    explicit TcpLabelServer(int port);
    ~TcpLabelServer();

    void publish(const LabelMessage& message);
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace skelact
