#pragma once

#include <memory>
#include <optional>
#include <string>

#include "skelact/core/skeleton.hpp"

namespace skelact {

// Pull-style frame producer feeding the stream pipeline. next() returns
// frames in time order and nullopt at end of stream.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<SkeletonFrame> next() = 0;
    virtual const JointSet& joint_set() const = 0;
    virtual double fps() const = 0;
};

// Replays a SKELREC-JSONL file paced by its timestamps divided by `speed`.
// speed 0 replays as fast as the pipeline consumes.
class ReplaySource : public FrameSource {
public:
    ReplaySource(const std::string& path, double speed);
    ~ReplaySource() override;

    std::optional<SkeletonFrame> next() override;
    const JointSet& joint_set() const override;
    double fps() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// In-memory source for tests; optionally paced like ReplaySource.
class SequenceSource : public FrameSource {
public:
    explicit SequenceSource(SkeletonSequence seq, double speed = 0.0);
    ~SequenceSource() override;

    std::optional<SkeletonFrame> next() override;
    const JointSet& joint_set() const override;
    double fps() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace skelact
