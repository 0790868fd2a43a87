#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <thread>

#include "helpers.hpp"
#include "skelact/common/error.hpp"
#include "skelact/ingest/recording.hpp"
#include "skelact/stream/pipeline.hpp"
#include "skelact/stream/queue.hpp"
#include "skelact/stream/replay.hpp"
#include "skelact/stream/tcp.hpp"
#include "skelact/synth/generator.hpp"
#include "skelact/train/trainer.hpp"

using namespace skelact;

namespace {

ModelConfig stream_model() {
    ModelConfig cfg;
    cfg.input_channels = 45;
    cfg.num_classes = 8;
    cfg.stem_filters = 8;
    cfg.stages = {{1, 8, 1}, {1, 12, 2}};
    cfg.kernel_size = 5;
    return cfg;
}

ClassTable stream_table() { return synth_class_table(SynthConfig{}); }

// A 10 s wave sample in the COMMON set.
SkeletonSequence long_sequence() {
    SynthConfig cfg;
    cfg.classes = {"wave"};
    cfg.samples_per_class = 1;
    cfg.duration_seconds = 10.0;
    cfg.seed = 77;
    return generate(cfg)[0];
}

}  // namespace

TEST_SUITE("stream") {

TEST_CASE("bounded queue: drop-oldest evicts the head") {
    BoundedQueue<int> q(2);
    CHECK(q.push_drop_oldest(1) == 0);
    CHECK(q.push_drop_oldest(2) == 0);
    CHECK(q.push_drop_oldest(3) == 1);
    CHECK(q.evicted() == 1);
    CHECK(*q.pop() == 2);
    CHECK(*q.pop() == 3);
    q.close();
    CHECK_FALSE(q.pop().has_value());
    CHECK(q.high_water_mark() == 2);
}

TEST_CASE("an empty source is a clean no-op run") {
    SkeletonSequence empty;
    empty.joint_set = &common_joint_set();
    SequenceSource source(empty);
    const ParamsF params = init_params<float>(stream_model(), 1);
    std::vector<LabelMessage> messages;
    const RunStats stats = run_stream(
        source, nullptr, NormalizationConfig{}, WindowConfig{}, params,
        stream_table(), [&](const LabelMessage& m) { messages.push_back(m); });
    CHECK(messages.empty());
    CHECK(stats.labels_emitted == 0);
    for (const auto& s : stats.stages) CHECK(s.dropped == 0);
}

TEST_CASE("a 10 s replay emits a label per hop after the 3 s fill") {
    SequenceSource source(long_sequence());
    const ParamsF params = init_params<float>(stream_model(), 2);
    std::vector<LabelMessage> messages;
    StreamOptions options;
    options.lossless = true;
    const RunStats stats = run_stream(
        source, nullptr, NormalizationConfig{}, WindowConfig{}, params,
        stream_table(), [&](const LabelMessage& m) { messages.push_back(m); },
        options);

    // floor((300 - 90) / 30) + 1 = 8 windows
    CHECK(messages.size() == 8);
    CHECK(stats.labels_emitted == 8);
    for (size_t i = 1; i < messages.size(); ++i)
        CHECK(messages[i].t_window_end > messages[i - 1].t_window_end);
    for (const auto& m : messages) {
        CHECK(m.probability >= 0.0);
        CHECK(m.probability <= 1.0);
        CHECK(m.latency_ms >= 0.0);
        CHECK(m.class_name == stream_table().name_of(m.class_id));
    }
}

TEST_CASE("speed-0 stream output equals batch evaluation over the same windows") {
    const SkeletonSequence seq = long_sequence();
    const ParamsF params = init_params<float>(stream_model(), 3);
    const NormalizationConfig norm;
    const WindowConfig wcfg;

    // batch side: same sliding rule, same per-window normalization
    std::vector<int> batch_labels;
    for (const FrameWindow& fw : sliding_windows(seq, wcfg)) {
        SkeletonSequence mini;
        mini.joint_set = seq.joint_set;
        mini.fps = wcfg.model_fps;
        mini.frames = fw.frames;
        const WindowTensor w = pack(normalize(mini, norm), wcfg);
        batch_labels.push_back(predict(params, w).class_id);
    }

    SequenceSource source(seq);
    std::vector<int> stream_labels;
    StreamOptions options;
    options.lossless = true;
    run_stream(source, nullptr, norm, wcfg, params, stream_table(),
               [&](const LabelMessage& m) { stream_labels.push_back(m.class_id); },
               options);

    CHECK(stream_labels == batch_labels);
}

TEST_CASE("stage counters balance under backpressure drops") {
    SequenceSource source(long_sequence());
    const ParamsF params = init_params<float>(stream_model(), 4);
    StreamOptions options;
    options.lossless = false;
    options.frame_queue_capacity = 8;
    options.window_queue_capacity = 2;
    // slow sink so the label queue backs up
    const RunStats stats = run_stream(
        source, nullptr, NormalizationConfig{}, WindowConfig{}, params,
        stream_table(),
        [&](const LabelMessage&) {
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        },
        options);

    for (const auto& s : stats.stages) {
        CHECK(s.emitted + s.dropped <= s.received + 90);  // packer aggregates
        CHECK(s.queue_high_water_mark <= 8);
    }
    // chain conservation: what one stage pushes arrives at the next inbox
    CHECK(stats.stage("source").emitted == stats.stage("formatter").received);
    CHECK(stats.stage("formatter").emitted == stats.stage("packer").received);
    CHECK(stats.stage("packer").emitted == stats.stage("recognizer").received);
    CHECK(stats.stage("recognizer").emitted == stats.stage("sink").received);
    // sink delivered what survived eviction
    CHECK(stats.stage("sink").emitted + stats.stage("sink").dropped ==
          stats.stage("sink").received);
}

TEST_CASE("malformed frames are counted and skipped") {
    SkeletonSequence seq = long_sequence();
    // truncate one frame's joints: the formatter must drop it
    seq.frames[50].joints.resize(7);
    seq.frames[50].valid.resize(7);
    SequenceSource source(seq);
    const ParamsF params = init_params<float>(stream_model(), 5);
    StreamOptions options;
    options.lossless = true;
    const RunStats stats =
        run_stream(source, nullptr, NormalizationConfig{}, WindowConfig{}, params,
                   stream_table(), [](const LabelMessage&) {}, options);
    CHECK(stats.stage("formatter").dropped == 1);
    CHECK(stats.stage("formatter").emitted == 299);
}

TEST_CASE("checkpoint D mismatch is a startup error") {
    ModelConfig cfg = stream_model();
    cfg.input_channels = 12;
    const ParamsF params = init_params<float>(cfg, 6);
    SequenceSource source(long_sequence());
    CHECK_THROWS_AS(run_stream(source, nullptr, NormalizationConfig{},
                               WindowConfig{}, params, stream_table(),
                               [](const LabelMessage&) {}),
                    ConfigError);
}

TEST_CASE("remapping formatter feeds a TRACKER19 stream into a COMMON model") {
    // Build a TRACKER19 sequence by reversing the COMMON mapping.
    const SkeletonSequence common_seq = long_sequence();
    const JointMap& map = tracker19_to_common_map();
    SkeletonSequence tracker_seq;
    tracker_seq.joint_set = &tracker19_joint_set();
    tracker_seq.fps = common_seq.fps;
    for (const auto& f : common_seq.frames) {
        SkeletonFrame g;
        g.t = f.t;
        g.joints.assign(19, Vec3{});
        g.valid.assign(19, 0);
        for (int j = 0; j < 15; ++j) {
            const int src = *map.mapping[static_cast<size_t>(j)];
            g.joints[static_cast<size_t>(src)] = f.joints[static_cast<size_t>(j)];
            g.valid[static_cast<size_t>(src)] = f.valid[static_cast<size_t>(j)];
        }
        tracker_seq.frames.push_back(std::move(g));
    }

    SequenceSource source(tracker_seq);
    const ParamsF params = init_params<float>(stream_model(), 7);
    std::vector<LabelMessage> messages;
    StreamOptions options;
    options.lossless = true;
    run_stream(source, &map, NormalizationConfig{}, WindowConfig{}, params,
               stream_table(),
               [&](const LabelMessage& m) { messages.push_back(m); }, options);
    CHECK(messages.size() == 8);
}

TEST_CASE("paced replay tracks wall time within ten percent") {
    SynthConfig cfg;
    cfg.classes = {"wave"};
    cfg.samples_per_class = 1;
    cfg.duration_seconds = 2.0;
    const SkeletonSequence seq = generate(cfg)[0];  // 60 frames, ~1.97 s span

    SequenceSource source(seq, 1.0);
    const auto start = std::chrono::steady_clock::now();
    while (source.next()) {
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const double span = seq.frames.back().t - seq.frames.front().t;
    CHECK(elapsed > span * 0.9);
    CHECK(elapsed < span * 1.1 + 0.15);
}

TEST_CASE("speed-0 replay of a short file completes fast") {
    const auto start = std::chrono::steady_clock::now();
    SequenceSource source(long_sequence(), 0.0);
    size_t frames = 0;
    while (source.next()) ++frames;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    CHECK(frames == 300);
    CHECK(elapsed < 1.0);
}

TEST_CASE("label messages serialize with the wire schema") {
    LabelMessage msg;
    msg.t_window_end = 3.0;
    msg.class_id = 2;
    msg.class_name = "sit";
    msg.probability = 0.75;
    msg.latency_ms = 12.5;
    CHECK(msg.to_json_line() ==
          R"({"t":3.0,"class_id":2,"class":"sit","p":0.75,"latency_ms":12.5})");
}

TEST_CASE("tcp label server delivers lines to a client") {
    TcpLabelServer server(0);
    REQUIRE(server.port() > 0);

    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(server.port()));
    inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
    std::this_thread::sleep_for(std::chrono::milliseconds(50));

    LabelMessage msg;
    msg.class_name = "wave";
    msg.probability = 1.0;
    server.publish(msg);

    char buf[256] = {};
    const ssize_t n = ::recv(fd, buf, sizeof(buf) - 1, 0);
    ::close(fd);
    REQUIRE(n > 0);
    CHECK(std::string(buf).find("\"class\":\"wave\"") != std::string::npos);
}

}  // TEST_SUITE
