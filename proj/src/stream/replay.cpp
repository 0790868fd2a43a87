#include "skelact/stream/replay.hpp"

#include <chrono>
#include <thread>

#include "skelact/common/error.hpp"
#include "skelact/ingest/recording.hpp"

namespace skelact {

namespace {

using Clock = std::chrono::steady_clock;

// Shared pacing helper: sleeps so frame i is emitted at start + t_i/speed.
struct Pacer {
    double speed = 0.0;
    std::optional<Clock::time_point> start;
    double t0 = 0.0;

    void pace(double t) {
        if (speed <= 0.0) return;
        if (!start) {
            start = Clock::now();
            t0 = t;
            return;
        }
        const auto due =
            *start + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>((t - t0) / speed));
        std::this_thread::sleep_until(due);
    }
};

}  // namespace

struct SequenceSource::Impl {
    SkeletonSequence seq;
    size_t cursor = 0;
    Pacer pacer;
};

SequenceSource::SequenceSource(SkeletonSequence seq, double speed)
    : impl_(std::make_unique<Impl>()) {
    impl_->seq = std::move(seq);
    impl_->pacer.speed = speed;
}

SequenceSource::~SequenceSource() = default;

std::optional<SkeletonFrame> SequenceSource::next() {
    if (impl_->cursor >= impl_->seq.frames.size()) return std::nullopt;
    const SkeletonFrame& f = impl_->seq.frames[impl_->cursor++];
    impl_->pacer.pace(f.t);
    return f;
}

const JointSet& SequenceSource::joint_set() const { return *impl_->seq.joint_set; }

double SequenceSource::fps() const { return impl_->seq.fps; }

struct ReplaySource::Impl {
    SequenceSource inner;
    explicit Impl(SkeletonSequence seq, double speed)
        : inner(std::move(seq), speed) {}
};

ReplaySource::ReplaySource(const std::string& path, double speed) {
    if (speed < 0.0) throw ConfigError("replay speed must be >= 0");
    SkeletonSequence seq = load_recording_file(path);
    impl_ = std::make_unique<Impl>(std::move(seq), speed);
}

ReplaySource::~ReplaySource() = default;

std::optional<SkeletonFrame> ReplaySource::next() { return impl_->inner.next(); }

const JointSet& ReplaySource::joint_set() const { return impl_->inner.joint_set(); }

double ReplaySource::fps() const { return impl_->inner.fps(); }

}  // namespace skelact
