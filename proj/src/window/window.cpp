#include "skelact/window/window.hpp"

#include <algorithm>
#include <cmath>

#include "skelact/common/error.hpp"

namespace skelact {

void WindowConfig::validate() const {
    if (!(window_seconds > 0.0))
        throw ConfigError("window.window_seconds must be > 0");
    if (!(model_fps > 0.0)) throw ConfigError("window.model_fps must be > 0");
    if (!(hop_seconds > 0.0) || hop_seconds > window_seconds)
        throw ConfigError("window.hop_seconds must be in (0, window_seconds]");
}

int WindowConfig::frames_per_window() const {
    return std::max(1, static_cast<int>(std::lround(window_seconds * model_fps)));
}

int WindowConfig::hop_frames() const {
    return std::max(1, static_cast<int>(std::lround(hop_seconds * model_fps)));
}

bool WindowTensor::step_valid(int t) const {
    for (int j = 0; j < joints; ++j)
        if (joint_valid(t, j)) return true;
    return false;
}

SkeletonSequence resample(const SkeletonSequence& seq, double model_fps) {
    if (!(model_fps > 0.0)) throw ConfigError("model fps must be > 0");
    if (seq.empty()) throw DataError("cannot resample an empty sequence");

    const double t0 = seq.frames.front().t;
    const double duration = seq.frames.back().t - t0;
    const int n_out =
        static_cast<int>(std::lround(duration * model_fps)) + 1;

    SkeletonSequence out = seq;
    out.fps = model_fps;
    out.frames.clear();
    out.frames.reserve(static_cast<size_t>(n_out));

    size_t cursor = 0;
    for (int i = 0; i < n_out; ++i) {
        const double t = t0 + static_cast<double>(i) / model_fps;
        // Frames are time-ordered; advance while the next frame is nearer.
        while (cursor + 1 < seq.frames.size() &&
               std::abs(seq.frames[cursor + 1].t - t) <
                   std::abs(seq.frames[cursor].t - t))
            ++cursor;
        SkeletonFrame f = seq.frames[cursor];
        f.t = t;
        out.frames.push_back(std::move(f));
    }
    return out;
}

namespace {

WindowTensor pack_frames(const std::vector<SkeletonFrame>& frames, int joint_count,
                         const WindowConfig& cfg, std::optional<int> label,
                         double t_end) {
    const int T = cfg.frames_per_window();
    const int J = joint_count;
    const int D = 3 * J;
    const int n = static_cast<int>(frames.size());

    WindowTensor w;
    w.t_steps = T;
    w.dims = D;
    w.joints = J;
    w.label = label;
    w.t_end = t_end;
    w.data.assign(static_cast<size_t>(T) * D, 0.0);
    w.mask.assign(static_cast<size_t>(T) * J, 0);

    // Long inputs keep the center window; short ones are padded per policy.
    const int start = n > T ? (n - T) / 2 : 0;
    for (int t = 0; t < T; ++t) {
        int src;
        if (n >= T) {
            src = start + t;
        } else if (t < n) {
            src = t;
        } else if (cfg.pad_policy == PadPolicy::REPEAT) {
            src = t % n;  // loop from the start
        } else {
            continue;  // ZERO padding: data stays zero, mask stays false
        }
        const SkeletonFrame& f = frames[static_cast<size_t>(src)];
        for (int j = 0; j < J; ++j) {
            if (!f.is_valid(j)) continue;  // invalid joints masked and zeroed
            const Vec3& p = f.joints[static_cast<size_t>(j)];
            w.at(t, 3 * j + 0) = p.x;
            w.at(t, 3 * j + 1) = p.y;
            w.at(t, 3 * j + 2) = p.z;
            w.mask[static_cast<size_t>(t) * J + j] = 1;
        }
    }
    return w;
}

}  // namespace

WindowTensor pack(const SkeletonSequence& seq, const WindowConfig& cfg) {
    cfg.validate();
    if (seq.empty()) throw DataError("cannot pack an empty sequence");
    return pack_frames(seq.frames, seq.joint_count(), cfg, seq.label,
                       seq.frames.back().t);
}

SlidingWindower::SlidingWindower(const WindowConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
}

std::optional<FrameWindow> SlidingWindower::push(const SkeletonFrame& frame) {
    if (frame.t < last_t_) {
        ++dropped_;
        return std::nullopt;
    }
    last_t_ = frame.t;
    ++accepted_;

    const size_t T = static_cast<size_t>(cfg_.frames_per_window());
    ring_.push_back(frame);
    if (ring_.size() > T) ring_.erase(ring_.begin());
    if (ring_.size() < T) return std::nullopt;

    const std::uint64_t since_full =
        accepted_ - static_cast<std::uint64_t>(T);
    if (since_full % static_cast<std::uint64_t>(cfg_.hop_frames()) != 0)
        return std::nullopt;

    ++emitted_;
    FrameWindow w;
    w.frames = ring_;
    w.t_end = frame.t;
    return w;
}

std::vector<FrameWindow> sliding_windows(const SkeletonSequence& seq,
                                         const WindowConfig& cfg) {
    SlidingWindower windower(cfg);
    std::vector<FrameWindow> out;
    for (const SkeletonFrame& f : seq.frames)
        if (auto w = windower.push(f)) out.push_back(std::move(*w));
    return out;
}

WindowTensor pack_window(const FrameWindow& window, const JointSet& set,
                         const WindowConfig& cfg) {
    return pack_frames(window.frames, set.joint_count(), cfg, std::nullopt,
                       window.t_end);
}

}  // namespace skelact
