#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "skelact/core/skeleton.hpp"

namespace skelact {

enum class PadPolicy { REPEAT, ZERO };

struct WindowConfig {
    double window_seconds = 3.0;
    double model_fps = 30.0;
    double hop_seconds = 1.0;
    PadPolicy pad_policy = PadPolicy::REPEAT;

    void validate() const;
    // T = round(window_seconds * model_fps)
    int frames_per_window() const;
    // hop expressed in frames, at least 1
    int hop_frames() const;
};

// Fixed T x D input tensor of the recognizer. D = 3 * J. Row t holds frame
// t's flattened joints; mask[t*J + j] is that joint's validity. Masked
// entries are zero in data.
struct WindowTensor {
    int t_steps = 0;  // T
    int dims = 0;     // D = 3 * J
    int joints = 0;   // J
    std::vector<double> data;          // T * D, row-major
    std::vector<std::uint8_t> mask;    // T * J
    std::optional<int> label;
    double t_end = 0.0;  // timestamp of the last real frame

    double& at(int t, int d) { return data[static_cast<size_t>(t) * dims + d]; }
    double at(int t, int d) const {
        return data[static_cast<size_t>(t) * dims + d];
    }
    bool joint_valid(int t, int j) const {
        return mask[static_cast<size_t>(t) * joints + j] != 0;
    }
    // A time step counts as real when any joint in it is valid.
    bool step_valid(int t) const;
};

// Nearest-timestamp selection onto the uniform model_fps grid spanning the
// sequence duration. Output timestamps lie on the grid; fps = model_fps.
SkeletonSequence resample(const SkeletonSequence& seq, double model_fps);

// Packs a resampled sequence into the fixed window shape. Shorter sequences
// are padded per policy (REPEAT loops from the start, ZERO pads masked
// zeros); longer sequences keep the center window. Invalid joints are masked
// and zeroed.
WindowTensor pack(const SkeletonSequence& seq, const WindowConfig& cfg);

// Frame group emitted by the sliding windower.
struct FrameWindow {
    std::vector<SkeletonFrame> frames;  // exactly T frames, oldest first
    double t_end = 0.0;
};

// Streaming stage: accumulates time-ordered frames and emits one full window
// every hop once the first window has filled. Out-of-order frames are
// dropped and counted, never fatal.
class SlidingWindower {
public:
    explicit SlidingWindower(const WindowConfig& cfg);

    // Returns a window when this frame completes one.
    std::optional<FrameWindow> push(const SkeletonFrame& frame);

    std::uint64_t dropped_out_of_order() const { return dropped_; }
    std::uint64_t accepted() const { return accepted_; }
    std::uint64_t emitted() const { return emitted_; }

private:
    WindowConfig cfg_;
    std::vector<SkeletonFrame> ring_;
    std::uint64_t accepted_ = 0;
    std::uint64_t emitted_ = 0;
    std::uint64_t dropped_ = 0;
    double last_t_ = -1.0;
};

// All windows a gapless sequence produces under the sliding rule; the batch
// counterpart of SlidingWindower used for stream/batch equivalence checks.
std::vector<FrameWindow> sliding_windows(const SkeletonSequence& seq,
                                         const WindowConfig& cfg);

// Packs the frames of a FrameWindow (already at model fps).
WindowTensor pack_window(const FrameWindow& window, const JointSet& set,
                         const WindowConfig& cfg);

}  // namespace skelact
