#pragma once

#include <cstdint>

#include "skelact/common/rng.hpp"
#include "skelact/core/skeleton.hpp"
#include "skelact/window/window.hpp"

namespace skelact {

// Stochastic training-time transforms. All knobs can be zeroed; with every
// parameter at its degenerate value the composite augmenter is the identity.
struct AugmentConfig {
    double noise_sigma = 0.01;       // meters, std-dev of the Gaussian jitter
    int shift_max = 22;              // frames, T/4 at the default window shape
    double crop_min_ratio = 0.7;     // fraction of the window kept, in (0,1]
    double joint_dropout_prob = 0.05;  // per joint per frame
    std::uint64_t seed = 0;

    void validate() const;
};

// Perturbs each coordinate of each unmasked joint by N(0, sigma^2). Masked
// entries are untouched. sigma == 0 returns the input unchanged.
WindowTensor add_noise(const WindowTensor& window, double sigma, Rng& rng);

// Deterministic circular shift of frame contents by k positions; timestamps
// keep their original grid so ordering invariants hold.
SkeletonSequence circular_shift(const SkeletonSequence& seq, int k);

// Keeps frames [start, start+length) and repeat-pads from the crop's start
// back to the original frame count.
SkeletonSequence crop_and_pad(const SkeletonSequence& seq, int start, int length);

// Circular shift of frame contents by k ~ Uniform{-shift_max..+shift_max}
// (clamped to length - 1). Length and label are unchanged.
SkeletonSequence temporal_shift(const SkeletonSequence& seq, int shift_max,
                                Rng& rng);

// (a) keeps a contiguous sub-window of length L ~ Uniform[ceil(ratio*N), N]
// and repeat-pads it back to N frames, then (b) invalidates each remaining
// joint independently with probability joint_dropout_prob.
SkeletonSequence random_crop(const SkeletonSequence& seq, double crop_min_ratio,
                             double joint_dropout_prob, Rng& rng);

// temporal_shift then random_crop with the config's knobs.
SkeletonSequence augment_sequence(const SkeletonSequence& seq,
                                  const AugmentConfig& cfg, Rng& rng);

}  // namespace skelact
