#include "skelact/augment/augment.hpp"

#include <algorithm>
#include <cmath>

#include "skelact/common/error.hpp"

namespace skelact {

void AugmentConfig::validate() const {
    if (noise_sigma < 0.0)
        throw ConfigError("augmentation.noise_sigma must be >= 0");
    if (shift_max < 0)
        throw ConfigError("augmentation.shift_max must be >= 0");
    if (!(crop_min_ratio > 0.0) || crop_min_ratio > 1.0)
        throw ConfigError("augmentation.crop_min_ratio must be in (0, 1]");
    if (joint_dropout_prob < 0.0 || joint_dropout_prob >= 1.0)
        throw ConfigError("augmentation.joint_dropout_prob must be in [0, 1)");
}

WindowTensor add_noise(const WindowTensor& window, double sigma, Rng& rng) {
    if (sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
    if (sigma == 0.0) return window;
    WindowTensor out = window;
    for (int t = 0; t < out.t_steps; ++t) {
        for (int j = 0; j < out.joints; ++j) {
            if (!out.joint_valid(t, j)) continue;
            for (int k = 0; k < 3; ++k)
                out.at(t, 3 * j + k) += rng.gaussian(0.0, sigma);
        }
    }
    return out;
}

SkeletonSequence circular_shift(const SkeletonSequence& seq, int k) {
    if (seq.empty()) throw DataError("cannot shift an empty sequence");
    const int n = static_cast<int>(seq.frame_count());
    SkeletonSequence out = seq;
    for (int i = 0; i < n; ++i) {
        const int src = ((i - k) % n + n) % n;
        out.frames[static_cast<size_t>(i)] = seq.frames[static_cast<size_t>(src)];
        out.frames[static_cast<size_t>(i)].t = seq.frames[static_cast<size_t>(i)].t;
    }
    return out;
}

SkeletonSequence crop_and_pad(const SkeletonSequence& seq, int start, int length) {
    const int n = static_cast<int>(seq.frame_count());
    if (length < 1 || start < 0 || start + length > n)
        throw ConfigError("crop window [" + std::to_string(start) + ", " +
                          std::to_string(start + length) + ") outside sequence of " +
                          std::to_string(n) + " frames");
    if (length == n) return seq;
    SkeletonSequence out = seq;
    for (int i = 0; i < n; ++i) {
        // crop then loop from the crop's start to restore N frames
        const int src = start + (i % length);
        out.frames[static_cast<size_t>(i)] = seq.frames[static_cast<size_t>(src)];
        out.frames[static_cast<size_t>(i)].t = seq.frames[static_cast<size_t>(i)].t;
    }
    return out;
}

SkeletonSequence temporal_shift(const SkeletonSequence& seq, int shift_max,
                                Rng& rng) {
    if (shift_max < 0) throw ConfigError("shift_max must be >= 0");
    if (seq.empty()) throw DataError("cannot shift an empty sequence");
    const int n = static_cast<int>(seq.frame_count());
    const int m = std::min(shift_max, n - 1);
    if (m == 0) return seq;
    return circular_shift(seq, static_cast<int>(rng.uniform_int(-m, m)));
}

SkeletonSequence random_crop(const SkeletonSequence& seq, double crop_min_ratio,
                             double joint_dropout_prob, Rng& rng) {
    if (!(crop_min_ratio > 0.0) || crop_min_ratio > 1.0)
        throw ConfigError("crop_min_ratio must be in (0, 1]");
    if (joint_dropout_prob < 0.0 || joint_dropout_prob >= 1.0)
        throw ConfigError("joint_dropout_prob must be in [0, 1)");
    if (seq.empty()) throw DataError("cannot crop an empty sequence");

    const int n = static_cast<int>(seq.frame_count());
    SkeletonSequence out = seq;

    if (crop_min_ratio < 1.0) {
        const int l_min = std::min(
            n, static_cast<int>(std::ceil(crop_min_ratio * static_cast<double>(n))));
        const int length = static_cast<int>(rng.uniform_int(l_min, n));
        const int start = static_cast<int>(rng.uniform_int(0, n - length));
        out = crop_and_pad(out, start, length);
    }

    if (joint_dropout_prob > 0.0) {
        for (SkeletonFrame& f : out.frames)
            for (int j = 0; j < f.joint_count(); ++j)
                if (rng.bernoulli(joint_dropout_prob)) f.invalidate(j);
    }
    return out;
}

SkeletonSequence augment_sequence(const SkeletonSequence& seq,
                                  const AugmentConfig& cfg, Rng& rng) {
    cfg.validate();
    SkeletonSequence out = temporal_shift(seq, cfg.shift_max, rng);
    return random_crop(out, cfg.crop_min_ratio, cfg.joint_dropout_prob, rng);
}

}  // namespace skelact
