#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skelact/core/class_table.hpp"
#include "skelact/core/skeleton.hpp"

namespace skelact {

// Procedural generator of labeled COMMON-set sequences: eight motion
// archetypes animated from a canonical 15-joint rest pose, then per-actor
// scaled, yawed, translated and jittered. Deterministic per seed.
struct SynthConfig {
    std::vector<std::string> classes = {"wave", "cheer", "sit",   "stand",
                                        "kick", "point", "throw", "drink"};
    int samples_per_class = 20;
    double fps = 30.0;
    double duration_seconds = 3.0;
    std::pair<double, double> actor_scale_range = {0.8, 1.2};
    double actor_yaw_range = 0.3926990816987241;  // +/- pi/8
    double actor_translation_range = 0.3;         // meters, +/- in x and z
    double jitter_sigma = 0.005;                  // meters
    std::uint64_t seed = 0;

    void validate() const;
};

// The class table matching SynthConfig::classes (ids in list order, source
// ids set to the matching NTU action numbers).
ClassTable synth_class_table(const SynthConfig& cfg);

// All samples, grouped class-major: classes[0] samples first.
std::vector<SkeletonSequence> generate(const SynthConfig& cfg);

// Applies a fixed scale + yaw-about-origin transform to every sequence:
// the synthetic analog of a recorded test set's domain gap.
std::vector<SkeletonSequence> domain_shift(
    const std::vector<SkeletonSequence>& datasets, double scale_multiplier,
    double yaw_offset);

SkeletonSequence domain_shift(const SkeletonSequence& seq,
                              double scale_multiplier, double yaw_offset);

}  // namespace skelact
