#pragma once

#include <string>

#include "skelact/core/skeleton.hpp"

namespace skelact {

enum class RotationReference { FIRST_VALID_FRAME, PER_FRAME };

// Deterministic per-sequence normalization: centering on a body joint,
// torso-length scaling and a yaw rotation aligning the shoulder line.
struct NormalizationConfig {
    bool enabled = true;
    double reference_torso_length = 1.0;  // meters
    RotationReference rotation_reference = RotationReference::FIRST_VALID_FRAME;
    std::string center_joint = joints::kSpineBase;
    std::string left_shoulder = joints::kLeftShoulder;
    std::string right_shoulder = joints::kRightShoulder;
    std::string torso_top = joints::kNeck;
    std::string torso_bottom = joints::kSpineBase;

    void validate() const;
};

// Translates every frame so the center joint sits at that frame's origin.
// Frames where the center joint is invalid reuse the nearest valid center.
// Throws DataError when the center joint is valid in no frame.
SkeletonSequence center(const SkeletonSequence& seq, const NormalizationConfig& cfg);

// Multiplies all coordinates by s = reference_torso_length / mean torso
// length, the mean taken over frames where both torso joints are valid.
// The factor s is recorded in the sequence (norm_scale and provenance).
SkeletonSequence scale(const SkeletonSequence& seq, const NormalizationConfig& cfg);

// Rotates all joints of all frames about the vertical (y) axis by
// theta = -atan2(v_z, v_x) with v = right_shoulder - left_shoulder taken in
// the rotation-reference frame. Afterwards that frame's shoulder vector has
// zero z-component and positive x-component.
SkeletonSequence align_shoulders(const SkeletonSequence& seq,
                                 const NormalizationConfig& cfg);

// center -> scale -> align_shoulders; identity when cfg.enabled is false.
SkeletonSequence normalize(const SkeletonSequence& seq,
                           const NormalizationConfig& cfg);

// Shoulder yaw angle of a frame: -atan2(v_z, v_x). Exposed for tests and
// invariant checks.
double shoulder_yaw(const SkeletonFrame& frame, int left_idx, int right_idx);

}  // namespace skelact
