#include "skelact/preprocess/normalize.hpp"

#include <cmath>

#include "skelact/common/error.hpp"

namespace skelact {

namespace {

constexpr double kDegenerateLength = 1e-6;

// Applies f to every valid joint of every frame; invalid joints stay zeroed.
template <typename F>
SkeletonSequence transform_valid_joints(const SkeletonSequence& seq, F&& f) {
    SkeletonSequence out = seq;
    for (size_t fi = 0; fi < out.frames.size(); ++fi) {
        SkeletonFrame& frame = out.frames[fi];
        for (size_t j = 0; j < frame.joints.size(); ++j)
            if (frame.valid[j]) frame.joints[j] = f(fi, frame.joints[j]);
    }
    return out;
}

}  // namespace

void NormalizationConfig::validate() const {
    if (!(reference_torso_length > 0.0))
        throw ConfigError("normalization.reference_torso_length must be > 0");
    if (center_joint.empty() || left_shoulder.empty() || right_shoulder.empty() ||
        torso_top.empty() || torso_bottom.empty())
        throw ConfigError("normalization joint names must be non-empty");
}

double shoulder_yaw(const SkeletonFrame& frame, int left_idx, int right_idx) {
    const Vec3 v = frame.joints[static_cast<size_t>(right_idx)] -
                   frame.joints[static_cast<size_t>(left_idx)];
    return -std::atan2(v.z, v.x);
}

SkeletonSequence center(const SkeletonSequence& seq, const NormalizationConfig& cfg) {
    const int cj = seq.joint_set->require(cfg.center_joint);

    // Per-frame center, falling back to the nearest valid one in time.
    std::vector<Vec3> centers(seq.frames.size());
    std::vector<bool> have(seq.frames.size(), false);
    bool any = false;
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        if (seq.frames[i].is_valid(cj)) {
            centers[i] = seq.frames[i].joints[static_cast<size_t>(cj)];
            have[i] = true;
            any = true;
        }
    }
    if (!any)
        throw DataError("center joint '" + cfg.center_joint +
                        "' is valid in no frame; cannot center sequence");
    size_t first_valid = 0;
    while (!have[first_valid]) ++first_valid;
    Vec3 last = centers[first_valid];
    for (size_t i = 0; i < centers.size(); ++i) {
        if (have[i])
            last = centers[i];
        else
            centers[i] = last;  // leading frames borrow the first valid center
    }

    return transform_valid_joints(
        seq, [&](size_t fi, const Vec3& p) { return p - centers[fi]; });
}

SkeletonSequence scale(const SkeletonSequence& seq, const NormalizationConfig& cfg) {
    cfg.validate();
    const int top = seq.joint_set->require(cfg.torso_top);
    const int bottom = seq.joint_set->require(cfg.torso_bottom);

    double sum = 0.0;
    size_t n = 0;
    for (const SkeletonFrame& f : seq.frames) {
        if (f.is_valid(top) && f.is_valid(bottom)) {
            sum += (f.joints[static_cast<size_t>(top)] -
                    f.joints[static_cast<size_t>(bottom)])
                       .norm();
            ++n;
        }
    }
    if (n == 0)
        throw DataError("torso joints '" + cfg.torso_top + "'/'" +
                        cfg.torso_bottom + "' are never jointly valid");
    const double mean_torso = sum / static_cast<double>(n);
    if (mean_torso < kDegenerateLength)
        throw DataError("degenerate skeleton: mean torso length " +
                        std::to_string(mean_torso) + " m is below 1e-6 m");

    const double s = cfg.reference_torso_length / mean_torso;
    SkeletonSequence out = transform_valid_joints(
        seq, [&](size_t, const Vec3& p) { return p * s; });
    out.norm_scale = s;
    out.source = seq.source.empty() ? ("scale=" + std::to_string(s))
                                    : (seq.source + ";scale=" + std::to_string(s));
    return out;
}

SkeletonSequence align_shoulders(const SkeletonSequence& seq,
                                 const NormalizationConfig& cfg) {
    cfg.validate();
    const int lj = seq.joint_set->require(cfg.left_shoulder);
    const int rj = seq.joint_set->require(cfg.right_shoulder);

    auto frame_theta = [&](const SkeletonFrame& f) -> std::optional<double> {
        if (!f.is_valid(lj) || !f.is_valid(rj)) return std::nullopt;
        const Vec3 v = f.joints[static_cast<size_t>(rj)] -
                       f.joints[static_cast<size_t>(lj)];
        if (std::hypot(v.x, v.z) < kDegenerateLength)
            throw DataError(
                "shoulders are vertically stacked; shoulder line cannot be "
                "aligned");
        return -std::atan2(v.z, v.x);
    };

    std::vector<double> theta(seq.frames.size(), 0.0);
    if (cfg.rotation_reference == RotationReference::FIRST_VALID_FRAME) {
        std::optional<double> ref;
        for (const SkeletonFrame& f : seq.frames) {
            ref = frame_theta(f);
            if (ref) break;
        }
        if (!ref)
            throw DataError("both shoulders are valid in no frame; cannot align");
        theta.assign(seq.frames.size(), *ref);
    } else {
        // Per-frame mode: frames without both shoulders reuse the most
        // recent angle (or the next valid one for leading frames).
        std::optional<double> last;
        std::vector<bool> have(seq.frames.size(), false);
        for (size_t i = 0; i < seq.frames.size(); ++i) {
            if (auto th = frame_theta(seq.frames[i])) {
                theta[i] = *th;
                have[i] = true;
                last = th;
            } else if (last) {
                theta[i] = *last;
            }
        }
        if (!last)
            throw DataError("both shoulders are valid in no frame; cannot align");
        for (size_t i = 0; i < seq.frames.size() && !have[i]; ++i) {
            size_t k = i;
            while (k < seq.frames.size() && !have[k]) ++k;
            theta[i] = theta[k];
        }
    }

    // Yaw-only rotation keeps the gravity direction intact:
    //   x' = cos(t)x - sin(t)z,  y' = y,  z' = sin(t)x + cos(t)z
    return transform_valid_joints(seq, [&](size_t fi, const Vec3& p) {
        const double c = std::cos(theta[fi]);
        const double s = std::sin(theta[fi]);
        return Vec3{c * p.x - s * p.z, p.y, s * p.x + c * p.z};
    });
}

SkeletonSequence normalize(const SkeletonSequence& seq,
                           const NormalizationConfig& cfg) {
    if (!cfg.enabled) return seq;
    cfg.validate();
    return align_shoulders(scale(center(seq, cfg), cfg), cfg);
}

}  // namespace skelact
