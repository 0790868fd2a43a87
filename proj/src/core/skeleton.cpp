#include "skelact/core/skeleton.hpp"

#include <cmath>

#include "skelact/common/error.hpp"

namespace skelact {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

bool Vec3::finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

SkeletonFrame make_frame(double t, std::vector<Vec3> joints) {
    SkeletonFrame f;
    f.t = t;
    f.valid.assign(joints.size(), 1);
    f.joints = std::move(joints);
    return f;
}

void SkeletonSequence::validate() const {
    if (fps <= 0.0)
        throw DataError("sequence fps must be positive, got " +
                        std::to_string(fps));
    const int jc = joint_count();
    double prev_t = -1.0;
    for (size_t i = 0; i < frames.size(); ++i) {
        const SkeletonFrame& f = frames[i];
        if (f.joint_count() != jc ||
            f.valid.size() != static_cast<size_t>(jc))
            throw DataError("frame " + std::to_string(i) + " has " +
                            std::to_string(f.joint_count()) + " joints, set " +
                            joint_set->name() + " expects " +
                            std::to_string(jc));
        if (f.t < 0.0)
            throw DataError("frame " + std::to_string(i) +
                            " has negative timestamp");
        if (i > 0 && f.t < prev_t)
            throw DataError("frame " + std::to_string(i) +
                            " breaks non-decreasing timestamp order");
        prev_t = f.t;
        for (const Vec3& p : f.joints)
            if (!p.finite())
                throw DataError("frame " + std::to_string(i) +
                                " contains a non-finite coordinate");
    }
}

std::vector<double> flatten(const SkeletonFrame& frame) {
    std::vector<double> out;
    out.reserve(frame.joints.size() * 3);
    for (const Vec3& p : frame.joints) {
        out.push_back(p.x);
        out.push_back(p.y);
        out.push_back(p.z);
    }
    return out;
}

}  // namespace skelact
