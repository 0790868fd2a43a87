#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skelact/core/joint_set.hpp"

namespace skelact {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3& o) const {
        return x == o.x && y == o.y && z == o.z;
    }
    double norm() const;
    bool finite() const;
};

// One timestamped set of 3D joints, camera coordinates in meters.
// Invalid joints carry zeroed coordinates by convention.
struct SkeletonFrame {
    double t = 0.0;                    // seconds, non-negative
    std::vector<Vec3> joints;          // one per joint of the owning set
    std::vector<std::uint8_t> valid;   // per-joint validity flag

    int joint_count() const { return static_cast<int>(joints.size()); }
    bool is_valid(int j) const { return valid[static_cast<size_t>(j)] != 0; }
    void invalidate(int j) {
        valid[static_cast<size_t>(j)] = 0;
        joints[static_cast<size_t>(j)] = Vec3{};
    }
};

// Creates an all-valid frame at time t with the given positions.
SkeletonFrame make_frame(double t, std::vector<Vec3> joints);

// An ordered run of frames sharing one joint set: one action sample.
struct SkeletonSequence {
    const JointSet* joint_set = &common_joint_set();
    std::vector<SkeletonFrame> frames;
    double fps = 30.0;
    std::optional<int> label;               // class id
    std::optional<std::string> label_name;  // class name as recorded, if any
    std::optional<int> subject;             // performer id
    std::string source;                     // free-form provenance
    std::optional<double> norm_scale;       // scale factor applied by normalize

    int joint_count() const { return joint_set->joint_count(); }
    size_t frame_count() const { return frames.size(); }
    bool empty() const { return frames.empty(); }
    double duration() const {
        return frames.empty() ? 0.0 : frames.back().t - frames.front().t;
    }

    // Checks all structural invariants; throws DataError on violation.
    void validate() const;
};

// Flattens a frame to [x0,y0,z0, x1,y1,z1, ...] in joint order. Invalid
// joints contribute their stored (zeroed) coordinates.
std::vector<double> flatten(const SkeletonFrame& frame);

}  // namespace skelact
