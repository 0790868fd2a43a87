#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "skelact/core/skeleton.hpp"

namespace skelact::test {

// Inverse of flatten, used to check the round trip.
inline SkeletonFrame unflatten(const std::vector<double>& values, double t = 0.0) {
    SkeletonFrame frame;
    frame.t = t;
    for (size_t i = 0; i + 2 < values.size(); i += 3)
        frame.joints.push_back(Vec3{values[i], values[i + 1], values[i + 2]});
    frame.valid.assign(frame.joints.size(), 1);
    return frame;
}

// A COMMON-set sequence whose joint j at frame f sits at a distinct,
// deterministic position. Handy for remap and windowing checks.
inline SkeletonSequence make_test_sequence(int frames, double fps = 30.0,
                                           const JointSet& set = common_joint_set()) {
    SkeletonSequence seq;
    seq.joint_set = &set;
    seq.fps = fps;
    for (int f = 0; f < frames; ++f) {
        std::vector<Vec3> joints;
        for (int j = 0; j < set.joint_count(); ++j)
            joints.push_back(Vec3{0.01 * j + 0.001 * f, 0.02 * j, 0.03 * j - 0.002 * f});
        seq.frames.push_back(make_frame(f / fps, std::move(joints)));
    }
    return seq;
}

inline bool frames_equal(const SkeletonFrame& a, const SkeletonFrame& b,
                         double tol = 0.0) {
    if (a.t != b.t || a.joints.size() != b.joints.size()) return false;
    for (size_t j = 0; j < a.joints.size(); ++j) {
        if (a.valid[j] != b.valid[j]) return false;
        const Vec3 d = a.joints[j] - b.joints[j];
        if (std::abs(d.x) > tol || std::abs(d.y) > tol || std::abs(d.z) > tol)
            return false;
    }
    return true;
}

inline bool sequences_equal(const SkeletonSequence& a, const SkeletonSequence& b,
                            double tol = 0.0) {
    if (a.frames.size() != b.frames.size()) return false;
    for (size_t i = 0; i < a.frames.size(); ++i)
        if (!frames_equal(a.frames[i], b.frames[i], tol)) return false;
    return a.fps == b.fps && a.label == b.label && a.subject == b.subject;
}

// Scratch directory wiped per test.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("skelact_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace skelact::test
