#include "skelact/core/joint_set.hpp"

#include <unordered_set>

#include "skelact/common/error.hpp"

namespace skelact {

std::string to_string(JointSetKind kind) {
    switch (kind) {
        case JointSetKind::NTU25: return "NTU25";
        case JointSetKind::TRACKER19: return "TRACKER19";
        case JointSetKind::COMMON: return "COMMON";
    }
    return "?";
}

JointSetKind joint_set_kind_from_string(const std::string& name) {
    if (name == "NTU25") return JointSetKind::NTU25;
    if (name == "TRACKER19") return JointSetKind::TRACKER19;
    if (name == "COMMON") return JointSetKind::COMMON;
    throw ConfigError("unknown joint set name: '" + name +
                      "' (expected NTU25, TRACKER19 or COMMON)");
}

JointSet::JointSet(JointSetKind kind, std::vector<std::string> joint_names)
    : kind_(kind), name_(to_string(kind)), joint_names_(std::move(joint_names)) {
    if (kind_ == JointSetKind::NTU25 && joint_names_.size() != 25)
        throw ConfigError("NTU25 joint set must have exactly 25 joints, got " +
                          std::to_string(joint_names_.size()));
    if (kind_ == JointSetKind::TRACKER19 && joint_names_.size() != 19)
        throw ConfigError("TRACKER19 joint set must have exactly 19 joints, got " +
                          std::to_string(joint_names_.size()));
    if (joint_names_.empty())
        throw ConfigError("joint set must contain at least one joint");
    std::unordered_set<std::string> seen;
    for (const auto& n : joint_names_) {
        if (!seen.insert(n).second)
            throw ConfigError("duplicate joint name '" + n + "' in set " + name_);
    }
}

std::optional<int> JointSet::find(const std::string& joint_name) const {
    for (size_t i = 0; i < joint_names_.size(); ++i)
        if (joint_names_[i] == joint_name) return static_cast<int>(i);
    return std::nullopt;
}

int JointSet::require(const std::string& joint_name) const {
    if (auto idx = find(joint_name)) return *idx;
    throw ConfigError("joint '" + joint_name + "' not present in joint set " +
                      name_);
}

// Kinect v2 ordering as published with the NTU-RGBD tooling: spine base
// first, thumbs last.
const JointSet& ntu25_joint_set() {
    static const JointSet set(
        JointSetKind::NTU25,
        {"spine_base",     "spine_mid",      "neck",           "head",
         "left_shoulder",  "left_elbow",     "left_wrist",     "left_hand",
         "right_shoulder", "right_elbow",    "right_wrist",    "right_hand",
         "left_hip",       "left_knee",      "left_ankle",     "left_foot",
         "right_hip",      "right_knee",     "right_ankle",    "right_foot",
         "spine_shoulder", "left_hand_tip",  "left_thumb",     "right_hand_tip",
         "right_thumb"});
    return set;
}

// 19-point layout of the live tracker SDK.
const JointSet& tracker19_joint_set() {
    static const JointSet set(
        JointSetKind::TRACKER19,
        {"head",          "neck",        "spine_shoulder", "left_shoulder",
         "left_elbow",    "left_wrist",  "left_hand",      "right_shoulder",
         "right_elbow",   "right_wrist", "right_hand",     "spine_mid",
         "spine_base",    "left_hip",    "left_knee",      "left_foot",
         "right_hip",     "right_knee",  "right_foot"});
    return set;
}

// Anatomically shared 15-joint subset used by the pipeline. Hands, feet and
// the extra spine points are excluded; the torso anchor is the spine base.
const JointSet& common_joint_set() {
    static const JointSet set(
        JointSetKind::COMMON,
        {joints::kSpineBase,    joints::kNeck,       joints::kHead,
         joints::kLeftShoulder, joints::kLeftElbow,  joints::kLeftWrist,
         joints::kRightShoulder, joints::kRightElbow, joints::kRightWrist,
         joints::kLeftHip,      joints::kLeftKnee,   joints::kLeftAnkle,
         joints::kRightHip,     joints::kRightKnee,  joints::kRightAnkle});
    return set;
}

const JointSet& joint_set_by_name(const std::string& name) {
    switch (joint_set_kind_from_string(name)) {
        case JointSetKind::NTU25: return ntu25_joint_set();
        case JointSetKind::TRACKER19: return tracker19_joint_set();
        case JointSetKind::COMMON: return common_joint_set();
    }
    throw ConfigError("unknown joint set name: " + name);
}

}  // namespace skelact
