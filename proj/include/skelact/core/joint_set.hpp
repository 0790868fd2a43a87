#pragma once

#include <optional>
#include <string>
#include <vector>

namespace skelact {

enum class JointSetKind { NTU25, TRACKER19, COMMON };

std::string to_string(JointSetKind kind);
JointSetKind joint_set_kind_from_string(const std::string& name);

// Named, ordered list of tracked joints. The three built-in layouts:
//   NTU25     - Kinect v2 ordering used by the NTU-RGBD skeleton files
//   TRACKER19 - 19-point layout of the live body tracker
//   COMMON    - 15-joint intersection used by the pipeline
class JointSet {
public:
    JointSet(JointSetKind kind, std::vector<std::string> joint_names);

    JointSetKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int joint_count() const { return static_cast<int>(joint_names_.size()); }
    const std::vector<std::string>& joint_names() const { return joint_names_; }

    // Index of a joint by name, or nullopt.
    std::optional<int> find(const std::string& joint_name) const;

    // Index of a joint by name; throws ConfigError naming the joint and set.
    int require(const std::string& joint_name) const;

    bool operator==(const JointSet& other) const {
        return kind_ == other.kind_ && joint_names_ == other.joint_names_;
    }
    bool operator!=(const JointSet& other) const { return !(*this == other); }

private:
    JointSetKind kind_;
    std::string name_;
    std::vector<std::string> joint_names_;
};

// Built-in joint sets. Returned by reference to a process-lifetime instance.
const JointSet& ntu25_joint_set();
const JointSet& tracker19_joint_set();
const JointSet& common_joint_set();

// Lookup by set name ("NTU25", "TRACKER19", "COMMON").
const JointSet& joint_set_by_name(const std::string& name);

// Canonical joint names of the COMMON set, also used by the synthetic
// generator and the normalization defaults.
namespace joints {
inline constexpr const char* kSpineBase = "spine_base";
inline constexpr const char* kNeck = "neck";
inline constexpr const char* kHead = "head";
inline constexpr const char* kLeftShoulder = "left_shoulder";
inline constexpr const char* kRightShoulder = "right_shoulder";
inline constexpr const char* kLeftElbow = "left_elbow";
inline constexpr const char* kRightElbow = "right_elbow";
inline constexpr const char* kLeftWrist = "left_wrist";
inline constexpr const char* kRightWrist = "right_wrist";
inline constexpr const char* kLeftHip = "left_hip";
inline constexpr const char* kRightHip = "right_hip";
inline constexpr const char* kLeftKnee = "left_knee";
inline constexpr const char* kRightKnee = "right_knee";
inline constexpr const char* kLeftAnkle = "left_ankle";
inline constexpr const char* kRightAnkle = "right_ankle";
}  // namespace joints

}  // namespace skelact
