#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "skelact/core/skeleton.hpp"

namespace skelact {

// Declarative remapping from a source joint set to a target joint set.
// mapping[j] is the source index feeding target joint j, or nullopt when the
// target joint has no source (it comes out invalid and zeroed).
struct JointMap {
    const JointSet* source = nullptr;
    const JointSet* target = nullptr;
    std::vector<std::optional<int>> mapping;

    // Checks mapping arity and index bounds; throws ConfigError.
    void validate() const;

    // JSON document {source, target, mapping:[int|null]}.
    static JointMap from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// Identity map over a set (mapping[j] = j).
JointMap identity_map(const JointSet& set);

// Built-in maps onto the COMMON pipeline set.
const JointMap& ntu25_to_common_map();
const JointMap& tracker19_to_common_map();

// Named lookup ("ntu25_to_common", "tracker19_to_common",
// "identity_common", ...); throws ConfigError for unknown names.
const JointMap& builtin_joint_map(const std::string& name);

// Loads an array of map documents from a JSON file and returns the one whose
// source/target match, falling back to the built-ins when path is empty.
JointMap load_joint_map(const std::string& maps_path, const JointSet& source,
                        const JointSet& target);

// Re-expresses seq in the map's target joint set. Unmapped target joints are
// invalid with coordinates (0,0,0). Frame count, timestamps, fps, label and
// subject are unchanged.
SkeletonSequence remap(const SkeletonSequence& seq, const JointMap& map);

}  // namespace skelact
