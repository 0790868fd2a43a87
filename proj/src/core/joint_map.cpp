#include "skelact/core/joint_map.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "skelact/common/error.hpp"

namespace skelact {

void JointMap::validate() const {
    if (source == nullptr || target == nullptr)
        throw ConfigError("joint map is missing its source or target set");
    if (mapping.size() != static_cast<size_t>(target->joint_count()))
        throw ConfigError("joint map for target " + target->name() + " has " +
                          std::to_string(mapping.size()) + " entries, expected " +
                          std::to_string(target->joint_count()));
    for (size_t j = 0; j < mapping.size(); ++j) {
        if (mapping[j] &&
            (*mapping[j] < 0 || *mapping[j] >= source->joint_count()))
            throw ConfigError("joint map entry " + std::to_string(j) +
                              " points at source index " +
                              std::to_string(*mapping[j]) + ", out of range for " +
                              source->name());
    }
}

JointMap JointMap::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("joint map JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("source") || !doc.contains("target") ||
        !doc.contains("mapping"))
        throw ConfigError("joint map document must contain source, target, mapping");
    JointMap map;
    map.source = &joint_set_by_name(doc.at("source").get<std::string>());
    map.target = &joint_set_by_name(doc.at("target").get<std::string>());
    for (const auto& entry : doc.at("mapping")) {
        if (entry.is_null())
            map.mapping.push_back(std::nullopt);
        else if (entry.is_number_integer())
            map.mapping.push_back(entry.get<int>());
        else
            throw ConfigError("joint map mapping entries must be int or null");
    }
    map.validate();
    return map;
}

std::string JointMap::to_json_text() const {
    nlohmann::ordered_json doc;
    doc["source"] = source->name();
    doc["target"] = target->name();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& entry : mapping) {
        if (entry)
            arr.push_back(*entry);
        else
            arr.push_back(nullptr);
    }
    doc["mapping"] = arr;
    return doc.dump(2) + "\n";
}

JointMap identity_map(const JointSet& set) {
    JointMap map;
    map.source = &set;
    map.target = &set;
    for (int j = 0; j < set.joint_count(); ++j) map.mapping.push_back(j);
    return map;
}

namespace {

// Builds a map by matching target joint names against the source set.
JointMap map_by_names(const JointSet& source, const JointSet& target) {
    JointMap map;
    map.source = &source;
    map.target = &target;
    for (const auto& name : target.joint_names()) map.mapping.push_back(source.find(name));
    map.validate();
    return map;
}

}  // namespace

const JointMap& ntu25_to_common_map() {
    static const JointMap map = [] {
        JointMap m = map_by_names(ntu25_joint_set(), common_joint_set());
        return m;
    }();
    return map;
}

const JointMap& tracker19_to_common_map() {
    static const JointMap map = [] {
        JointMap m = map_by_names(tracker19_joint_set(), common_joint_set());
        // The tracker reports feet, not ankles; they stand in for the
        // COMMON ankle joints.
        const JointSet& src = tracker19_joint_set();
        const JointSet& dst = common_joint_set();
        m.mapping[static_cast<size_t>(dst.require(joints::kLeftAnkle))] =
            src.require("left_foot");
        m.mapping[static_cast<size_t>(dst.require(joints::kRightAnkle))] =
            src.require("right_foot");
        m.validate();
        return m;
    }();
    return map;
}

const JointMap& builtin_joint_map(const std::string& name) {
    static const JointMap id_common = identity_map(common_joint_set());
    static const JointMap id_ntu25 = identity_map(ntu25_joint_set());
    static const JointMap id_tracker19 = identity_map(tracker19_joint_set());
    if (name == "ntu25_to_common") return ntu25_to_common_map();
    if (name == "tracker19_to_common") return tracker19_to_common_map();
    if (name == "identity_common") return id_common;
    if (name == "identity_ntu25") return id_ntu25;
    if (name == "identity_tracker19") return id_tracker19;
    throw ConfigError("unknown built-in joint map: " + name);
}

JointMap load_joint_map(const std::string& maps_path, const JointSet& source,
                        const JointSet& target) {
    if (source == target) return identity_map(source);
    if (!maps_path.empty()) {
        std::ifstream in(maps_path);
        if (!in)
            throw ConfigError("cannot open joint maps file: " + maps_path);
        std::stringstream buf;
        buf << in.rdbuf();
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(buf.str());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("joint maps file " + maps_path + ": " + e.what());
        }
        if (!doc.is_array())
            throw ConfigError("joint maps file " + maps_path +
                              " must contain a JSON array of maps");
        for (const auto& entry : doc) {
            JointMap map = JointMap::from_json_text(entry.dump());
            if (*map.source == source && *map.target == target) return map;
        }
        throw ConfigError("joint maps file " + maps_path + " has no map " +
                          source.name() + " -> " + target.name());
    }
    if (source == ntu25_joint_set() && target == common_joint_set())
        return ntu25_to_common_map();
    if (source == tracker19_joint_set() && target == common_joint_set())
        return tracker19_to_common_map();
    throw ConfigError("no built-in joint map " + source.name() + " -> " +
                      target.name());
}

SkeletonSequence remap(const SkeletonSequence& seq, const JointMap& map) {
    map.validate();
    if (*seq.joint_set != *map.source)
        throw DataError("cannot remap: sequence joint set " +
                        seq.joint_set->name() + " does not match map source " +
                        map.source->name());
    SkeletonSequence out = seq;
    out.joint_set = map.target;
    const int tjc = map.target->joint_count();
    for (size_t fi = 0; fi < seq.frames.size(); ++fi) {
        const SkeletonFrame& f = seq.frames[fi];
        SkeletonFrame& g = out.frames[fi];
        g.t = f.t;
        g.joints.assign(static_cast<size_t>(tjc), Vec3{});
        g.valid.assign(static_cast<size_t>(tjc), 0);
        for (int j = 0; j < tjc; ++j) {
            const auto& src = map.mapping[static_cast<size_t>(j)];
            if (!src) continue;
            g.joints[static_cast<size_t>(j)] = f.joints[static_cast<size_t>(*src)];
            g.valid[static_cast<size_t>(j)] = f.valid[static_cast<size_t>(*src)];
        }
    }
    return out;
}

}  // namespace skelact
