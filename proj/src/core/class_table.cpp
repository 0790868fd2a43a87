#include "skelact/core/class_table.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unordered_set>

#include "skelact/common/error.hpp"

namespace skelact {

ClassTable::ClassTable(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::unordered_set<std::string> names;
    for (size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].class_id != static_cast<int>(i))
            throw ConfigError("class table ids must be contiguous from 0; entry " +
                              std::to_string(i) + " has id " +
                              std::to_string(entries_[i].class_id));
        if (!names.insert(entries_[i].name).second)
            throw ConfigError("duplicate class name '" + entries_[i].name +
                              "' in class table");
    }
}

const std::string& ClassTable::name_of(int class_id) const {
    if (class_id < 0 || class_id >= size())
        throw DataError("class id " + std::to_string(class_id) +
                        " outside table of size " + std::to_string(size()));
    return entries_[static_cast<size_t>(class_id)].name;
}

std::optional<int> ClassTable::id_of(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.class_id;
    return std::nullopt;
}

int ClassTable::require_id(const std::string& name) const {
    if (auto id = id_of(name)) return *id;
    throw DataError("class name '" + name + "' is not in the class table");
}

std::optional<int> ClassTable::id_of_source(int source_dataset_id) const {
    for (const auto& e : entries_)
        if (e.source_dataset_id && *e.source_dataset_id == source_dataset_id)
            return e.class_id;
    return std::nullopt;
}

ClassTable ClassTable::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("class table JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("classes") || !doc.at("classes").is_array())
        throw ConfigError("class table document must contain a 'classes' array");
    std::vector<Entry> entries;
    for (const auto& item : doc.at("classes")) {
        Entry e;
        e.class_id = item.at("class_id").get<int>();
        e.name = item.at("name").get<std::string>();
        if (item.contains("source_dataset_id") && !item.at("source_dataset_id").is_null())
            e.source_dataset_id = item.at("source_dataset_id").get<int>();
        entries.push_back(std::move(e));
    }
    return ClassTable(std::move(entries));
}

ClassTable ClassTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open class table file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string ClassTable::to_json_text() const {
    nlohmann::ordered_json doc;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : entries_) {
        nlohmann::ordered_json item;
        item["class_id"] = e.class_id;
        item["name"] = e.name;
        if (e.source_dataset_id)
            item["source_dataset_id"] = *e.source_dataset_id;
        else
            item["source_dataset_id"] = nullptr;
        arr.push_back(item);
    }
    doc["classes"] = arr;
    return doc.dump(2) + "\n";
}

}  // namespace skelact
