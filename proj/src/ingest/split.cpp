#include "skelact/ingest/split.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "skelact/common/error.hpp"

namespace skelact {

DatasetSplit cross_subject_split(const std::vector<SkeletonSequence>& sequences,
                                 const std::set<int>& train_subject_ids,
                                 SplitProtocol protocol) {
    std::string missing;
    for (size_t i = 0; i < sequences.size(); ++i) {
        if (!sequences[i].subject) {
            if (!missing.empty()) missing += ", ";
            missing += std::to_string(i);
        }
    }
    if (!missing.empty())
        throw DataError("sequences without a subject id cannot be split: indices " +
                        missing);

    DatasetSplit split;
    split.protocol = protocol;
    for (size_t i = 0; i < sequences.size(); ++i) {
        if (train_subject_ids.count(*sequences[i].subject))
            split.train.push_back(i);
        else
            split.test.push_back(i);
    }
    return split;
}

std::set<int> load_train_subjects(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open subject list file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("subject list file " + path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("train_subjects") ||
        !doc.at("train_subjects").is_array())
        throw ConfigError("subject list file " + path +
                          " must contain a 'train_subjects' array");
    std::set<int> subjects;
    for (const auto& v : doc.at("train_subjects")) subjects.insert(v.get<int>());
    return subjects;
}

}  // namespace skelact
