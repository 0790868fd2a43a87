#pragma once

#include <set>
#include <string>
#include <vector>

#include "skelact/core/skeleton.hpp"

namespace skelact {

enum class SplitProtocol { CROSS_SUBJECT, CUSTOM };

// Train/test partition over sequence indices. train and test are disjoint.
struct DatasetSplit {
    std::vector<size_t> train;
    std::vector<size_t> test;
    SplitProtocol protocol = SplitProtocol::CROSS_SUBJECT;
};

// Partitions by performer identity: a sequence lands in train iff its
// subject id is in train_subject_ids. Every sequence must carry a subject id;
// offenders are listed in the error.
DatasetSplit cross_subject_split(const std::vector<SkeletonSequence>& sequences,
                                 const std::set<int>& train_subject_ids,
                                 SplitProtocol protocol = SplitProtocol::CROSS_SUBJECT);

// Loads the training subject id list shipped with the repo
// ({"protocol": "...", "train_subjects": [ints]}).
std::set<int> load_train_subjects(const std::string& path);

}  // namespace skelact
