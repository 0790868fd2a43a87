#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skelact/train/trainer.hpp"

namespace skelact {

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
    std::vector<double> per_class_recall;
    std::string config_fingerprint;
    std::string dataset_id;

    std::int64_t total() const;
    std::string to_text(const std::vector<std::string>* class_names = nullptr) const;
};

// EVAL-mode prediction per sequence over its single center window; exact
// accuracy and confusion counts. Side-effect free and deterministic.
EvalReport evaluate(const ParamsF& params,
                    const std::vector<SkeletonSequence>& sequences,
                    const PipelineConfigSet& cfgs, const PipelineToggles& toggles,
                    const std::string& dataset_id, const JointMap* map = nullptr);

}  // namespace skelact
