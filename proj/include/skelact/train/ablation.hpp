#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "skelact/train/metrics.hpp"

namespace skelact {

// One row of the 2^3 toggle grid, in the canonical publication order:
// baseline first, all three additions last.
struct AblationRow {
    std::string label;
    PipelineToggles toggles;
    // Reference accuracies reported for this configuration (fractions), used
    // as annotations in the text table.
    std::optional<double> reference_in_domain;
    std::optional<double> reference_transfer;
};

// The eight rows in canonical order.
std::vector<AblationRow> ablation_grid();

struct AblationResult {
    AblationRow row;
    double acc_in_domain = 0.0;
    double acc_shifted = 0.0;
};

// Trains one model per row (shared seed across rows), evaluates each on the
// in-domain and shifted test sets, and returns the table in grid order.
std::vector<AblationResult> run_ablation(
    const ModelConfig& model_cfg, const TrainConfig& train_cfg,
    const PipelineConfigSet& cfgs,
    const std::vector<SkeletonSequence>& train_set,
    const std::vector<SkeletonSequence>& test_in_domain,
    const std::vector<SkeletonSequence>& test_shifted,
    const JointMap* map = nullptr);

// CSV schema: config,noise,augmentation,normalization,acc_in_domain,acc_shifted
std::string ablation_csv(const std::vector<AblationResult>& results);

// Aligned text table with the reference accuracies as annotations.
std::string ablation_table(const std::vector<AblationResult>& results);

}  // namespace skelact
