#pragma once

#include <string>
#include <vector>

#include "skelact/augment/augment.hpp"
#include "skelact/core/joint_map.hpp"
#include "skelact/model/net.hpp"
#include "skelact/preprocess/normalize.hpp"
#include "skelact/window/window.hpp"

namespace skelact {

// Table II row toggles. Noise and augmentation act only at training time;
// normalization is part of the pipeline at both train and eval time.
struct PipelineToggles {
    bool noise = true;
    bool augmentation = true;
    bool normalization = true;
};

// Everything the per-sample pipeline needs.
struct PipelineConfigSet {
    NormalizationConfig normalization;
    AugmentConfig augmentation;
    WindowConfig window;
};

// Deterministic eval-path preprocessing: remap -> [normalize?] -> resample.
// The joint map may be null when the sequence is already in the target set.
SkeletonSequence preprocess_sequence(const SkeletonSequence& seq,
                                     const JointMap* map,
                                     const PipelineConfigSet& cfgs,
                                     const PipelineToggles& toggles);

// preprocess_sequence followed by a center-window pack: the eval pipeline.
WindowTensor eval_window(const SkeletonSequence& seq, const JointMap* map,
                         const PipelineConfigSet& cfgs,
                         const PipelineToggles& toggles);

struct EpochStats {
    int epoch = 0;
    double mean_loss = 0.0;
    double train_accuracy = 0.0;  // running accuracy over training batches
    double learning_rate = 0.0;
};

struct TrainResult {
    ParamsF params;
    std::vector<EpochStats> history;
};

// Shuffled minibatch SGD over the training sequences. The per-sample train
// pipeline is remap -> [normalize?] -> resample -> [shift/crop?] -> pack ->
// [noise?]; eval-only paths never see augmentation or noise. Deterministic
// per seed. Sequences must carry labels in [0, model.num_classes).
TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const PipelineConfigSet& cfgs, const PipelineToggles& toggles,
                  const std::vector<SkeletonSequence>& train_sequences,
                  const JointMap* map = nullptr);

}  // namespace skelact
