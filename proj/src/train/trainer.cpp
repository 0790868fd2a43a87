#include "skelact/train/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "skelact/common/error.hpp"
#include "skelact/common/parallel.hpp"

namespace skelact {

SkeletonSequence preprocess_sequence(const SkeletonSequence& seq,
                                     const JointMap* map,
                                     const PipelineConfigSet& cfgs,
                                     const PipelineToggles& toggles) {
    SkeletonSequence cur = map != nullptr ? remap(seq, *map) : seq;
    if (toggles.normalization) cur = normalize(cur, cfgs.normalization);
    return resample(cur, cfgs.window.model_fps);
}

WindowTensor eval_window(const SkeletonSequence& seq, const JointMap* map,
                         const PipelineConfigSet& cfgs,
                         const PipelineToggles& toggles) {
    return pack(preprocess_sequence(seq, map, cfgs, toggles), cfgs.window);
}

namespace {

// Noise keeps its physical meaning on normalized coordinates: the sequence
// scale factor carries sigma into normalized units.
double effective_sigma(const AugmentConfig& aug, const SkeletonSequence& seq) {
    return aug.noise_sigma * seq.norm_scale.value_or(1.0);
}

}  // namespace

TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const PipelineConfigSet& cfgs, const PipelineToggles& toggles,
                  const std::vector<SkeletonSequence>& train_sequences,
                  const JointMap* map) {
    model_cfg.validate();
    train_cfg.validate();
    cfgs.augmentation.validate();
    cfgs.window.validate();
    if (train_sequences.empty())
        throw DataError("training requires a non-empty train split");
    if (train_cfg.threads > 0) set_thread_count(train_cfg.threads);

    // Deterministic pipeline prefix, computed once per sample.
    std::vector<SkeletonSequence> prepared;
    prepared.reserve(train_sequences.size());
    for (const auto& seq : train_sequences) {
        if (!seq.label)
            throw DataError("training sequence '" + seq.source + "' has no label");
        if (*seq.label < 0 || *seq.label >= model_cfg.num_classes)
            throw DataError("label " + std::to_string(*seq.label) +
                            " outside [0, " + std::to_string(model_cfg.num_classes) +
                            ") in '" + seq.source + "'");
        prepared.push_back(preprocess_sequence(seq, map, cfgs, toggles));
    }

    TrainResult result;
    result.params = init_params<float>(model_cfg, train_cfg.seed);
    SgdState<float> state = SgdState<float>::make(result.params);

    const size_t n = prepared.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    Rng shuffle_rng = Rng::derive(train_cfg.seed, 0x73687566);
    Rng dropout_rng = Rng::derive(train_cfg.seed, 0x64726f70);

    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        state.epoch = epoch;
        // Fisher-Yates on our own rng so the order is platform-stable.
        for (size_t i = n; i > 1; --i) {
            const size_t j = static_cast<size_t>(
                shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }

        double loss_sum = 0.0;
        size_t batches = 0;
        size_t correct = 0;
        for (size_t start = 0; start < n; start += static_cast<size_t>(train_cfg.batch_size)) {
            const size_t end =
                std::min(n, start + static_cast<size_t>(train_cfg.batch_size));

            std::vector<WindowTensor> windows(end - start);
            parallel_for(end - start, [&](size_t bi) {
                const size_t idx = order[start + bi];
                const SkeletonSequence& base = prepared[idx];
                Rng aug_rng = Rng::derive(train_cfg.seed, 0x61756731,
                                          static_cast<std::uint64_t>(epoch), idx);
                WindowTensor w;
                if (toggles.augmentation) {
                    w = pack(augment_sequence(base, cfgs.augmentation, aug_rng),
                             cfgs.window);
                } else {
                    w = pack(base, cfgs.window);
                }
                if (toggles.noise)
                    w = add_noise(w, effective_sigma(cfgs.augmentation, base),
                                  aug_rng);
                windows[bi] = std::move(w);
            });

            std::vector<Example> batch(end - start);
            for (size_t bi = 0; bi < windows.size(); ++bi) {
                batch[bi].window = &windows[bi];
                batch[bi].label = *prepared[order[start + bi]].label;
            }

            LossResult<float> lr = loss_and_grads(
                result.params, batch, train_cfg.weight_decay, dropout_rng);
            loss_sum += lr.loss;
            ++batches;
            for (size_t bi = 0; bi < batch.size(); ++bi)
                if (lr.argmax[bi] == batch[bi].label) ++correct;

            sgd_step(result.params, lr.grads, train_cfg, state);
        }

        const double train_acc =
            n > 0 ? static_cast<double>(correct) / static_cast<double>(n) : 0.0;

        EpochStats stats;
        stats.epoch = epoch;
        stats.mean_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
        stats.train_accuracy = train_acc;
        stats.learning_rate = train_cfg.lr_at_epoch(epoch);
        result.history.push_back(stats);

        if (train_cfg.early_stop_train_acc > 0.0 &&
            train_acc >= train_cfg.early_stop_train_acc)
            break;
    }
    return result;
}

}  // namespace skelact
