#include "skelact/train/metrics.hpp"

#include <iomanip>
#include <sstream>

#include "skelact/common/error.hpp"
#include "skelact/common/parallel.hpp"

namespace skelact {

std::int64_t EvalReport::total() const {
    std::int64_t n = 0;
    for (const auto& row : confusion)
        for (const std::int64_t v : row) n += v;
    return n;
}

std::string EvalReport::to_text(const std::vector<std::string>* class_names) const {
    std::ostringstream out;
    out << "dataset: " << dataset_id << "\n";
    out << "config:  " << config_fingerprint << "\n";
    out << "samples: " << total() << "\n";
    out << "accuracy: " << std::fixed << std::setprecision(4) << accuracy << "\n";
    out << "confusion (rows = true class):\n";
    for (size_t i = 0; i < confusion.size(); ++i) {
        if (class_names != nullptr && i < class_names->size())
            out << std::setw(12) << (*class_names)[i] << " ";
        else
            out << std::setw(12) << i << " ";
        for (const std::int64_t v : confusion[i]) out << std::setw(6) << v;
        out << "   recall " << std::setprecision(3) << per_class_recall[i] << "\n";
    }
    return out.str();
}

EvalReport evaluate(const ParamsF& params,
                    const std::vector<SkeletonSequence>& sequences,
                    const PipelineConfigSet& cfgs, const PipelineToggles& toggles,
                    const std::string& dataset_id, const JointMap* map) {
    const int k = params.cfg.num_classes;
    EvalReport report;
    report.dataset_id = dataset_id;
    {
        std::ostringstream fp;
        fp << "noise=" << (toggles.noise ? 1 : 0)
           << ",augmentation=" << (toggles.augmentation ? 1 : 0)
           << ",normalization=" << (toggles.normalization ? 1 : 0)
           << ",D=" << params.cfg.input_channels << ",K=" << k;
        report.config_fingerprint = fp.str();
    }
    report.confusion.assign(static_cast<size_t>(k),
                            std::vector<std::int64_t>(static_cast<size_t>(k), 0));
    report.per_class_recall.assign(static_cast<size_t>(k), 0.0);

    for (const auto& seq : sequences) {
        if (!seq.label)
            throw DataError("evaluation sequence '" + seq.source + "' has no label");
        if (*seq.label < 0 || *seq.label >= k)
            throw DataError("label " + std::to_string(*seq.label) +
                            " outside [0, " + std::to_string(k) + ") in '" +
                            seq.source + "'");
    }

    std::vector<int> predicted(sequences.size(), -1);
    parallel_for(sequences.size(), [&](size_t i) {
        const WindowTensor w = eval_window(sequences[i], map, cfgs, toggles);
        predicted[i] = predict(params, w).class_id;
    });

    std::int64_t hits = 0;
    for (size_t i = 0; i < sequences.size(); ++i) {
        const int truth = *sequences[i].label;
        report.confusion[static_cast<size_t>(truth)][static_cast<size_t>(predicted[i])]++;
        if (predicted[i] == truth) ++hits;
    }
    report.accuracy = sequences.empty()
                          ? 0.0
                          : static_cast<double>(hits) /
                                static_cast<double>(sequences.size());
    for (int c = 0; c < k; ++c) {
        std::int64_t row_total = 0;
        for (const std::int64_t v : report.confusion[static_cast<size_t>(c)])
            row_total += v;
        report.per_class_recall[static_cast<size_t>(c)] =
            row_total > 0 ? static_cast<double>(
                                report.confusion[static_cast<size_t>(c)]
                                                [static_cast<size_t>(c)]) /
                                static_cast<double>(row_total)
                          : 0.0;
    }
    return report;
}

}  // namespace skelact
