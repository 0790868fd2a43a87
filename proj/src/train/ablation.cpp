#include "skelact/train/ablation.hpp"

#include <iomanip>
#include <sstream>

#include "skelact/common/error.hpp"

namespace skelact {

std::vector<AblationRow> ablation_grid() {
    auto row = [](const std::string& label, bool noise, bool aug, bool norm,
                  double ref_in, double ref_tr) {
        AblationRow r;
        r.label = label;
        r.toggles.noise = noise;
        r.toggles.augmentation = aug;
        r.toggles.normalization = norm;
        r.reference_in_domain = ref_in;
        r.reference_transfer = ref_tr;
        return r;
    };
    // Reference columns: accuracies reported for the corresponding
    // configuration on NTU cross-subject test and the recorded test set.
    return {
        row("Baseline", false, false, false, 0.74, 0.2098),
        row("Baseline + noise", true, false, false, 0.7517, 0.2345),
        row("Baseline + augmentation", false, true, false, 0.753, 0.1604),
        row("Baseline + augmentation + noise", true, true, false, 0.743, 0.2592),
        row("Baseline + normalization", false, false, true, 0.746, 0.4071),
        row("Baseline + normalization + noise", true, false, true, 0.716, 0.3703),
        row("Baseline + normalization + augmentation", false, true, true, 0.70,
            0.4938),
        row("Baseline + normalization + augmentation + noise", true, true, true,
            0.689, 0.4691),
    };
}

std::vector<AblationResult> run_ablation(
    const ModelConfig& model_cfg, const TrainConfig& train_cfg,
    const PipelineConfigSet& cfgs,
    const std::vector<SkeletonSequence>& train_set,
    const std::vector<SkeletonSequence>& test_in_domain,
    const std::vector<SkeletonSequence>& test_shifted,
    const JointMap* map) {
    std::vector<AblationResult> results;
    for (const AblationRow& row : ablation_grid()) {
        // Shared seed across rows isolates the toggle effects.
        TrainResult trained =
            train(model_cfg, train_cfg, cfgs, row.toggles, train_set, map);
        AblationResult res;
        res.row = row;
        res.acc_in_domain = evaluate(trained.params, test_in_domain, cfgs,
                                     row.toggles, "in_domain", map)
                                .accuracy;
        res.acc_shifted = evaluate(trained.params, test_shifted, cfgs,
                                   row.toggles, "shifted", map)
                              .accuracy;
        results.push_back(std::move(res));
    }
    return results;
}

std::string ablation_csv(const std::vector<AblationResult>& results) {
    std::ostringstream out;
    out << "config,noise,augmentation,normalization,acc_in_domain,acc_shifted\n";
    for (const auto& r : results) {
        out << r.row.label << "," << (r.row.toggles.noise ? 1 : 0) << ","
            << (r.row.toggles.augmentation ? 1 : 0) << ","
            << (r.row.toggles.normalization ? 1 : 0) << "," << std::fixed
            << std::setprecision(4) << r.acc_in_domain << "," << r.acc_shifted
            << "\n";
    }
    return out.str();
}

std::string ablation_table(const std::vector<AblationResult>& results) {
    std::ostringstream out;
    out << std::left << std::setw(52) << "config" << std::right << std::setw(12)
        << "in-domain" << std::setw(12) << "shifted" << std::setw(16)
        << "ref in-dom" << std::setw(12) << "ref xfer"
        << "\n";
    out << std::string(104, '-') << "\n";
    for (const auto& r : results) {
        out << std::left << std::setw(52) << r.row.label << std::right
            << std::fixed << std::setprecision(2) << std::setw(11)
            << 100.0 * r.acc_in_domain << "%" << std::setw(11)
            << 100.0 * r.acc_shifted << "%";
        if (r.row.reference_in_domain)
            out << std::setw(15) << 100.0 * *r.row.reference_in_domain << "%";
        else
            out << std::setw(16) << "-";
        if (r.row.reference_transfer)
            out << std::setw(11) << 100.0 * *r.row.reference_transfer << "%";
        else
            out << std::setw(12) << "-";
        out << "\n";
    }
    return out.str();
}

}  // namespace skelact
