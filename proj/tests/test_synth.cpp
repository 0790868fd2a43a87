#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "skelact/ingest/recording.hpp"
#include "skelact/preprocess/normalize.hpp"
#include "skelact/synth/generator.hpp"
#include "skelact/train/trainer.hpp"
#include "skelact/window/window.hpp"

using namespace skelact;

namespace {

// Canonical-pose generator: no actor variation, no jitter.
SynthConfig canonical_config() {
    SynthConfig cfg;
    cfg.samples_per_class = 1;
    cfg.actor_scale_range = {1.0, 1.0};
    cfg.actor_yaw_range = 0.0;
    cfg.actor_translation_range = 0.0;
    cfg.jitter_sigma = 0.0;
    return cfg;
}

std::string dataset_bytes(const std::vector<SkeletonSequence>& seqs,
                          const ClassTable& table) {
    std::ostringstream out;
    for (const auto& s : seqs) write_recording(s, out, &table);
    return out.str();
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("the same seed reproduces the dataset byte for byte") {
    SynthConfig cfg;
    cfg.samples_per_class = 3;
    cfg.seed = 123;
    const ClassTable table = synth_class_table(cfg);
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    CHECK(dataset_bytes(a, table) == dataset_bytes(b, table));

    cfg.seed = 124;
    const auto c = generate(cfg);
    CHECK(dataset_bytes(a, table) != dataset_bytes(c, table));
}

TEST_CASE("generated sequences satisfy the sequence invariants") {
    SynthConfig cfg;
    cfg.samples_per_class = 2;
    for (const auto& seq : generate(cfg)) {
        seq.validate();
        CHECK(seq.frame_count() == 90);
        CHECK(seq.label.has_value());
        CHECK(*seq.joint_set == common_joint_set());
    }
}

TEST_CASE("wave oscillates the right wrist") {
    SynthConfig cfg = canonical_config();
    cfg.classes = {"wave"};
    const auto seqs = generate(cfg);
    const int wrist = common_joint_set().require(joints::kRightWrist);

    int sign_changes = 0;
    double prev_v = 0.0;
    for (size_t f = 1; f < seqs[0].frames.size(); ++f) {
        const double v = seqs[0].frames[f].joints[static_cast<size_t>(wrist)].x -
                         seqs[0].frames[f - 1].joints[static_cast<size_t>(wrist)].x;
        if (f > 1 && v * prev_v < 0.0) ++sign_changes;
        prev_v = v;
    }
    CHECK(sign_changes >= 2);
}

TEST_CASE("sit drops the hips monotonically by at least 0.3 m") {
    SynthConfig cfg = canonical_config();
    cfg.classes = {"sit"};
    const auto seqs = generate(cfg);
    const int hip = common_joint_set().require(joints::kLeftHip);

    double prev = 1e9;
    for (const auto& frame : seqs[0].frames) {
        const double y = frame.joints[static_cast<size_t>(hip)].y;
        CHECK(y <= prev + 1e-9);
        prev = y;
    }
    const double drop = seqs[0].frames.front().joints[static_cast<size_t>(hip)].y -
                        seqs[0].frames.back().joints[static_cast<size_t>(hip)].y;
    CHECK(drop >= 0.3);
}

TEST_CASE("actor scale range spans the configured torso ratio") {
    SynthConfig cfg;
    cfg.classes = {"wave"};
    cfg.samples_per_class = 200;
    cfg.actor_scale_range = {0.8, 1.2};
    cfg.jitter_sigma = 0.0;
    cfg.seed = 5;
    const auto seqs = generate(cfg);
    const int neck = common_joint_set().require(joints::kNeck);
    const int base = common_joint_set().require(joints::kSpineBase);

    double lo = 1e9, hi = 0.0;
    for (const auto& seq : seqs) {
        const double torso = (seq.frames[0].joints[static_cast<size_t>(neck)] -
                              seq.frames[0].joints[static_cast<size_t>(base)])
                                 .norm();
        lo = std::min(lo, torso);
        hi = std::max(hi, torso);
    }
    // canonical torso is 0.45; sampled scales must fill most of [0.8, 1.2]
    CHECK(lo >= 0.45 * 0.8 - 1e-6);
    CHECK(hi <= 0.45 * 1.2 + 1e-6);
    CHECK(hi / lo > 1.4);
}

TEST_CASE("domain shift at (1.0, 0) is the identity") {
    SynthConfig cfg;
    cfg.samples_per_class = 1;
    const auto seqs = generate(cfg);
    const auto shifted = domain_shift(seqs, 1.0, 0.0);
    for (size_t i = 0; i < seqs.size(); ++i)
        CHECK(test::sequences_equal(shifted[i], seqs[i]));
}

TEST_CASE("normalization cancels a domain shift") {
    SynthConfig cfg;
    cfg.samples_per_class = 2;
    cfg.seed = 9;
    const auto seqs = generate(cfg);
    const NormalizationConfig norm;
    for (const auto& seq : seqs) {
        const SkeletonSequence a = normalize(seq, norm);
        const SkeletonSequence b =
            normalize(domain_shift(seq, 2.0, 1.5707963267948966), norm);
        for (size_t f = 0; f < a.frames.size(); ++f)
            for (size_t j = 0; j < a.frames[f].joints.size(); ++j) {
                const Vec3 d = a.frames[f].joints[j] - b.frames[f].joints[j];
                CHECK(std::abs(d.x) < 1e-6);
                CHECK(std::abs(d.y) < 1e-6);
                CHECK(std::abs(d.z) < 1e-6);
            }
    }
}

TEST_CASE("classes are separable: 1-NN on normalized windows") {
    SynthConfig train_cfg;
    train_cfg.samples_per_class = 20;
    train_cfg.seed = 100;
    SynthConfig test_cfg = train_cfg;
    test_cfg.samples_per_class = 5;
    test_cfg.seed = 200;

    const PipelineConfigSet cfgs;
    const PipelineToggles toggles{false, false, true};

    auto features = [&](const std::vector<SkeletonSequence>& seqs) {
        std::vector<std::pair<std::vector<double>, int>> out;
        for (const auto& seq : seqs) {
            const WindowTensor w = eval_window(seq, nullptr, cfgs, toggles);
            out.emplace_back(w.data, *seq.label);
        }
        return out;
    };
    const auto train_feats = features(generate(train_cfg));
    const auto test_feats = features(generate(test_cfg));

    int hits = 0;
    for (const auto& [feat, label] : test_feats) {
        double best = 1e300;
        int best_label = -1;
        for (const auto& [tf, tl] : train_feats) {
            double d = 0.0;
            for (size_t i = 0; i < feat.size(); ++i) {
                const double diff = feat[i] - tf[i];
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                best_label = tl;
            }
        }
        if (best_label == label) ++hits;
    }
    const double accuracy =
        static_cast<double>(hits) / static_cast<double>(test_feats.size());
    CHECK(accuracy >= 0.95);
}

}  // TEST_SUITE
