#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "skelact/common/error.hpp"
#include "skelact/model/checkpoint.hpp"
#include "skelact/synth/generator.hpp"
#include "skelact/train/ablation.hpp"
#include "skelact/train/metrics.hpp"
#include "skelact/train/trainer.hpp"

using namespace skelact;

namespace {

ModelConfig micro_model() {
    ModelConfig cfg;
    cfg.input_channels = 45;
    cfg.num_classes = 8;
    cfg.stem_filters = 8;
    cfg.stages = {{1, 8, 1}, {1, 12, 2}};
    cfg.kernel_size = 5;
    cfg.dropout_prob = 0.1;
    return cfg;
}

std::vector<SkeletonSequence> micro_dataset(int per_class, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.samples_per_class = per_class;
    cfg.seed = seed;
    return generate(cfg);
}

std::string checkpoint_bytes(const ParamsF& params) {
    std::ostringstream out;
    save_checkpoint(params, out);
    return out.str();
}

}  // namespace

TEST_SUITE("train_eval") {

TEST_CASE("zero training epochs leave the initial parameters") {
    TrainConfig tcfg;
    tcfg.epochs = 0;
    tcfg.seed = 3;
    const auto data = micro_dataset(2, 1);
    const TrainResult result =
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data);
    const ParamsF fresh = init_params<float>(micro_model(), 3);
    CHECK(checkpoint_bytes(result.params) == checkpoint_bytes(fresh));
    CHECK(result.history.empty());
}

TEST_CASE("training is deterministic per seed, to the checkpoint byte") {
    TrainConfig tcfg;
    tcfg.epochs = 2;
    tcfg.batch_size = 8;
    tcfg.seed = 11;
    const auto data = micro_dataset(3, 2);
    const TrainResult a =
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data);
    const TrainResult b =
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data);
    CHECK(checkpoint_bytes(a.params) == checkpoint_bytes(b.params));
    REQUIRE(a.history.size() == 2);
    CHECK(a.history[0].mean_loss == b.history[0].mean_loss);

    tcfg.seed = 12;
    const TrainResult c =
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data);
    CHECK(checkpoint_bytes(a.params) != checkpoint_bytes(c.params));
}

TEST_CASE("training rejects unlabeled or out-of-range data") {
    TrainConfig tcfg;
    tcfg.epochs = 1;
    auto data = micro_dataset(1, 3);
    data[0].label.reset();
    CHECK_THROWS_AS(
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data),
        DataError);

    auto data2 = micro_dataset(1, 3);
    data2[0].label = 99;
    CHECK_THROWS_AS(
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data2),
        DataError);

    CHECK_THROWS_AS(train(micro_model(), tcfg, PipelineConfigSet{},
                          PipelineToggles{}, {}),
                    DataError);
}

TEST_CASE("exploding training aborts with a diagnostic") {
    TrainConfig tcfg;
    tcfg.epochs = 30;
    tcfg.learning_rate = 1e18;
    tcfg.weight_decay = 0.0;
    const auto data = micro_dataset(2, 4);
    CHECK_THROWS_AS(
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data),
        RuntimeError);
}

TEST_CASE("evaluate computes exact accuracy and confusion counts") {
    // zero network predicts class 0 everywhere (tie-break)
    ParamsF params = init_params<float>(micro_model(), 1);
    for (auto& t : params.tensors)
        for (auto& v : t.data) v = 0.0f;

    auto data = micro_dataset(1, 5);  // one sample per class, labels 0..7
    const PipelineConfigSet cfgs;
    const PipelineToggles toggles{false, false, true};

    const EvalReport report = evaluate(params, data, cfgs, toggles, "unit");
    CHECK(report.accuracy == doctest::Approx(1.0 / 8.0));
    CHECK(report.total() == 8);
    for (int c = 0; c < 8; ++c)
        CHECK(report.confusion[static_cast<size_t>(c)][0] == 1);
    CHECK(report.per_class_recall[0] == doctest::Approx(1.0));
    CHECK(report.per_class_recall[1] == doctest::Approx(0.0));

    // all-label-0 dataset: accuracy 1.0, purely diagonal confusion
    std::vector<SkeletonSequence> zeros;
    for (int i = 0; i < 3; ++i) {
        zeros.push_back(data[static_cast<size_t>(i)]);
        zeros.back().label = 0;
    }
    const EvalReport perfect = evaluate(params, zeros, cfgs, toggles, "unit");
    CHECK(perfect.accuracy == doctest::Approx(1.0));
    CHECK(perfect.confusion[0][0] == 3);

    // 3 samples, 1 wrong
    zeros.back().label = 1;
    const EvalReport two_thirds = evaluate(params, zeros, cfgs, toggles, "unit");
    CHECK(two_thirds.accuracy == doctest::Approx(2.0 / 3.0));
    CHECK(two_thirds.confusion[1][0] == 1);
}

TEST_CASE("evaluate rejects labels outside K") {
    ParamsF params = init_params<float>(micro_model(), 1);
    auto data = micro_dataset(1, 6);
    data[0].label = 8;
    CHECK_THROWS_AS(evaluate(params, data, PipelineConfigSet{},
                             PipelineToggles{}, "unit"),
                    DataError);
}

TEST_CASE("evaluation is side-effect free and ignores train-only toggles") {
    ParamsF params = init_params<float>(micro_model(), 7);
    const auto data = micro_dataset(2, 7);
    const PipelineConfigSet cfgs;

    const EvalReport a =
        evaluate(params, data, cfgs, {true, true, true}, "unit");
    const EvalReport b =
        evaluate(params, data, cfgs, {false, false, true}, "unit");
    const EvalReport c =
        evaluate(params, data, cfgs, {false, false, true}, "unit");
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.confusion == b.confusion);
    CHECK(b.accuracy == c.accuracy);
    CHECK(b.confusion == c.confusion);
    CHECK(b.total() == static_cast<std::int64_t>(data.size()));
}

TEST_CASE("the ablation grid is the canonical eight rows in order") {
    const auto grid = ablation_grid();
    REQUIRE(grid.size() == 8);
    const std::vector<std::string> expected = {
        "Baseline",
        "Baseline + noise",
        "Baseline + augmentation",
        "Baseline + augmentation + noise",
        "Baseline + normalization",
        "Baseline + normalization + noise",
        "Baseline + normalization + augmentation",
        "Baseline + normalization + augmentation + noise",
    };
    for (size_t i = 0; i < 8; ++i) {
        CHECK(grid[i].label == expected[i]);
        const bool norm = i >= 4;
        const bool aug = (i % 4) >= 2;
        const bool noise = (i % 2) == 1;
        CHECK(grid[i].toggles.normalization == norm);
        CHECK(grid[i].toggles.augmentation == aug);
        CHECK(grid[i].toggles.noise == noise);
    }
    // baseline first, everything on last
    CHECK_FALSE(grid.front().toggles.normalization);
    CHECK(grid.back().toggles.normalization);
    CHECK(grid.back().toggles.augmentation);
    CHECK(grid.back().toggles.noise);
}

TEST_CASE("a micro ablation produces the full table and csv") {
    ModelConfig mcfg = micro_model();
    mcfg.stem_filters = 4;
    mcfg.stages = {{1, 4, 1}};
    TrainConfig tcfg;
    tcfg.epochs = 1;
    tcfg.batch_size = 8;
    tcfg.seed = 5;

    const auto train_set = micro_dataset(2, 8);
    const auto test_set = micro_dataset(1, 9);
    const auto shifted = domain_shift(test_set, 1.5, 1.0);

    const auto results = run_ablation(mcfg, tcfg, PipelineConfigSet{}, train_set,
                                      test_set, shifted);
    REQUIRE(results.size() == 8);
    for (const auto& r : results) {
        CHECK(r.acc_in_domain >= 0.0);
        CHECK(r.acc_in_domain <= 1.0);
        CHECK(r.acc_shifted >= 0.0);
        CHECK(r.acc_shifted <= 1.0);
    }

    const std::string csv = ablation_csv(results);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line ==
          "config,noise,augmentation,normalization,acc_in_domain,acc_shifted");
    size_t rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.find(ablation_grid()[rows].label + ",") == 0);
        ++rows;
    }
    CHECK(rows == 8);

    const std::string table = ablation_table(results);
    CHECK(table.find("Baseline + normalization + augmentation + noise") !=
          std::string::npos);
    // paper reference annotations are embedded in the text table
    CHECK(table.find("20.98%") != std::string::npos);
    CHECK(table.find("49.38%") != std::string::npos);
}

TEST_CASE("history records one row per epoch with the lr in effect") {
    TrainConfig tcfg;
    tcfg.epochs = 3;
    tcfg.batch_size = 16;
    tcfg.seed = 6;
    tcfg.lr_decay_milestones = {2};
    const auto data = micro_dataset(2, 10);
    const TrainResult result =
        train(micro_model(), tcfg, PipelineConfigSet{}, PipelineToggles{}, data);
    REQUIRE(result.history.size() == 3);
    CHECK(result.history[0].learning_rate == doctest::Approx(0.01));
    CHECK(result.history[2].learning_rate == doctest::Approx(0.001));
    for (const auto& row : result.history) {
        CHECK(row.mean_loss > 0.0);
        CHECK(row.train_accuracy >= 0.0);
        CHECK(row.train_accuracy <= 1.0);
    }
}

}  // TEST_SUITE
