#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "skelact/common/error.hpp"
#include "skelact/model/checkpoint.hpp"
#include "skelact/model/net.hpp"
#include "skelact/window/window.hpp"

using namespace skelact;

namespace {

// Tiny configuration exercising every layer type: stride-1 identity block,
// stride-2 projection block, BN, dropout, masked pooling, affine head.
ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.input_channels = 6;
    cfg.num_classes = 3;
    cfg.stem_filters = 4;
    cfg.stages = {{1, 4, 1}, {1, 6, 2}};
    cfg.kernel_size = 3;
    cfg.dropout_prob = 0.3;
    return cfg;
}

// T=8, D=6 window with deterministic contents; optionally only `real`
// frames with a ZERO-padded masked tail.
WindowTensor tiny_window(int real_frames, std::uint64_t salt) {
    WindowTensor w;
    w.t_steps = 8;
    w.dims = 6;
    w.joints = 2;
    w.data.assign(8 * 6, 0.0);
    w.mask.assign(8 * 2, 0);
    Rng rng(salt);
    for (int t = 0; t < real_frames; ++t) {
        for (int d = 0; d < 6; ++d) w.at(t, d) = rng.uniform(-1.0, 1.0);
        w.mask[static_cast<size_t>(t) * 2 + 0] = 1;
        w.mask[static_cast<size_t>(t) * 2 + 1] = 1;
    }
    return w;
}

template <typename S>
void zero_all(Params<S>& p) {
    for (auto& t : p.tensors)
        for (auto& v : t.data) v = S(0);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("all-zero parameters give uniform softmax") {
    ParamsF params = init_params<float>(tiny_config(), 1);
    zero_all(params);
    const WindowTensor w = tiny_window(8, 3);
    const Prediction pred = predict(params, w);
    CHECK(pred.class_id == 0);  // tie breaks to the lowest id
    for (const double p : pred.probabilities)
        CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("logits have K entries and EVAL is bit-deterministic") {
    ModelConfig cfg;
    cfg.input_channels = 45;
    cfg.num_classes = 8;
    ParamsF params = init_params<float>(cfg, 5);
    const WindowTensor w = pack(test::make_test_sequence(90), WindowConfig{});
    const auto a = eval_forward(params, w);
    const auto b = eval_forward(params, w);
    CHECK(a.size() == 8);
    CHECK(a == b);
}

TEST_CASE("forward rejects a window with the wrong D") {
    ParamsF params = init_params<float>(tiny_config(), 1);
    WindowTensor w = tiny_window(8, 1);
    w.dims = 9;
    w.data.assign(8 * 9, 0.0);
    try {
        eval_forward(params, w);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("9") != std::string::npos);
        CHECK(msg.find("6") != std::string::npos);
    }
}

TEST_CASE("cross entropy of uniform logits is ln K") {
    // zero network, K=3: loss = ln 3 exactly (weight decay 0)
    ParamsD params = init_params<double>(tiny_config(), 1);
    zero_all(params);
    const WindowTensor w = tiny_window(8, 7);
    Rng rng(1);
    const auto result =
        loss_and_grads(params, {{&w, 0}}, 0.0, rng);
    CHECK(result.loss == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("a duplicated batch entry leaves the mean loss unchanged") {
    ModelConfig cfg = tiny_config();
    cfg.dropout_prob = 0.0;  // dropout draws differ per entry
    ParamsD params_a = init_params<double>(cfg, 3);
    ParamsD params_b = params_a;
    const WindowTensor w = tiny_window(8, 11);
    Rng rng_a(1), rng_b(1);
    const auto single = loss_and_grads(params_a, {{&w, 1}}, 0.0, rng_a);
    const auto doubled = loss_and_grads(params_b, {{&w, 1}, {&w, 1}}, 0.0, rng_b);
    CHECK(single.loss == doctest::Approx(doubled.loss).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
    // The acceptance suite runs the full check; this is a faster smoke pass
    // over a subset of each tensor.
    ModelConfig cfg = tiny_config();
    ParamsD params = init_params<double>(cfg, 17);
    const WindowTensor w0 = tiny_window(8, 21);
    const WindowTensor w1 = tiny_window(5, 22);  // masked ZERO tail
    const std::vector<Example> batch = {{&w0, 0}, {&w1, 2}};
    const double wd = 0.01;

    auto loss_at = [&]() {
        ParamsD scratch = params;
        Rng rng(77);  // same dropout masks every evaluation
        return loss_and_grads(scratch, batch, wd, rng).loss;
    };

    ParamsD scratch = params;
    Rng rng(77);
    const auto analytic = loss_and_grads(scratch, batch, wd, rng);

    double worst = 0.0;
    for (size_t ti = 0; ti < params.tensors.size(); ++ti) {
        if (!params.tensors[ti].trainable) continue;
        const size_t n = params.tensors[ti].data.size();
        const size_t stride = std::max<size_t>(1, n / 7);  // sample across it
        for (size_t j = 0; j < n; j += stride) {
            const double orig = params.tensors[ti].data[j];
            const double h = 1e-5 * std::max(1.0, std::abs(orig));
            params.tensors[ti].data[j] = orig + h;
            const double up = loss_at();
            params.tensors[ti].data[j] = orig - h;
            const double down = loss_at();
            params.tensors[ti].data[j] = orig;
            const double fd = (up - down) / (2.0 * h);
            const double an = analytic.grads.g[ti][j];
            const double rel =
                std::abs(an - fd) / std::max({1.0, std::abs(an), std::abs(fd)});
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("pooled features equal an independent masked mean of act_f") {
    ModelConfig cfg = tiny_config();
    ParamsF params = init_params<float>(cfg, 23);
    const WindowTensor w = tiny_window(4, 31);  // half the steps masked

    detail::BatchCache<float> cache;
    detail::stage_batch(params, {{&w, 0}}, cache);
    detail::forward_batch(params, cache, Mode::EVAL, nullptr);

    const int t_final = cache.t_final;
    const int channels = params.plan.last_channels;
    int count = 0;
    for (int t = 0; t < t_final; ++t) count += cache.final_valid[static_cast<size_t>(t)];
    CHECK(count > 0);
    CHECK(count < t_final);  // the ZERO tail must be excluded
    for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int t = 0; t < t_final; ++t)
            if (cache.final_valid[static_cast<size_t>(t)])
                acc += cache.act_f[static_cast<size_t>(c) * t_final + t];
        CHECK(cache.pooled[static_cast<size_t>(c)] ==
              doctest::Approx(acc / count).epsilon(1e-5));
    }
}

TEST_CASE("sgd leaves parameters alone on zero gradients") {
    ParamsF params = init_params<float>(tiny_config(), 2);
    const ParamsF before = params;
    Grads<float> grads = make_grads(params);
    TrainConfig cfg;
    SgdState<float> state = SgdState<float>::make(params);
    sgd_step(params, grads, cfg, state);
    for (size_t i = 0; i < params.tensors.size(); ++i)
        CHECK(params.tensors[i].data == before.tensors[i].data);
}

TEST_CASE("sgd closed forms: lr 0.1 step and momentum unroll") {
    // f(w) = w^2/2, grad = w; one step from w=1 at lr 0.1, momentum 0 -> 0.9
    ParamsF params = init_params<float>(tiny_config(), 2);
    for (auto& t : params.tensors)
        if (t.trainable)
            for (auto& v : t.data) v = 1.0f;
    Grads<float> grads = make_grads(params);
    for (size_t i = 0; i < grads.g.size(); ++i)
        for (auto& v : grads.g[i]) v = 1.0f;

    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.momentum = 0.0;
    SgdState<float> state = SgdState<float>::make(params);
    sgd_step(params, grads, cfg, state);
    for (const auto& t : params.tensors)
        if (t.trainable)
            for (const auto& v : t.data) CHECK(v == doctest::Approx(0.9f));

    // momentum 0.9, two identical unit gradients: second update is 1.9*lr
    cfg.momentum = 0.9;
    ParamsF p2 = init_params<float>(tiny_config(), 2);
    for (auto& t : p2.tensors)
        if (t.trainable)
            for (auto& v : t.data) v = 1.0f;
    SgdState<float> st2 = SgdState<float>::make(p2);
    sgd_step(p2, grads, cfg, st2);
    const float after_one = p2.tensors[0].data[0];
    CHECK(after_one == doctest::Approx(0.9f));
    sgd_step(p2, grads, cfg, st2);
    CHECK(after_one - p2.tensors[0].data[0] == doctest::Approx(0.19f));
}

TEST_CASE("learning rate decays at configured milestones") {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.lr_decay_milestones = {10, 20};
    CHECK(cfg.lr_at_epoch(0) == doctest::Approx(0.01));
    CHECK(cfg.lr_at_epoch(9) == doctest::Approx(0.01));
    CHECK(cfg.lr_at_epoch(10) == doctest::Approx(0.001));
    CHECK(cfg.lr_at_epoch(25) == doctest::Approx(0.0001));
}

TEST_CASE("softmax probabilities are normalized and shift invariant") {
    const std::vector<double> logits = {1.0, -0.5, 2.5, 0.0};
    const auto p = softmax(logits);
    double sum = 0.0;
    for (const double v : p) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);

    std::vector<double> shifted = logits;
    for (double& v : shifted) v += 100.0;
    const auto q = softmax(shifted);
    for (size_t i = 0; i < p.size(); ++i)
        CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-12));
}

TEST_CASE("non-finite loss raises an error naming a layer") {
    ParamsF params = init_params<float>(tiny_config(), 3);
    // saturate the stem so its accumulator overflows to inf
    for (auto& v : params.tensors[static_cast<size_t>(params.plan.stem.w)].data)
        v = std::numeric_limits<float>::max();
    WindowTensor w = tiny_window(8, 41);
    for (auto& v : w.data) v = 1.0;
    Rng rng(1);
    try {
        loss_and_grads(params, {{&w, 0}}, 0.0, rng);
        FAIL("expected RuntimeError");
    } catch (const RuntimeError& e) {
        CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    }
}

TEST_CASE("default configuration stays under 2.5M parameters") {
    ModelConfig cfg;  // defaults: D=45, K=19, stem 64, 64/128/256
    ParamsF params = init_params<float>(cfg, 0);
    CHECK(params.trainable_count() < 2500000);
    CHECK(params.trainable_count() > 1000000);  // sanity: it is a real net
}

TEST_CASE("parameter budget invariant rejects huge configurations") {
    ModelConfig cfg;
    cfg.stages = {{2, 64, 1}, {2, 128, 2}, {2, 256, 2}, {2, 512, 2}, {4, 1024, 2}};
    CHECK_THROWS_AS(init_params<float>(cfg, 0), ConfigError);
}

TEST_CASE("checkpoints round trip bit-exactly") {
    ModelConfig cfg = tiny_config();
    ParamsF params = init_params<float>(cfg, 9);
    std::ostringstream out;
    save_checkpoint(params, out);

    std::istringstream in(out.str());
    const ParamsF loaded = load_checkpoint(in);
    REQUIRE(loaded.tensors.size() == params.tensors.size());
    for (size_t i = 0; i < params.tensors.size(); ++i) {
        CHECK(loaded.tensors[i].name == params.tensors[i].name);
        CHECK(loaded.tensors[i].data == params.tensors[i].data);
    }

    // corrupt cases
    std::istringstream bad_magic("XXXXXX garbage");
    CHECK_THROWS_AS(load_checkpoint(bad_magic), DataError);
    std::istringstream truncated(out.str().substr(0, out.str().size() / 2));
    CHECK_THROWS_AS(load_checkpoint(truncated), DataError);
}

TEST_CASE("train-mode forward consumes the rng only when dropout is on") {
    ModelConfig cfg = tiny_config();
    ParamsF params = init_params<float>(cfg, 4);
    const WindowTensor w = tiny_window(8, 51);
    Rng rng(5);
    const auto with_dropout = forward(params, w, Mode::TRAIN, &rng);
    CHECK(with_dropout.size() == 3);
    CHECK_THROWS_AS(forward(params, w, Mode::TRAIN, nullptr), RuntimeError);

    cfg.dropout_prob = 0.0;
    ParamsF p2 = init_params<float>(cfg, 4);
    const auto no_rng = forward(p2, w, Mode::TRAIN, nullptr);
    CHECK(no_rng.size() == 3);
}

}  // TEST_SUITE
