#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "skelact/augment/augment.hpp"
#include "skelact/common/error.hpp"
#include "skelact/window/window.hpp"

using namespace skelact;
using test::make_test_sequence;
using test::sequences_equal;

namespace {

WindowTensor make_window(int frames) {
    WindowConfig cfg;
    cfg.window_seconds = frames / 30.0;
    cfg.hop_seconds = std::min(cfg.window_seconds, 1.0);
    return pack(make_test_sequence(frames), cfg);
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("zero sigma leaves the window untouched") {
    const WindowTensor w = make_window(30);
    Rng rng(1);
    const WindowTensor out = add_noise(w, 0.0, rng);
    CHECK(out.data == w.data);
}

TEST_CASE("negative sigma is a config error") {
    const WindowTensor w = make_window(3);
    Rng rng(1);
    CHECK_THROWS_AS(add_noise(w, -0.1, rng), ConfigError);
    AugmentConfig cfg;
    cfg.noise_sigma = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("noise is deterministic per seed") {
    const WindowTensor w = make_window(30);
    Rng a(42), b(42), c(43);
    const WindowTensor out_a = add_noise(w, 0.01, a);
    const WindowTensor out_b = add_noise(w, 0.01, b);
    const WindowTensor out_c = add_noise(w, 0.01, c);
    CHECK(out_a.data == out_b.data);
    CHECK(out_a.data != out_c.data);
}

TEST_CASE("noise never touches masked entries") {
    WindowTensor w = make_window(10);
    // invalidate joint 4 everywhere
    for (int t = 0; t < w.t_steps; ++t) {
        w.mask[static_cast<size_t>(t) * w.joints + 4] = 0;
        for (int k = 0; k < 3; ++k) w.at(t, 3 * 4 + k) = 0.0;
    }
    Rng rng(7);
    const WindowTensor out = add_noise(w, 0.05, rng);
    for (int t = 0; t < w.t_steps; ++t)
        for (int k = 0; k < 3; ++k) CHECK(out.at(t, 3 * 4 + k) == 0.0);
}

TEST_CASE("pooled noise statistics match the configured sigma") {
    const double sigma = 0.01;
    const WindowTensor w = make_window(60);
    std::vector<double> deltas;
    Rng rng(99);
    while (deltas.size() < 30000) {
        const WindowTensor out = add_noise(w, sigma, rng);
        for (size_t i = 0; i < w.data.size(); ++i)
            deltas.push_back(out.data[i] - w.data[i]);
    }
    double mean = 0.0;
    for (const double d : deltas) mean += d;
    mean /= static_cast<double>(deltas.size());
    double var = 0.0;
    for (const double d : deltas) var += (d - mean) * (d - mean);
    var /= static_cast<double>(deltas.size());
    CHECK(std::abs(mean) < 1e-3);
    CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.05));
}

TEST_CASE("circular shift by +2 matches the hand-traced layout") {
    // [a,b,c,d,e] with k=+2 -> [d,e,a,b,c]
    const SkeletonSequence seq = make_test_sequence(5);
    const SkeletonSequence out = circular_shift(seq, 2);
    for (int i = 0; i < 5; ++i) {
        const int src = (i - 2 + 5) % 5;
        CHECK(out.frames[static_cast<size_t>(i)].joints ==
              seq.frames[static_cast<size_t>(src)].joints);
        CHECK(out.frames[static_cast<size_t>(i)].t ==
              seq.frames[static_cast<size_t>(i)].t);
    }
}

TEST_CASE("temporal shift with shift_max 0 is the identity") {
    const SkeletonSequence seq = make_test_sequence(5);
    Rng rng(1);
    const SkeletonSequence out = temporal_shift(seq, 0, rng);
    CHECK(sequences_equal(out, seq));
}

TEST_CASE("temporal shift preserves the frame multiset") {
    const SkeletonSequence seq = make_test_sequence(17);
    auto joint_sums = [](const SkeletonSequence& s) {
        std::vector<double> sums;
        for (const auto& f : s.frames) {
            double acc = 0.0;
            for (const auto& p : f.joints) acc += p.x + p.y + p.z;
            sums.push_back(acc);
        }
        std::sort(sums.begin(), sums.end());
        return sums;
    };
    Rng rng(5);
    for (int round = 0; round < 20; ++round) {
        const SkeletonSequence out = temporal_shift(seq, 16, rng);
        CHECK(out.frame_count() == seq.frame_count());
        CHECK(joint_sums(out) == joint_sums(seq));
    }
}

TEST_CASE("shift_max larger than the sequence is clamped") {
    const SkeletonSequence seq = make_test_sequence(3);
    Rng rng(4);
    const SkeletonSequence out = temporal_shift(seq, 1000, rng);
    CHECK(out.frame_count() == 3);
}

TEST_CASE("crop keeps [2..8] of 10 and repeat-pads from the crop start") {
    const SkeletonSequence seq = make_test_sequence(10);
    const SkeletonSequence out = crop_and_pad(seq, 2, 7);
    const int expected_src[10] = {2, 3, 4, 5, 6, 7, 8, 2, 3, 4};
    for (int i = 0; i < 10; ++i) {
        CHECK(out.frames[static_cast<size_t>(i)].joints ==
              seq.frames[static_cast<size_t>(expected_src[i])].joints);
        CHECK(out.frames[static_cast<size_t>(i)].t ==
              seq.frames[static_cast<size_t>(i)].t);
    }
}

TEST_CASE("random crop at ratio 1 with no dropout is the identity") {
    const SkeletonSequence seq = make_test_sequence(12);
    Rng rng(8);
    const SkeletonSequence out = random_crop(seq, 1.0, 0.0, rng);
    CHECK(sequences_equal(out, seq));
}

TEST_CASE("dropout probability 1 is rejected by the config invariant") {
    AugmentConfig cfg;
    cfg.joint_dropout_prob = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    const SkeletonSequence seq = make_test_sequence(4);
    Rng rng(1);
    CHECK_THROWS_AS(random_crop(seq, 1.0, 1.0, rng), ConfigError);
}

TEST_CASE("joint dropout invalidates and zeroes") {
    const SkeletonSequence seq = make_test_sequence(40);
    Rng rng(13);
    const SkeletonSequence out = random_crop(seq, 1.0, 0.3, rng);
    size_t dropped = 0;
    for (const auto& f : out.frames)
        for (int j = 0; j < f.joint_count(); ++j)
            if (!f.is_valid(j)) {
                ++dropped;
                CHECK(f.joints[static_cast<size_t>(j)] == Vec3{});
            }
    // 40 frames x 15 joints at p=0.3: expect roughly 180, loosely bounded
    CHECK(dropped > 80);
    CHECK(dropped < 300);
}

TEST_CASE("composite augmenter at degenerate parameters is the identity") {
    AugmentConfig cfg;
    cfg.noise_sigma = 0.0;
    cfg.shift_max = 0;
    cfg.crop_min_ratio = 1.0;
    cfg.joint_dropout_prob = 0.0;
    const SkeletonSequence seq = make_test_sequence(20);
    Rng rng(3);
    const SkeletonSequence out = augment_sequence(seq, cfg, rng);
    CHECK(sequences_equal(out, seq));

    WindowConfig wcfg;
    const WindowTensor w = pack(seq, wcfg);
    Rng rng2(3);
    const WindowTensor nw = add_noise(w, cfg.noise_sigma, rng2);
    CHECK(nw.data == w.data);
}

TEST_CASE("augmentation preserves label, fps, joint set and length") {
    SkeletonSequence seq = make_test_sequence(33);
    seq.label = 4;
    AugmentConfig cfg;
    cfg.shift_max = 8;
    cfg.crop_min_ratio = 0.7;
    cfg.joint_dropout_prob = 0.1;
    Rng rng(17);
    for (int round = 0; round < 10; ++round) {
        const SkeletonSequence out = augment_sequence(seq, cfg, rng);
        CHECK(out.label == seq.label);
        CHECK(out.fps == seq.fps);
        CHECK(*out.joint_set == *seq.joint_set);
        CHECK(out.frame_count() == seq.frame_count());
        out.validate();
    }
}

TEST_CASE("augmentation is a pure function of input, config and seed") {
    const SkeletonSequence seq = make_test_sequence(25);
    AugmentConfig cfg;
    cfg.shift_max = 6;
    cfg.crop_min_ratio = 0.8;
    cfg.joint_dropout_prob = 0.05;
    Rng a(123), b(123);
    const SkeletonSequence out_a = augment_sequence(seq, cfg, a);
    const SkeletonSequence out_b = augment_sequence(seq, cfg, b);
    CHECK(sequences_equal(out_a, out_b));
    for (size_t f = 0; f < out_a.frames.size(); ++f)
        CHECK(out_a.frames[f].valid == out_b.frames[f].valid);
}

}  // TEST_SUITE
