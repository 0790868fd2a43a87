#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "skelact/common/error.hpp"
#include "skelact/common/parallel.hpp"
#include "skelact/common/rng.hpp"
#include "skelact/model/model_config.hpp"
#include "skelact/window/window.hpp"

namespace skelact {

enum class Mode { TRAIN, EVAL };

// One named parameter tensor. Running BN moments are stored here too but are
// not trainable; weight decay applies only where decay is set.
template <typename S>
struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<S> data;
    bool trainable = true;
    bool decay = false;

    std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
};

namespace plan {

struct ConvRef {
    int w = -1;  // tensor index
    int in_ch = 0, out_ch = 0, kernel = 1, stride = 1, pad_left = 0;
};

struct BnRef {
    int gamma = -1, beta = -1, mean = -1, var = -1;
    int channels = 0;
};

struct BlockRef {
    BnRef bn1;
    ConvRef conv1;
    BnRef bn2;
    ConvRef conv2;
    bool has_proj = false;
    ConvRef proj;
    int stage = 0, block = 0;
};

// Tensor indices and layer wiring derived from a ModelConfig.
struct Plan {
    ConvRef stem;
    std::vector<BlockRef> blocks;
    BnRef final_bn;
    int fc_w = -1, fc_b = -1;
    int last_channels = 0;
};

inline int conv_out_len(int t_in, int stride) {
    // total padding kernel-1, so stride 1 preserves length
    return (t_in - 1) / stride + 1;
}

}  // namespace plan

// All trainable tensors plus BN running moments, with their wiring.
template <typename S>
struct Params {
    ModelConfig cfg;
    plan::Plan plan;
    std::vector<Tensor<S>> tensors;

    std::int64_t trainable_count() const {
        std::int64_t n = 0;
        for (const auto& t : tensors)
            if (t.trainable) n += t.size();
        return n;
    }
    std::int64_t total_count() const {
        std::int64_t n = 0;
        for (const auto& t : tensors) n += t.size();
        return n;
    }
};

// Gradients aligned with Params::tensors; empty vectors for non-trainables.
template <typename S>
struct Grads {
    std::vector<std::vector<S>> g;

    void accumulate_scaled(const Grads<S>& other, S factor) {
        for (size_t i = 0; i < g.size(); ++i)
            for (size_t j = 0; j < g[i].size(); ++j)
                g[i][j] += factor * other.g[i][j];
    }
};

struct Example {
    const WindowTensor* window = nullptr;
    int label = -1;
};

struct Prediction {
    int class_id = 0;
    std::vector<double> probabilities;
};

// ---------------------------------------------------------------------------
// kernels

namespace detail {

template <typename S>
void conv1d_forward(const S* x, int batch, int c_in, int t_in, const S* w,
                    int c_out, int kernel, int stride, int pad_left, S* y,
                    int t_out) {
    // Parallel over (sample, output channel) pairs so single-window forwards
    // still use the pool; each task owns one output row.
    parallel_for(static_cast<size_t>(batch) * c_out, [&](size_t task) {
        const size_t b = task / static_cast<size_t>(c_out);
        const int co = static_cast<int>(task % static_cast<size_t>(c_out));
        S* yr = y + (b * static_cast<size_t>(c_out) + co) * t_out;
        std::fill(yr, yr + t_out, S(0));
        for (int ci = 0; ci < c_in; ++ci) {
            const S* xr = x + (b * static_cast<size_t>(c_in) + ci) * t_in;
            const S* wr = w + (static_cast<size_t>(co) * c_in + ci) * kernel;
            for (int k = 0; k < kernel; ++k) {
                const S wv = wr[k];
                const int off = k - pad_left;
                // valid t: 0 <= t*stride + off < t_in
                int t_lo = off < 0 ? (-off + stride - 1) / stride : 0;
                int t_hi = (t_in - 1 - off) / stride + 1;
                t_hi = std::min(t_hi, t_out);
                if (stride == 1) {
                    const S* xs = xr + off;
                    for (int t = t_lo; t < t_hi; ++t) yr[t] += wv * xs[t];
                } else {
                    for (int t = t_lo; t < t_hi; ++t)
                        yr[t] += wv * xr[t * stride + off];
                }
            }
        }
    });
}

template <typename S>
void conv1d_backward_data(const S* dy, int batch, int c_in, int t_in, const S* w,
                          int c_out, int kernel, int stride, int pad_left, S* dx,
                          int t_out) {
    parallel_for(static_cast<size_t>(batch), [&](size_t b) {
        S* dxb = dx + b * static_cast<size_t>(c_in) * t_in;
        std::fill(dxb, dxb + static_cast<size_t>(c_in) * t_in, S(0));
        for (int co = 0; co < c_out; ++co) {
            const S* dyr = dy + (b * static_cast<size_t>(c_out) + co) * t_out;
            for (int ci = 0; ci < c_in; ++ci) {
                S* dxr = dxb + static_cast<size_t>(ci) * t_in;
                const S* wr = w + (static_cast<size_t>(co) * c_in + ci) * kernel;
                for (int k = 0; k < kernel; ++k) {
                    const S wv = wr[k];
                    const int off = k - pad_left;
                    int t_lo = off < 0 ? (-off + stride - 1) / stride : 0;
                    int t_hi = (t_in - 1 - off) / stride + 1;
                    t_hi = std::min(t_hi, t_out);
                    if (stride == 1) {
                        S* dxs = dxr + off;
                        for (int t = t_lo; t < t_hi; ++t) dxs[t] += wv * dyr[t];
                    } else {
                        for (int t = t_lo; t < t_hi; ++t)
                            dxr[t * stride + off] += wv * dyr[t];
                    }
                }
            }
        }
    });
}

template <typename S>
void conv1d_backward_weights(const S* x, const S* dy, int batch, int c_in,
                             int t_in, int c_out, int kernel, int stride,
                             int pad_left, S* dw, int t_out) {
    // dw is pre-zeroed by the caller. Parallel over output channels so each
    // task owns a disjoint dw slice.
    parallel_for(static_cast<size_t>(c_out), [&](size_t co) {
        S* dw_c = dw + co * static_cast<size_t>(c_in) * kernel;
        for (int b = 0; b < batch; ++b) {
            const S* dyr = dy + (static_cast<size_t>(b) * c_out + co) * t_out;
            for (int ci = 0; ci < c_in; ++ci) {
                const S* xr = x + (static_cast<size_t>(b) * c_in + ci) * t_in;
                S* dwr = dw_c + static_cast<size_t>(ci) * kernel;
                for (int t = 0; t < t_out; ++t) {
                    const S g = dyr[t];
                    if (g == S(0)) continue;
                    const int base = t * stride - pad_left;
                    const int k_lo = base < 0 ? -base : 0;
                    const int k_hi = std::min(kernel, t_in - base);
                    const S* xs = xr + base;
                    for (int k = k_lo; k < k_hi; ++k) dwr[k] += g * xs[k];
                }
            }
        }
    });
}

// Batch norm over (batch, time) per channel. Saved stats are kept in double
// for the backward pass regardless of S.
template <typename S>
void bn_forward_train(const S* x, int batch, int channels, int t_len,
                      const S* gamma, const S* beta, S* y, S* xhat,
                      double* save_mean, double* save_invstd, S* running_mean,
                      S* running_var) {
    const double n = static_cast<double>(batch) * t_len;
    parallel_for(static_cast<size_t>(channels), [&](size_t c) {
        double sum = 0.0, sum_sq = 0.0;
        for (int b = 0; b < batch; ++b) {
            const S* xr = x + (static_cast<size_t>(b) * channels + c) * t_len;
            for (int t = 0; t < t_len; ++t) {
                const double v = static_cast<double>(xr[t]);
                sum += v;
                sum_sq += v * v;
            }
        }
        const double mean = sum / n;
        const double var = std::max(0.0, sum_sq / n - mean * mean);
        const double invstd = 1.0 / std::sqrt(var + kBnEpsilon);
        save_mean[c] = mean;
        save_invstd[c] = invstd;
        running_mean[c] = static_cast<S>(kBnMomentum * running_mean[c] +
                                         (1.0 - kBnMomentum) * mean);
        running_var[c] = static_cast<S>(kBnMomentum * running_var[c] +
                                        (1.0 - kBnMomentum) * var);
        const S g = gamma[c], bt = beta[c];
        for (int b = 0; b < batch; ++b) {
            const size_t row = (static_cast<size_t>(b) * channels + c) * t_len;
            for (int t = 0; t < t_len; ++t) {
                const S xh = static_cast<S>((x[row + t] - mean) * invstd);
                xhat[row + t] = xh;
                y[row + t] = g * xh + bt;
            }
        }
    });
}

template <typename S>
void bn_forward_eval(const S* x, int batch, int channels, int t_len,
                     const S* gamma, const S* beta, const S* running_mean,
                     const S* running_var, S* y) {
    parallel_for(static_cast<size_t>(channels), [&](size_t c) {
        const double invstd =
            1.0 / std::sqrt(static_cast<double>(running_var[c]) + kBnEpsilon);
        const double mean = running_mean[c];
        const S g = gamma[c], bt = beta[c];
        for (int b = 0; b < batch; ++b) {
            const size_t row = (static_cast<size_t>(b) * channels + c) * t_len;
            for (int t = 0; t < t_len; ++t)
                y[row + t] = static_cast<S>(g * ((x[row + t] - mean) * invstd) + bt);
        }
    });
}

template <typename S>
void bn_backward(const S* xhat, const S* dy, int batch, int channels, int t_len,
                 const S* gamma, const double* save_invstd, S* dx, S* dgamma,
                 S* dbeta) {
    const double n = static_cast<double>(batch) * t_len;
    parallel_for(static_cast<size_t>(channels), [&](size_t c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int b = 0; b < batch; ++b) {
            const size_t row = (static_cast<size_t>(b) * channels + c) * t_len;
            for (int t = 0; t < t_len; ++t) {
                const double d = dy[row + t];
                sum_dy += d;
                sum_dy_xhat += d * static_cast<double>(xhat[row + t]);
            }
        }
        dgamma[c] = static_cast<S>(sum_dy_xhat);
        dbeta[c] = static_cast<S>(sum_dy);
        const double scale = static_cast<double>(gamma[c]) * save_invstd[c];
        for (int b = 0; b < batch; ++b) {
            const size_t row = (static_cast<size_t>(b) * channels + c) * t_len;
            for (int t = 0; t < t_len; ++t) {
                const double d = dy[row + t];
                const double xh = xhat[row + t];
                dx[row + t] = static_cast<S>(
                    scale * (d - sum_dy / n - xh * sum_dy_xhat / n));
            }
        }
    });
}

template <typename S>
void relu_inplace(S* x, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (x[i] < S(0)) x[i] = S(0);
}

// d *= (a > 0), where a is the post-ReLU activation.
template <typename S>
void relu_backward_inplace(const S* a, S* d, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (a[i] <= S(0)) d[i] = S(0);
}

// Inverted dropout; the mask is drawn serially so results are independent of
// the worker count.
template <typename S>
void dropout_forward_inplace(S* x, size_t n, double prob, Rng& rng,
                             std::uint8_t* mask) {
    const S scale = static_cast<S>(1.0 / (1.0 - prob));
    for (size_t i = 0; i < n; ++i) {
        if (rng.uniform01() < prob) {
            mask[i] = 0;
            x[i] = S(0);
        } else {
            mask[i] = 1;
            x[i] *= scale;
        }
    }
}

template <typename S>
void dropout_backward_inplace(S* d, const std::uint8_t* mask, size_t n,
                              double prob) {
    const S scale = static_cast<S>(1.0 / (1.0 - prob));
    for (size_t i = 0; i < n; ++i) d[i] = mask[i] ? d[i] * scale : S(0);
}

// Step validity at the pooling layer. Final step t covers the input
// interval [t*S, (t+1)*S) at total stride S and counts as real when that
// interval contains a real input step. Receptive-field overlap is ignored
// deliberately: zero-padded tails must stay excluded from pooling no matter
// how deep the network is.
inline std::vector<std::uint8_t> final_step_validity(
    const std::vector<std::uint8_t>& input_valid, int total_stride, int t_final) {
    std::vector<std::uint8_t> out(static_cast<size_t>(t_final), 0);
    const int t_in = static_cast<int>(input_valid.size());
    for (int t = 0; t < t_final; ++t) {
        const int lo = t * total_stride;
        const int hi = std::min(t_in, lo + total_stride);
        for (int i = lo; i < hi; ++i) {
            if (input_valid[static_cast<size_t>(i)]) {
                out[static_cast<size_t>(t)] = 1;
                break;
            }
        }
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// parameter construction

template <typename S>
Params<S> init_params(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Params<S> p;
    p.cfg = cfg;
    Rng rng = Rng::derive(seed, 0x70617261);

    auto add_conv = [&](const std::string& name, int out_ch, int in_ch,
                        int kernel) {
        Tensor<S> t;
        t.name = name;
        t.shape = {out_ch, in_ch, kernel};
        t.trainable = true;
        t.decay = true;
        const double std_dev = std::sqrt(2.0 / (in_ch * kernel));
        t.data.resize(static_cast<size_t>(out_ch) * in_ch * kernel);
        for (auto& v : t.data) v = static_cast<S>(rng.gaussian(0.0, std_dev));
        p.tensors.push_back(std::move(t));
        return static_cast<int>(p.tensors.size() - 1);
    };
    auto add_bn = [&](const std::string& name, int channels) {
        plan::BnRef ref;
        ref.channels = channels;
        auto push = [&](const char* suffix, S value, bool trainable) {
            Tensor<S> t;
            t.name = name + "." + suffix;
            t.shape = {channels};
            t.trainable = trainable;
            t.decay = false;
            t.data.assign(static_cast<size_t>(channels), value);
            p.tensors.push_back(std::move(t));
            return static_cast<int>(p.tensors.size() - 1);
        };
        ref.gamma = push("gamma", S(1), true);
        ref.beta = push("beta", S(0), true);
        ref.mean = push("running_mean", S(0), false);
        ref.var = push("running_var", S(1), false);
        return ref;
    };

    const int k = cfg.kernel_size;
    const int pad_left = (k - 1) / 2;

    p.plan.stem.in_ch = cfg.input_channels;
    p.plan.stem.out_ch = cfg.stem_filters;
    p.plan.stem.kernel = k;
    p.plan.stem.stride = 1;
    p.plan.stem.pad_left = pad_left;
    p.plan.stem.w = add_conv("stem.conv.w", cfg.stem_filters, cfg.input_channels, k);

    int in_ch = cfg.stem_filters;
    for (size_t si = 0; si < cfg.stages.size(); ++si) {
        const StageSpec& stage = cfg.stages[si];
        for (int bi = 0; bi < stage.blocks; ++bi) {
            const std::string base =
                "stage" + std::to_string(si) + ".block" + std::to_string(bi);
            plan::BlockRef block;
            block.stage = static_cast<int>(si);
            block.block = bi;
            const int stride = bi == 0 ? stage.stride : 1;
            const int out_ch = stage.filters;

            block.bn1 = add_bn(base + ".bn1", in_ch);
            block.conv1.in_ch = in_ch;
            block.conv1.out_ch = out_ch;
            block.conv1.kernel = k;
            block.conv1.stride = stride;
            block.conv1.pad_left = pad_left;
            block.conv1.w = add_conv(base + ".conv1.w", out_ch, in_ch, k);

            block.bn2 = add_bn(base + ".bn2", out_ch);
            block.conv2.in_ch = out_ch;
            block.conv2.out_ch = out_ch;
            block.conv2.kernel = k;
            block.conv2.stride = 1;
            block.conv2.pad_left = pad_left;
            block.conv2.w = add_conv(base + ".conv2.w", out_ch, out_ch, k);

            block.has_proj = in_ch != out_ch || stride != 1;
            if (block.has_proj) {
                block.proj.in_ch = in_ch;
                block.proj.out_ch = out_ch;
                block.proj.kernel = 1;
                block.proj.stride = stride;
                block.proj.pad_left = 0;
                block.proj.w = add_conv(base + ".proj.w", out_ch, in_ch, 1);
            }
            p.plan.blocks.push_back(block);
            in_ch = out_ch;
        }
    }
    p.plan.last_channels = in_ch;
    p.plan.final_bn = add_bn("final.bn", in_ch);

    {
        Tensor<S> w;
        w.name = "fc.w";
        w.shape = {cfg.num_classes, in_ch};
        w.trainable = true;
        w.decay = true;
        const double std_dev = std::sqrt(1.0 / in_ch);
        w.data.resize(static_cast<size_t>(cfg.num_classes) * in_ch);
        for (auto& v : w.data) v = static_cast<S>(rng.gaussian(0.0, std_dev));
        p.tensors.push_back(std::move(w));
        p.plan.fc_w = static_cast<int>(p.tensors.size() - 1);

        Tensor<S> b;
        b.name = "fc.b";
        b.shape = {cfg.num_classes};
        b.trainable = true;
        b.decay = false;
        b.data.assign(static_cast<size_t>(cfg.num_classes), S(0));
        p.tensors.push_back(std::move(b));
        p.plan.fc_b = static_cast<int>(p.tensors.size() - 1);
    }

    if (p.trainable_count() >= kMaxParameterCount)
        throw ConfigError("model has " + std::to_string(p.trainable_count()) +
                          " parameters, limit is " +
                          std::to_string(kMaxParameterCount));
    return p;
}

template <typename S>
Grads<S> make_grads(const Params<S>& p) {
    Grads<S> g;
    g.g.resize(p.tensors.size());
    for (size_t i = 0; i < p.tensors.size(); ++i)
        if (p.tensors[i].trainable)
            g.g[i].assign(p.tensors[i].data.size(), S(0));
    return g;
}

// ---------------------------------------------------------------------------
// forward / backward

namespace detail {

// Per-batch activation store; every buffer needed by the backward pass.
template <typename S>
struct BlockCache {
    std::vector<S> xhat1, a1, h1, xhat2, a2, out, shortcut;
    std::vector<std::uint8_t> m1, m2;
    std::vector<double> mean1, invstd1, mean2, invstd2;
    int t_in = 0, t_out = 0;
};

template <typename S>
struct BatchCache {
    int batch = 0;
    int t_in = 0;
    std::vector<S> input;               // B x D x T
    std::vector<S> stem_out;
    std::vector<BlockCache<S>> blocks;
    std::vector<S> xhat_f, act_f;
    std::vector<double> mean_f, invstd_f;
    std::vector<std::uint8_t> final_valid;  // B x T_final
    std::vector<int> valid_counts;          // per sample
    int t_final = 0;
    std::vector<S> pooled;  // B x C
    std::vector<S> logits;  // B x K
};

// Input activation of block i: the stem output for the first block, the
// previous block's output otherwise.
template <typename S>
const S* block_input(const BatchCache<S>& cache, size_t i) {
    return i == 0 ? cache.stem_out.data() : cache.blocks[i - 1].out.data();
}

template <typename S>
const char* first_nonfinite_layer(const BatchCache<S>& cache) {
    auto bad = [](const std::vector<S>& v) {
        for (const S x : v)
            if (!std::isfinite(static_cast<double>(x))) return true;
        return false;
    };
    if (bad(cache.stem_out)) return "stem";
    for (const auto& blk : cache.blocks)
        if (bad(blk.out)) return "residual block";
    if (bad(cache.act_f)) return "final.bn";
    if (bad(cache.logits)) return "fc";
    return "loss";
}

// Runs the network over a batch already laid out as [B][D][T].
// In TRAIN mode running statistics are updated and dropout is applied from
// rng; EVAL uses running statistics and no dropout.
template <typename S>
void forward_batch(Params<S>& params, BatchCache<S>& cache, Mode mode,
                   Rng* rng) {
    const auto& plan = params.plan;
    const int B = cache.batch;
    const double drop = params.cfg.dropout_prob;
    const bool train = mode == Mode::TRAIN;
    if (train && drop > 0.0 && rng == nullptr)
        throw RuntimeError("TRAIN forward with dropout requires an rng");

    auto tensor = [&](int idx) -> Tensor<S>& {
        return params.tensors[static_cast<size_t>(idx)];
    };

    // stem
    {
        const auto& c = plan.stem;
        const int t_out = plan::conv_out_len(cache.t_in, c.stride);
        cache.stem_out.assign(static_cast<size_t>(B) * c.out_ch * t_out, S(0));
        conv1d_forward(cache.input.data(), B, c.in_ch, cache.t_in,
                       tensor(c.w).data.data(), c.out_ch, c.kernel, c.stride,
                       c.pad_left, cache.stem_out.data(), t_out);
    }

    std::vector<S>* x = &cache.stem_out;
    int t_cur = plan::conv_out_len(cache.t_in, 1);
    cache.blocks.resize(plan.blocks.size());

    for (size_t i = 0; i < plan.blocks.size(); ++i) {
        const auto& blk = plan.blocks[i];
        BlockCache<S>& bc = cache.blocks[i];
        const int c_in = blk.conv1.in_ch;
        const int c_out = blk.conv1.out_ch;
        const int t_in = t_cur;
        const int t_out = plan::conv_out_len(t_in, blk.conv1.stride);
        bc.t_in = t_in;
        bc.t_out = t_out;

        const size_t n_in = static_cast<size_t>(B) * c_in * t_in;
        const size_t n_out = static_cast<size_t>(B) * c_out * t_out;

        // pre-activation: BN -> ReLU -> dropout
        bc.xhat1.resize(n_in);
        bc.a1.resize(n_in);
        bc.mean1.resize(static_cast<size_t>(c_in));
        bc.invstd1.resize(static_cast<size_t>(c_in));
        if (train) {
            bn_forward_train(x->data(), B, c_in, t_in,
                             tensor(blk.bn1.gamma).data.data(),
                             tensor(blk.bn1.beta).data.data(), bc.a1.data(),
                             bc.xhat1.data(), bc.mean1.data(), bc.invstd1.data(),
                             tensor(blk.bn1.mean).data.data(),
                             tensor(blk.bn1.var).data.data());
        } else {
            bn_forward_eval(x->data(), B, c_in, t_in,
                            tensor(blk.bn1.gamma).data.data(),
                            tensor(blk.bn1.beta).data.data(),
                            tensor(blk.bn1.mean).data.data(),
                            tensor(blk.bn1.var).data.data(), bc.a1.data());
        }
        relu_inplace(bc.a1.data(), n_in);
        if (train && drop > 0.0) {
            bc.m1.resize(n_in);
            dropout_forward_inplace(bc.a1.data(), n_in, drop, *rng, bc.m1.data());
        }

        bc.h1.assign(n_out, S(0));
        conv1d_forward(bc.a1.data(), B, c_in, t_in, tensor(blk.conv1.w).data.data(),
                       c_out, blk.conv1.kernel, blk.conv1.stride,
                       blk.conv1.pad_left, bc.h1.data(), t_out);

        bc.xhat2.resize(n_out);
        bc.a2.resize(n_out);
        bc.mean2.resize(static_cast<size_t>(c_out));
        bc.invstd2.resize(static_cast<size_t>(c_out));
        if (train) {
            bn_forward_train(bc.h1.data(), B, c_out, t_out,
                             tensor(blk.bn2.gamma).data.data(),
                             tensor(blk.bn2.beta).data.data(), bc.a2.data(),
                             bc.xhat2.data(), bc.mean2.data(), bc.invstd2.data(),
                             tensor(blk.bn2.mean).data.data(),
                             tensor(blk.bn2.var).data.data());
        } else {
            bn_forward_eval(bc.h1.data(), B, c_out, t_out,
                            tensor(blk.bn2.gamma).data.data(),
                            tensor(blk.bn2.beta).data.data(),
                            tensor(blk.bn2.mean).data.data(),
                            tensor(blk.bn2.var).data.data(), bc.a2.data());
        }
        relu_inplace(bc.a2.data(), n_out);
        if (train && drop > 0.0) {
            bc.m2.resize(n_out);
            dropout_forward_inplace(bc.a2.data(), n_out, drop, *rng, bc.m2.data());
        }

        bc.out.assign(n_out, S(0));
        conv1d_forward(bc.a2.data(), B, c_out, t_out, tensor(blk.conv2.w).data.data(),
                       c_out, blk.conv2.kernel, blk.conv2.stride,
                       blk.conv2.pad_left, bc.out.data(), t_out);

        // shortcut
        if (blk.has_proj) {
            bc.shortcut.assign(n_out, S(0));
            conv1d_forward(x->data(), B, c_in, t_in, tensor(blk.proj.w).data.data(),
                           c_out, 1, blk.proj.stride, 0, bc.shortcut.data(), t_out);
            for (size_t j = 0; j < n_out; ++j) bc.out[j] += bc.shortcut[j];
        } else {
            const std::vector<S>& xs = *x;
            for (size_t j = 0; j < n_out; ++j) bc.out[j] += xs[j];
        }

        x = &bc.out;
        t_cur = t_out;
    }

    // final BN -> ReLU
    const int C = plan.last_channels;
    const size_t n_final = static_cast<size_t>(B) * C * t_cur;
    cache.t_final = t_cur;
    cache.xhat_f.resize(n_final);
    cache.act_f.resize(n_final);
    cache.mean_f.resize(static_cast<size_t>(C));
    cache.invstd_f.resize(static_cast<size_t>(C));
    if (train) {
        bn_forward_train(x->data(), B, C, t_cur,
                         tensor(plan.final_bn.gamma).data.data(),
                         tensor(plan.final_bn.beta).data.data(), cache.act_f.data(),
                         cache.xhat_f.data(), cache.mean_f.data(),
                         cache.invstd_f.data(), tensor(plan.final_bn.mean).data.data(),
                         tensor(plan.final_bn.var).data.data());
    } else {
        bn_forward_eval(x->data(), B, C, t_cur,
                        tensor(plan.final_bn.gamma).data.data(),
                        tensor(plan.final_bn.beta).data.data(),
                        tensor(plan.final_bn.mean).data.data(),
                        tensor(plan.final_bn.var).data.data(), cache.act_f.data());
    }
    relu_inplace(cache.act_f.data(), n_final);

    // masked global average pool over time
    cache.pooled.assign(static_cast<size_t>(B) * C, S(0));
    for (int b = 0; b < B; ++b) {
        const std::uint8_t* valid =
            cache.final_valid.data() + static_cast<size_t>(b) * t_cur;
        int count = 0;
        for (int t = 0; t < t_cur; ++t) count += valid[t] ? 1 : 0;
        cache.valid_counts[static_cast<size_t>(b)] = count;
        const S inv = count > 0 ? S(1) / static_cast<S>(count) : S(0);
        for (int c = 0; c < C; ++c) {
            const S* row =
                cache.act_f.data() + (static_cast<size_t>(b) * C + c) * t_cur;
            S acc = S(0);
            for (int t = 0; t < t_cur; ++t)
                if (valid[t]) acc += row[t];
            cache.pooled[static_cast<size_t>(b) * C + c] = acc * inv;
        }
    }

    // affine head
    const Tensor<S>& fw = tensor(plan.fc_w);
    const Tensor<S>& fb = tensor(plan.fc_b);
    const int K = params.cfg.num_classes;
    cache.logits.assign(static_cast<size_t>(B) * K, S(0));
    for (int b = 0; b < B; ++b) {
        const S* g = cache.pooled.data() + static_cast<size_t>(b) * C;
        for (int k = 0; k < K; ++k) {
            const S* wr = fw.data.data() + static_cast<size_t>(k) * C;
            S acc = fb.data[static_cast<size_t>(k)];
            for (int c = 0; c < C; ++c) acc += wr[c] * g[c];
            cache.logits[static_cast<size_t>(b) * K + k] = acc;
        }
    }
}

// Assembles the [B][D][T] input block plus step-validity vectors, and
// propagates validity through the conv plan down to the pooling layer.
template <typename S>
void stage_batch(const Params<S>& params,
                 const std::vector<Example>& batch, BatchCache<S>& cache) {
    const int B = static_cast<int>(batch.size());
    const int D = params.cfg.input_channels;
    if (B == 0) throw DataError("empty batch");
    const int T = batch[0].window->t_steps;
    for (const auto& ex : batch) {
        if (ex.window->dims != D)
            throw DataError("window has D=" + std::to_string(ex.window->dims) +
                            ", model expects D=" + std::to_string(D));
        if (ex.window->t_steps != T)
            throw DataError("windows in a batch must share T");
    }

    cache.batch = B;
    cache.t_in = T;
    cache.input.assign(static_cast<size_t>(B) * D * T, S(0));
    cache.valid_counts.assign(static_cast<size_t>(B), 0);

    std::vector<std::vector<std::uint8_t>> valid(static_cast<size_t>(B));
    for (int b = 0; b < B; ++b) {
        const WindowTensor& w = *batch[static_cast<size_t>(b)].window;
        for (int t = 0; t < T; ++t)
            for (int d = 0; d < D; ++d)
                cache.input[(static_cast<size_t>(b) * D + d) * T + t] =
                    static_cast<S>(w.at(t, d));
        auto& v = valid[static_cast<size_t>(b)];
        v.resize(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t) v[static_cast<size_t>(t)] = w.step_valid(t);
    }

    // time geometry down the conv stack
    int t_final = plan::conv_out_len(T, params.plan.stem.stride);
    int total_stride = params.plan.stem.stride;
    for (const auto& blk : params.plan.blocks) {
        t_final = plan::conv_out_len(t_final, blk.conv1.stride);
        total_stride *= blk.conv1.stride;
    }
    cache.final_valid.assign(static_cast<size_t>(B) * t_final, 0);
    for (int b = 0; b < B; ++b) {
        const auto fv = final_step_validity(valid[static_cast<size_t>(b)],
                                            total_stride, t_final);
        std::copy(fv.begin(), fv.end(),
                  cache.final_valid.begin() + static_cast<size_t>(b) * t_final);
    }
}

}  // namespace detail

// Logits for one window. TRAIN mode applies dropout (rng required when
// dropout_prob > 0) and updates BN running statistics.
template <typename S>
std::vector<S> forward(Params<S>& params, const WindowTensor& window, Mode mode,
                       Rng* rng = nullptr) {
    detail::BatchCache<S> cache;
    std::vector<Example> batch(1);
    batch[0].window = &window;
    detail::stage_batch(params, batch, cache);
    detail::forward_batch(params, cache, mode, rng);
    return cache.logits;
}

template <typename S>
std::vector<S> eval_forward(const Params<S>& params, const WindowTensor& window) {
    // EVAL never mutates; the const_cast is confined here.
    return forward(const_cast<Params<S>&>(params), window, Mode::EVAL, nullptr);
}

template <typename S>
std::vector<double> softmax(const std::vector<S>& logits) {
    double mx = -1e300;
    for (const S v : logits) mx = std::max(mx, static_cast<double>(v));
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(static_cast<double>(logits[i]) - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

// argmax of softmax(logits) in EVAL mode; ties break to the lowest class id.
template <typename S>
Prediction predict(const Params<S>& params, const WindowTensor& window) {
    const std::vector<S> logits = eval_forward(params, window);
    Prediction pred;
    pred.probabilities = softmax(logits);
    pred.class_id = 0;
    for (size_t k = 1; k < pred.probabilities.size(); ++k)
        if (pred.probabilities[k] > pred.probabilities[pred.class_id])
            pred.class_id = static_cast<int>(k);
    return pred;
}

template <typename S>
struct LossResult {
    double loss = 0.0;
    Grads<S> grads;
    std::vector<int> argmax;  // training-mode argmax per batch entry
};

// Mean softmax cross-entropy plus weight_decay * 0.5 * ||W||^2 over decaying
// weights, with exact analytic gradients. Updates BN running statistics.
template <typename S>
LossResult<S> loss_and_grads(Params<S>& params,
                             const std::vector<Example>& batch,
                             double weight_decay, Rng& rng) {
    const auto& plan = params.plan;
    const int B = static_cast<int>(batch.size());
    if (B == 0) throw DataError("loss_and_grads requires a non-empty batch");
    for (const auto& ex : batch)
        if (ex.label < 0 || ex.label >= params.cfg.num_classes)
            throw DataError("label " + std::to_string(ex.label) +
                            " outside [0, " +
                            std::to_string(params.cfg.num_classes) + ")");

    detail::BatchCache<S> cache;
    detail::stage_batch(params, batch, cache);
    detail::forward_batch(params, cache, Mode::TRAIN, &rng);

    const int K = params.cfg.num_classes;
    const int C = plan.last_channels;

    // softmax cross-entropy, mean over the batch
    LossResult<S> result;
    result.grads = make_grads(params);
    result.argmax.resize(static_cast<size_t>(B));
    std::vector<S> dlogits(static_cast<size_t>(B) * K, S(0));
    double loss = 0.0;
    for (int b = 0; b < B; ++b) {
        const S* lr = cache.logits.data() + static_cast<size_t>(b) * K;
        int best = 0;
        for (int k = 1; k < K; ++k)
            if (lr[k] > lr[best]) best = k;
        result.argmax[static_cast<size_t>(b)] = best;
        double mx = -1e300;
        for (int k = 0; k < K; ++k) mx = std::max(mx, static_cast<double>(lr[k]));
        double sum = 0.0;
        for (int k = 0; k < K; ++k) sum += std::exp(static_cast<double>(lr[k]) - mx);
        const int label = batch[static_cast<size_t>(b)].label;
        loss += std::log(sum) + mx - static_cast<double>(lr[label]);
        for (int k = 0; k < K; ++k) {
            const double p = std::exp(static_cast<double>(lr[k]) - mx) / sum;
            dlogits[static_cast<size_t>(b) * K + k] =
                static_cast<S>((p - (k == label ? 1.0 : 0.0)) / B);
        }
    }
    loss /= B;

    // weight decay on conv + affine weights
    if (weight_decay > 0.0) {
        double penalty = 0.0;
        for (const auto& t : params.tensors)
            if (t.decay)
                for (const S v : t.data)
                    penalty += static_cast<double>(v) * static_cast<double>(v);
        loss += 0.5 * weight_decay * penalty;
    }
    result.loss = loss;
    if (!std::isfinite(loss))
        throw RuntimeError(std::string("non-finite loss; first bad layer: ") +
                           detail::first_nonfinite_layer(cache));

    auto tensor = [&](int idx) -> Tensor<S>& {
        return params.tensors[static_cast<size_t>(idx)];
    };
    auto grad = [&](int idx) -> std::vector<S>& {
        return result.grads.g[static_cast<size_t>(idx)];
    };

    // ---- backward ----

    // affine head
    std::vector<S> d_pooled(static_cast<size_t>(B) * C, S(0));
    {
        const Tensor<S>& fw = tensor(plan.fc_w);
        std::vector<S>& dw = grad(plan.fc_w);
        std::vector<S>& db = grad(plan.fc_b);
        for (int b = 0; b < B; ++b) {
            const S* g = cache.pooled.data() + static_cast<size_t>(b) * C;
            const S* dl = dlogits.data() + static_cast<size_t>(b) * K;
            for (int k = 0; k < K; ++k) {
                const S d = dl[k];
                db[static_cast<size_t>(k)] += d;
                const S* wr = fw.data.data() + static_cast<size_t>(k) * C;
                S* dwr = dw.data() + static_cast<size_t>(k) * C;
                S* dg = d_pooled.data() + static_cast<size_t>(b) * C;
                for (int c = 0; c < C; ++c) {
                    dwr[c] += d * g[c];
                    dg[c] += d * wr[c];
                }
            }
        }
    }

    // masked pooling
    const int t_final = cache.t_final;
    std::vector<S> d_act_f(static_cast<size_t>(B) * C * t_final, S(0));
    for (int b = 0; b < B; ++b) {
        const int count = cache.valid_counts[static_cast<size_t>(b)];
        if (count == 0) continue;
        const S inv = S(1) / static_cast<S>(count);
        const std::uint8_t* valid =
            cache.final_valid.data() + static_cast<size_t>(b) * t_final;
        for (int c = 0; c < C; ++c) {
            const S dg =
                d_pooled[static_cast<size_t>(b) * C + c] * inv;
            S* row = d_act_f.data() + (static_cast<size_t>(b) * C + c) * t_final;
            for (int t = 0; t < t_final; ++t)
                if (valid[t]) row[t] = dg;
        }
    }

    // final ReLU + BN
    detail::relu_backward_inplace(cache.act_f.data(), d_act_f.data(),
                                  d_act_f.size());
    std::vector<S> d_x(static_cast<size_t>(B) * C * t_final, S(0));
    detail::bn_backward(cache.xhat_f.data(), d_act_f.data(), B, C, t_final,
                        tensor(plan.final_bn.gamma).data.data(),
                        cache.invstd_f.data(), d_x.data(),
                        grad(plan.final_bn.gamma).data(),
                        grad(plan.final_bn.beta).data());

    // residual blocks, reverse order
    const double drop = params.cfg.dropout_prob;
    for (size_t i = plan.blocks.size(); i-- > 0;) {
        const auto& blk = plan.blocks[i];
        detail::BlockCache<S>& bc = cache.blocks[i];
        const int c_in = blk.conv1.in_ch;
        const int c_out = blk.conv1.out_ch;
        const int t_in = bc.t_in;
        const int t_out = bc.t_out;
        const size_t n_in = static_cast<size_t>(B) * c_in * t_in;
        const size_t n_out = static_cast<size_t>(B) * c_out * t_out;

        // d_x currently holds dL/d(block output)
        std::vector<S> d_in(n_in, S(0));

        // shortcut branch
        if (blk.has_proj) {
            detail::conv1d_backward_weights(
                detail::block_input(cache, i), d_x.data(), B, c_in, t_in, c_out,
                1, blk.proj.stride, 0, grad(blk.proj.w).data(), t_out);
            detail::conv1d_backward_data(d_x.data(), B, c_in, t_in,
                                         tensor(blk.proj.w).data.data(), c_out, 1,
                                         blk.proj.stride, 0, d_in.data(), t_out);
        } else {
            for (size_t j = 0; j < n_out; ++j) d_in[j] = d_x[j];
        }

        // conv2
        std::vector<S> d_a2(n_out, S(0));
        detail::conv1d_backward_weights(bc.a2.data(), d_x.data(), B, c_out, t_out,
                                        c_out, blk.conv2.kernel, 1,
                                        blk.conv2.pad_left,
                                        grad(blk.conv2.w).data(), t_out);
        detail::conv1d_backward_data(d_x.data(), B, c_out, t_out,
                                     tensor(blk.conv2.w).data.data(), c_out,
                                     blk.conv2.kernel, 1, blk.conv2.pad_left,
                                     d_a2.data(), t_out);

        if (!bc.m2.empty())
            detail::dropout_backward_inplace(d_a2.data(), bc.m2.data(), n_out, drop);
        detail::relu_backward_inplace(bc.a2.data(), d_a2.data(), n_out);

        std::vector<S> d_h1(n_out, S(0));
        detail::bn_backward(bc.xhat2.data(), d_a2.data(), B, c_out, t_out,
                            tensor(blk.bn2.gamma).data.data(), bc.invstd2.data(),
                            d_h1.data(), grad(blk.bn2.gamma).data(),
                            grad(blk.bn2.beta).data());

        // conv1
        std::vector<S> d_a1(n_in, S(0));
        detail::conv1d_backward_weights(bc.a1.data(), d_h1.data(), B, c_in, t_in,
                                        c_out, blk.conv1.kernel, blk.conv1.stride,
                                        blk.conv1.pad_left,
                                        grad(blk.conv1.w).data(), t_out);
        detail::conv1d_backward_data(d_h1.data(), B, c_in, t_in,
                                     tensor(blk.conv1.w).data.data(), c_out,
                                     blk.conv1.kernel, blk.conv1.stride,
                                     blk.conv1.pad_left, d_a1.data(), t_out);

        if (!bc.m1.empty())
            detail::dropout_backward_inplace(d_a1.data(), bc.m1.data(), n_in, drop);
        detail::relu_backward_inplace(bc.a1.data(), d_a1.data(), n_in);

        std::vector<S> d_bn1(n_in, S(0));
        detail::bn_backward(bc.xhat1.data(), d_a1.data(), B, c_in, t_in,
                            tensor(blk.bn1.gamma).data.data(), bc.invstd1.data(),
                            d_bn1.data(), grad(blk.bn1.gamma).data(),
                            grad(blk.bn1.beta).data());
        for (size_t j = 0; j < n_in; ++j) d_in[j] += d_bn1[j];

        d_x = std::move(d_in);
    }

    // stem
    {
        const auto& c = plan.stem;
        const int t_out = plan::conv_out_len(cache.t_in, c.stride);
        detail::conv1d_backward_weights(cache.input.data(), d_x.data(), B, c.in_ch,
                                        cache.t_in, c.out_ch, c.kernel, c.stride,
                                        c.pad_left, grad(c.w).data(), t_out);
        // input gradients are not needed
    }

    // weight decay gradients
    if (weight_decay > 0.0) {
        for (size_t i = 0; i < params.tensors.size(); ++i) {
            if (!params.tensors[i].decay) continue;
            const auto& w = params.tensors[i].data;
            auto& gw = result.grads.g[i];
            for (size_t j = 0; j < w.size(); ++j)
                gw[j] += static_cast<S>(weight_decay) * w[j];
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// optimizer

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
    int epochs = 60;
    std::vector<int> lr_decay_milestones;  // x0.1 at each milestone epoch
    double weight_decay = 1e-4;
    std::uint64_t seed = 0;
    int threads = 0;             // 0 = auto
    double early_stop_train_acc = 0.0;  // 0 disables early stopping

    void validate() const {
        if (!(learning_rate > 0.0))
            throw ConfigError("train.learning_rate must be > 0");
        if (momentum < 0.0 || momentum >= 1.0)
            throw ConfigError("train.momentum must be in [0, 1)");
        if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
        if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
        if (weight_decay < 0.0)
            throw ConfigError("train.weight_decay must be >= 0");
        if (early_stop_train_acc < 0.0 || early_stop_train_acc > 1.0)
            throw ConfigError("train.early_stop_train_acc must be in [0, 1]");
    }

    double lr_at_epoch(int epoch) const {
        double lr = learning_rate;
        for (const int m : lr_decay_milestones)
            if (epoch >= m) lr *= 0.1;
        return lr;
    }
};

// Velocity state for classical momentum SGD.
template <typename S>
struct SgdState {
    std::vector<std::vector<S>> velocity;
    int epoch = 0;

    static SgdState<S> make(const Params<S>& p) {
        SgdState<S> st;
        st.velocity.resize(p.tensors.size());
        for (size_t i = 0; i < p.tensors.size(); ++i)
            if (p.tensors[i].trainable)
                st.velocity[i].assign(p.tensors[i].data.size(), S(0));
        return st;
    }
};

// v <- momentum*v - lr*g;  w <- w + v
template <typename S>
void sgd_step(Params<S>& params, const Grads<S>& grads, const TrainConfig& cfg,
              SgdState<S>& state) {
    const S lr = static_cast<S>(cfg.lr_at_epoch(state.epoch));
    const S mu = static_cast<S>(cfg.momentum);
    for (size_t i = 0; i < params.tensors.size(); ++i) {
        if (!params.tensors[i].trainable) continue;
        auto& w = params.tensors[i].data;
        auto& v = state.velocity[i];
        const auto& g = grads.g[i];
        for (size_t j = 0; j < w.size(); ++j) {
            v[j] = mu * v[j] - lr * g[j];
            w[j] += v[j];
        }
    }
}

using ParamsF = Params<float>;
using ParamsD = Params<double>;

}  // namespace skelact
