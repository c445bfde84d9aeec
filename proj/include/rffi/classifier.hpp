// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_CLASSIFIER_HPP
#define RFFI_CLASSIFIER_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rffi/dataset.hpp"
#include "rffi/errors.hpp"
#include "rffi/rng.hpp"

namespace rffi::classifier {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// configuration

/// 1-D CNN: conv (kernel x channels, bias, ReLU), flatten, then dense layers
/// with ReLU between them, dropout after the first dense layer, and a softmax
/// head (or a linear head for regression).
struct NetworkConfig {
    int input_length = 33;
    int conv_kernel = 4;
    int conv_channels = 24;
    std::vector<int> dense_sizes = {2048, 1024, 208}; // last entry is the output size
    double dropout_p = 0.5;
    bool linear_output = false; // regression head: identity output, squared loss

    int conv_output_length() const { return input_length - conv_kernel + 1; }
    int flatten_size() const { return conv_output_length() * conv_channels; }
    int output_size() const { return dense_sizes.back(); }
    void validate() const;
};

struct LayerCount {
    std::string layer;
    std::int64_t params;
};

std::vector<LayerCount> param_count_by_layer(const NetworkConfig& cfg);
std::int64_t param_count(const NetworkConfig& cfg);

// ---------------------------------------------------------------------------
// parameters

template <typename Scalar>
struct NetworkParams {
    MatX<Scalar> conv_w; // conv_channels x conv_kernel
    VecX<Scalar> conv_b;
    std::vector<MatX<Scalar>> dense_w; // out x in
    std::vector<VecX<Scalar>> dense_b;

    static NetworkParams zeros(const NetworkConfig& cfg) {
        NetworkParams p;
        p.conv_w = MatX<Scalar>::Zero(cfg.conv_channels, cfg.conv_kernel);
        p.conv_b = VecX<Scalar>::Zero(cfg.conv_channels);
        int in = cfg.flatten_size();
        for (int out : cfg.dense_sizes) {
            p.dense_w.push_back(MatX<Scalar>::Zero(out, in));
            p.dense_b.push_back(VecX<Scalar>::Zero(out));
            in = out;
        }
        return p;
    }

    /// He-normal weights, zero biases; draw order is fixed so the result is
    /// reproducible for a given stream. A linear (regression) head starts
    /// near zero, which keeps the initial squared loss small enough for
    /// plain SGD.
    static NetworkParams he_init(const NetworkConfig& cfg, RngStream rng) {
        NetworkParams p = zeros(cfg);
        auto fill = [&rng](MatX<Scalar>& m, double fan_in, double scale) {
            const double sigma = scale * std::sqrt(2.0 / fan_in);
            for (Eigen::Index i = 0; i < m.size(); ++i)
                m.data()[i] = static_cast<Scalar>(rng.normal(0.0, sigma));
        };
        fill(p.conv_w, cfg.conv_kernel, 1.0);
        for (std::size_t l = 0; l < p.dense_w.size(); ++l) {
            const bool last = (l + 1 == p.dense_w.size());
            const double scale = (last && cfg.linear_output) ? 0.05 : 1.0;
            fill(p.dense_w[l], static_cast<double>(p.dense_w[l].cols()), scale);
        }
        return p;
    }

    template <typename F>
    void for_each_tensor(F&& f) {
        f(conv_w);
        f(conv_b);
        for (auto& w : dense_w)
            f(w);
        for (auto& b : dense_b)
            f(b);
    }

    template <typename F>
    void zip_tensors(NetworkParams& other, F&& f) {
        f(conv_w, other.conv_w);
        f(conv_b, other.conv_b);
        for (std::size_t l = 0; l < dense_w.size(); ++l)
            f(dense_w[l], other.dense_w[l]);
        for (std::size_t l = 0; l < dense_b.size(); ++l)
            f(dense_b[l], other.dense_b[l]);
    }

    template <typename Other>
    NetworkParams<Other> cast() const {
        NetworkParams<Other> q;
        q.conv_w = conv_w.template cast<Other>();
        q.conv_b = conv_b.template cast<Other>();
        for (const auto& w : dense_w)
            q.dense_w.push_back(w.template cast<Other>());
        for (const auto& b : dense_b)
            q.dense_b.push_back(b.template cast<Other>());
        return q;
    }
};

enum class Mode { train, eval };

// ---------------------------------------------------------------------------
// forward / backward

namespace detail {

template <typename Scalar>
struct ForwardCache {
    MatX<Scalar> im2col;   // kernel x (out_len * batch)
    MatX<Scalar> conv_pre; // channels x (out_len * batch)
    MatX<Scalar> flat;     // flatten_size x batch (post-ReLU)
    std::vector<MatX<Scalar>> dense_pre;  // pre-activation per dense layer
    std::vector<MatX<Scalar>> dense_post; // layer inputs (post activation/dropout)
    MatX<Scalar> dropout_mask;            // scaled keep mask for the first dense layer
    MatX<Scalar> output;                  // probabilities or linear outputs
};

template <typename Scalar>
void softmax_columns(MatX<Scalar>& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        auto col = m.col(c);
        const Scalar peak = col.maxCoeff();
        col = (col.array() - peak).exp();
        col /= col.sum();
    }
}

template <typename Scalar>
ForwardCache<Scalar> run_forward(const NetworkConfig& cfg, const NetworkParams<Scalar>& params,
                                 const MatX<Scalar>& input, Mode mode, RngStream& rng) {
    cfg.validate();
    if (input.rows() != cfg.input_length)
        throw ConfigError("forward: input rows " + std::to_string(input.rows()) + " != configured length " +
                          std::to_string(cfg.input_length));
    const Eigen::Index batch = input.cols();
    const int out_len = cfg.conv_output_length();

    ForwardCache<Scalar> cache;
    cache.im2col.resize(cfg.conv_kernel, static_cast<Eigen::Index>(out_len) * batch);
    for (Eigen::Index b = 0; b < batch; ++b)
        for (int t = 0; t < out_len; ++t)
            cache.im2col.col(b * out_len + t) = input.block(t, b, cfg.conv_kernel, 1);

    cache.conv_pre = params.conv_w * cache.im2col;
    cache.conv_pre.colwise() += params.conv_b;

    // flatten keeps the column-major (channel, time) layout per sample
    MatX<Scalar> act = cache.conv_pre.cwiseMax(Scalar(0));
    cache.flat = Eigen::Map<const MatX<Scalar>>(act.data(), cfg.flatten_size(), batch);

    const std::size_t n_dense = params.dense_w.size();
    cache.dense_pre.resize(n_dense);
    cache.dense_post.resize(n_dense);
    MatX<Scalar> x = cache.flat;
    for (std::size_t l = 0; l < n_dense; ++l) {
        cache.dense_pre[l] = params.dense_w[l] * x;
        cache.dense_pre[l].colwise() += params.dense_b[l];
        const bool last = (l + 1 == n_dense);
        if (last) {
            cache.output = cache.dense_pre[l];
            if (!cfg.linear_output)
                softmax_columns(cache.output);
            break;
        }
        x = cache.dense_pre[l].cwiseMax(Scalar(0));
        if (l == 0 && cfg.dropout_p > 0.0) {
            if (mode == Mode::train) {
                cache.dropout_mask.resize(x.rows(), x.cols());
                const Scalar scale = Scalar(1.0 / (1.0 - cfg.dropout_p));
                for (Eigen::Index i = 0; i < cache.dropout_mask.size(); ++i)
                    cache.dropout_mask.data()[i] = rng.uniform() < cfg.dropout_p ? Scalar(0) : scale;
                x = x.cwiseProduct(cache.dropout_mask);
            }
        }
        cache.dense_post[l] = x;
    }
    return cache;
}

} // namespace detail

/// Class probabilities (or linear outputs) for a batch, one column per
/// sample. Eval mode is deterministic; train mode applies inverted dropout
/// driven by the stream passed by value.
template <typename Scalar>
MatX<Scalar> forward(const NetworkConfig& cfg, const NetworkParams<Scalar>& params, const MatX<Scalar>& input,
                     Mode mode = Mode::eval, RngStream rng = RngStream(0)) {
    auto cache = detail::run_forward(cfg, params, input, mode, rng);
    return cache.output;
}

template <typename Scalar>
struct LossGrad {
    Scalar loss;
    NetworkParams<Scalar> grad;
};

/// Empirical risk and its gradient over a batch. For the softmax head the
/// loss is mean cross-entropy against integer labels; for the linear head it
/// is the mean halved squared error against target columns.
template <typename Scalar>
LossGrad<Scalar> loss_and_gradient(const NetworkConfig& cfg, const NetworkParams<Scalar>& params,
                                   const MatX<Scalar>& input, const std::vector<int>& labels,
                                   const MatX<Scalar>& targets, Mode mode = Mode::train,
                                   RngStream rng = RngStream(0)) {
    const Eigen::Index batch = input.cols();
    if (batch == 0)
        throw ConfigError("loss_and_gradient: empty batch");
    if (!cfg.linear_output && static_cast<Eigen::Index>(labels.size()) != batch)
        throw ConfigError("loss_and_gradient: labels size != batch");
    if (cfg.linear_output && targets.cols() != batch)
        throw ConfigError("loss_and_gradient: targets size != batch");

    auto cache = detail::run_forward(cfg, params, input, mode, rng);
    const int out_len = cfg.conv_output_length();
    const Scalar inv_batch = Scalar(1) / static_cast<Scalar>(batch);

    LossGrad<Scalar> result;
    result.grad = NetworkParams<Scalar>::zeros(cfg);

    // output-layer gradient and loss
    MatX<Scalar> delta = cache.output;
    Scalar loss = 0;
    if (cfg.linear_output) {
        delta -= targets;
        loss = Scalar(0.5) * delta.squaredNorm() * inv_batch;
        delta *= inv_batch;
    } else {
        for (Eigen::Index b = 0; b < batch; ++b) {
            const int y = labels[static_cast<std::size_t>(b)];
            if (y < 0 || y >= cfg.output_size())
                throw ConfigError("loss_and_gradient: label out of range");
            loss -= std::log(std::max(cache.output(y, b), Scalar(1e-30)));
            delta(y, b) -= Scalar(1);
        }
        loss *= inv_batch;
        delta *= inv_batch;
    }
    result.loss = loss;

    // dense layers, back to front
    const std::size_t n_dense = params.dense_w.size();
    for (std::size_t l = n_dense; l-- > 0;) {
        const MatX<Scalar>& layer_in = (l == 0) ? cache.flat : cache.dense_post[l - 1];
        result.grad.dense_w[l].noalias() = delta * layer_in.transpose();
        result.grad.dense_b[l] = delta.rowwise().sum();
        if (l == 0)
            delta = params.dense_w[l].transpose() * delta;
        else {
            delta = params.dense_w[l].transpose() * delta;
            // through dropout (first dense layer only), then the ReLU
            if (l - 1 == 0 && cfg.dropout_p > 0.0 && mode == Mode::train)
                delta = delta.cwiseProduct(cache.dropout_mask);
            delta = delta.cwiseProduct(
                (cache.dense_pre[l - 1].array() > Scalar(0)).template cast<Scalar>().matrix());
        }
    }

    // through the flatten and the conv ReLU
    Eigen::Map<MatX<Scalar>> conv_delta(delta.data(), cfg.conv_channels,
                                        static_cast<Eigen::Index>(out_len) * input.cols());
    MatX<Scalar> conv_grad =
        conv_delta.cwiseProduct((cache.conv_pre.array() > Scalar(0)).template cast<Scalar>().matrix());
    result.grad.conv_w.noalias() = conv_grad * cache.im2col.transpose();
    result.grad.conv_b = conv_grad.rowwise().sum();

    return result;
}

/// Cross-entropy (or squared-error) risk of a fitted network on a set,
/// evaluated in eval mode.
template <typename Scalar>
double risk(const NetworkConfig& cfg, const NetworkParams<Scalar>& params, const MatX<Scalar>& input,
            const std::vector<int>& labels, const MatX<Scalar>& targets) {
    const Eigen::Index n = input.cols();
    MatX<Scalar> out = forward(cfg, params, input);
    if (cfg.linear_output)
        return 0.5 * static_cast<double>((out - targets).squaredNorm()) / static_cast<double>(n);
    double loss = 0;
    for (Eigen::Index b = 0; b < n; ++b)
        loss -= std::log(std::max(static_cast<double>(out(labels[static_cast<std::size_t>(b)], b)), 1e-300));
    return loss / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// feature extraction

/// CNN input from one CSI snapshot: subcarrier magnitudes standardized to
/// zero mean and unit variance per vector, zero-padded to input_length.
/// An all-zero CSI cannot be standardized and comes back flagged.
struct InputFeature {
    Eigen::VectorXd values;
    bool degenerate = false;
};

InputFeature csi_to_input(const Eigen::VectorXcd& csi, int input_length = 33, bool phase_features = false);

/// Feature matrix (input_length x records) and dense labels for a dataset.
Eigen::MatrixXd features_from_dataset(const phy::Dataset& dataset, int input_length = 33,
                                      bool phase_features = false);
std::vector<int> labels_from_dataset(const phy::Dataset& dataset);

// ---------------------------------------------------------------------------
// training

struct TrainConfig {
    int epochs = 30;
    int batch_size = 64;
    double learning_rate = 0.05;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    double train_fraction = 0.2;      // of the full dataset
    double validation_fraction = 0.1; // of the training split, for model selection

    void validate() const;
};

struct SplitIndices {
    std::vector<int> train, val, test;
};

/// Per-label shuffled split; every label lands in the training split.
SplitIndices stratified_split(const std::vector<int>& labels, double train_fraction,
                              double validation_fraction, RngStream rng);

struct EpochStats {
    int epoch;
    double train_risk;
    double val_risk;
};

template <typename Scalar>
struct TrainResult {
    NetworkParams<Scalar> params; // parameters at the best validation risk
    std::vector<EpochStats> history;
    SplitIndices split;
    int best_epoch = 0;
    double best_val_risk = 0.0;
};

/// Plain SGD with momentum on the empirical risk; deterministic for a given
/// TrainConfig::seed. Shuffling, dropout and initialization all derive from
/// that seed. features holds one column per sample. For a linear-output
/// network pass regression targets (one column per sample); labels are still
/// used for the stratified split.
template <typename Scalar = float>
TrainResult<Scalar> train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                          NetworkConfig cfg, const TrainConfig& tc,
                          const Eigen::MatrixXd& regression_targets = Eigen::MatrixXd()) {
    tc.validate();
    cfg.validate();
    if (features.cols() != static_cast<Eigen::Index>(labels.size()))
        throw ConfigError("train: features/labels size mismatch");
    if (cfg.linear_output && regression_targets.cols() != features.cols())
        throw ConfigError("train: regression targets missing or wrong size");

    int n_classes = 0;
    for (int y : labels)
        n_classes = std::max(n_classes, y + 1);
    if (!cfg.linear_output && cfg.output_size() != n_classes)
        throw ConfigError("train: network output size " + std::to_string(cfg.output_size()) +
                          " != class count " + std::to_string(n_classes));

    RngStream rng(tc.seed);
    SplitIndices split = stratified_split(labels, tc.train_fraction, tc.validation_fraction, rng.child("split"));

    // a class must survive into the training split
    std::vector<bool> present(static_cast<std::size_t>(n_classes), false);
    for (int i : split.train)
        present[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] = true;
    for (int c = 0; c < n_classes; ++c)
        if (!cfg.linear_output && !present[static_cast<std::size_t>(c)])
            throw ConfigError("train: class " + std::to_string(c) + " absent from the training split");

    const MatX<Scalar> all = features.cast<Scalar>();
    const MatX<Scalar> all_targets =
        cfg.linear_output ? MatX<Scalar>(regression_targets.cast<Scalar>()) : MatX<Scalar>();
    auto gather = [&](const std::vector<int>& idx) {
        MatX<Scalar> m(features.rows(), static_cast<Eigen::Index>(idx.size()));
        MatX<Scalar> t;
        if (cfg.linear_output)
            t.resize(all_targets.rows(), static_cast<Eigen::Index>(idx.size()));
        std::vector<int> y(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            m.col(static_cast<Eigen::Index>(i)) = all.col(idx[i]);
            if (cfg.linear_output)
                t.col(static_cast<Eigen::Index>(i)) = all_targets.col(idx[i]);
            y[i] = labels[static_cast<std::size_t>(idx[i])];
        }
        return std::make_tuple(std::move(m), std::move(y), std::move(t));
    };
    auto [train_x, train_y, train_t] = gather(split.train);
    auto [val_x, val_y, val_t] = gather(split.val);

    TrainResult<Scalar> result;
    result.split = split;
    NetworkParams<Scalar> params = NetworkParams<Scalar>::he_init(cfg, rng.child("init"));
    NetworkParams<Scalar> velocity = NetworkParams<Scalar>::zeros(cfg);
    result.params = params;
    result.best_val_risk = std::numeric_limits<double>::infinity();

    const auto n_train = static_cast<int>(split.train.size());
    std::vector<int> order(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i)
        order[static_cast<std::size_t>(i)] = i;

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        RngStream erng = rng.child("epoch").child(static_cast<std::uint64_t>(epoch));
        // Fisher-Yates over the training order
        for (int i = n_train - 1; i > 0; --i) {
            const auto j = static_cast<int>(erng.uniform_index(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }

        double risk_acc = 0.0;
        for (int start = 0, batch_id = 0; start < n_train; start += tc.batch_size, ++batch_id) {
            const int count = std::min(tc.batch_size, n_train - start);
            MatX<Scalar> bx(features.rows(), count);
            MatX<Scalar> bt;
            if (cfg.linear_output)
                bt.resize(all_targets.rows(), count);
            std::vector<int> by(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i) {
                const int src = order[static_cast<std::size_t>(start + i)];
                bx.col(i) = train_x.col(src);
                if (cfg.linear_output)
                    bt.col(i) = train_t.col(src);
                by[static_cast<std::size_t>(i)] = train_y[static_cast<std::size_t>(src)];
            }
            auto lg = loss_and_gradient(cfg, params, bx, by, bt, Mode::train,
                                        erng.child("dropout").child(static_cast<std::uint64_t>(batch_id)));
            risk_acc += static_cast<double>(lg.loss) * count;

            const auto lr = static_cast<Scalar>(tc.learning_rate);
            const auto mu = static_cast<Scalar>(tc.momentum);
            velocity.zip_tensors(lg.grad, [lr, mu](auto& v, auto& g) { v = mu * v - lr * g; });
            params.zip_tensors(velocity, [](auto& w, auto& v) { w += v; });
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_risk = risk_acc / n_train;
        stats.val_risk = split.val.empty() ? stats.train_risk : risk(cfg, params, val_x, val_y, val_t);
        result.history.push_back(stats);

        if (stats.val_risk < result.best_val_risk) {
            result.best_val_risk = stats.val_risk;
            result.best_epoch = epoch;
            result.params = params;
        }
    }
    return result;
}

/// Eval-mode probabilities for a feature matrix, processed in slices to keep
/// the activation memory bounded.
template <typename Scalar = float>
Eigen::MatrixXd predict_probs(const NetworkConfig& cfg, const NetworkParams<Scalar>& params,
                              const Eigen::MatrixXd& features, int slice = 256) {
    Eigen::MatrixXd probs(cfg.output_size(), features.cols());
    for (Eigen::Index start = 0; start < features.cols(); start += slice) {
        const Eigen::Index count = std::min<Eigen::Index>(slice, features.cols() - start);
        const MatX<Scalar> block = features.middleCols(start, count).cast<Scalar>();
        probs.middleCols(start, count) = forward(cfg, params, block).template cast<double>();
    }
    return probs;
}

/// Argmax per column with lowest-index tie break.
std::vector<int> argmax_labels(const Eigen::MatrixXd& probs);

} // namespace rffi::classifier

#endif
