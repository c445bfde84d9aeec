// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/classifier.hpp"

namespace rffi::classifier {

void NetworkConfig::validate() const {
    if (input_length < 1 || conv_kernel < 1 || conv_channels < 1)
        throw ConfigError("network: conv dimensions must be positive");
    if (conv_kernel > input_length)
        throw ConfigError("network: kernel longer than the input");
    if (dense_sizes.empty())
        throw ConfigError("network: need at least one dense layer");
    for (int s : dense_sizes)
        if (s < 1)
            throw ConfigError("network: dense sizes must be positive");
    if (dropout_p < 0.0 || dropout_p >= 1.0)
        throw ConfigError("network: dropout probability must be in [0, 1)");
}

std::vector<LayerCount> param_count_by_layer(const NetworkConfig& cfg) {
    cfg.validate();
    std::vector<LayerCount> out;
    out.push_back({"conv1d", static_cast<std::int64_t>(cfg.conv_channels) * cfg.conv_kernel + cfg.conv_channels});
    std::int64_t in = cfg.flatten_size();
    for (std::size_t l = 0; l < cfg.dense_sizes.size(); ++l) {
        const std::int64_t width = cfg.dense_sizes[l];
        out.push_back({"dense_" + std::to_string(l + 1), width * in + width});
        in = width;
    }
    return out;
}

std::int64_t param_count(const NetworkConfig& cfg) {
    std::int64_t total = 0;
    for (const auto& layer : param_count_by_layer(cfg))
        total += layer.params;
    return total;
}

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1)
        throw ConfigError("train config: epochs and batch size must be positive");
    if (!(learning_rate > 0))
        throw ConfigError("train config: learning rate must be positive");
    if (momentum < 0 || momentum >= 1)
        throw ConfigError("train config: momentum must be in [0, 1)");
    if (!(train_fraction > 0) || !(train_fraction < 1))
        throw ConfigError("train config: train fraction must be in (0, 1)");
    if (validation_fraction < 0 || validation_fraction >= 1)
        throw ConfigError("train config: validation fraction must be in [0, 1)");
}

InputFeature csi_to_input(const Eigen::VectorXcd& csi, int input_length, bool phase_features) {
    const Eigen::Index s = csi.size();
    if (s == 0)
        throw ConfigError("csi_to_input: empty CSI");
    const Eigen::Index blocks = phase_features ? 2 : 1;
    if (input_length < s * blocks)
        throw ConfigError("csi_to_input: input_length shorter than the feature blocks");

    InputFeature out;
    out.values = Eigen::VectorXd::Zero(input_length);

    auto standardize = [](Eigen::VectorXd v) {
        const double mean = v.mean();
        v.array() -= mean;
        const double var = v.squaredNorm() / static_cast<double>(v.size());
        // epsilon floor keeps constant vectors finite (they map to zero)
        v /= std::sqrt(std::max(var, 1e-24));
        return v;
    };

    const Eigen::VectorXd mags = csi.array().abs();
    out.degenerate = (mags.maxCoeff() == 0.0);
    out.values.head(s) = standardize(mags);
    if (phase_features)
        out.values.segment(s, s) = standardize(csi.array().arg());
    return out;
}

Eigen::MatrixXd features_from_dataset(const phy::Dataset& dataset, int input_length, bool phase_features) {
    Eigen::MatrixXd m(input_length, static_cast<Eigen::Index>(dataset.records.size()));
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const Eigen::VectorXcd csi = dataset.records[i].csi.cast<std::complex<double>>();
        m.col(static_cast<Eigen::Index>(i)) = csi_to_input(csi, input_length, phase_features).values;
    }
    return m;
}

std::vector<int> labels_from_dataset(const phy::Dataset& dataset) {
    std::vector<int> labels(dataset.records.size());
    for (std::size_t i = 0; i < dataset.records.size(); ++i)
        labels[i] = static_cast<int>(dataset.records[i].code_label);
    return labels;
}

SplitIndices stratified_split(const std::vector<int>& labels, double train_fraction,
                              double validation_fraction, RngStream rng) {
    if (!(train_fraction > 0) || !(train_fraction < 1))
        throw ConfigError("stratified_split: train fraction must be in (0, 1)");
    int n_classes = 0;
    for (int y : labels)
        n_classes = std::max(n_classes, y + 1);

    std::vector<std::vector<int>> per_class(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < labels.size(); ++i)
        per_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));

    SplitIndices out;
    for (int c = 0; c < n_classes; ++c) {
        auto& idx = per_class[static_cast<std::size_t>(c)];
        if (idx.empty())
            continue;
        RngStream crng = rng.child(static_cast<std::uint64_t>(c));
        for (std::size_t i = idx.size(); i-- > 1;) {
            const auto j = static_cast<std::size_t>(crng.uniform_index(i + 1));
            std::swap(idx[i], idx[j]);
        }
        const auto n = static_cast<std::size_t>(idx.size());
        std::size_t n_train = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(train_fraction * n)));
        n_train = std::min(n_train, n);
        const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * n_train));
        for (std::size_t i = 0; i < n; ++i) {
            if (i < n_train - n_val)
                out.train.push_back(idx[i]);
            else if (i < n_train)
                out.val.push_back(idx[i]);
            else
                out.test.push_back(idx[i]);
        }
    }
    return out;
}

std::vector<int> argmax_labels(const Eigen::MatrixXd& probs) {
    std::vector<int> out(static_cast<std::size_t>(probs.cols()));
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        int best = 0;
        double best_v = probs(0, c);
        for (Eigen::Index r = 1; r < probs.rows(); ++r) {
            if (probs(r, c) > best_v) { // strict: ties keep the lowest index
                best_v = probs(r, c);
                best = static_cast<int>(r);
            }
        }
        out[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

} // namespace rffi::classifier
