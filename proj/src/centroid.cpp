// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/centroid.hpp"

#include <cmath>

#include "rffi/errors.hpp"

namespace rffi::classifier {

namespace {

Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        (ldlt.vectorD().array() <= 0.0).any())
        throw NumericError(std::string(what) + ": covariance is singular; add ridge regularization");
    Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    if (!inv.allFinite())
        throw NumericError(std::string(what) + ": covariance inversion failed");
    return inv;
}

} // namespace

CentroidModel centroid_fit(const Eigen::MatrixXd& features, const std::vector<int>& labels, int n_classes,
                           double ridge) {
    if (features.cols() != static_cast<Eigen::Index>(labels.size()))
        throw ConfigError("centroid_fit: features/labels size mismatch");
    if (n_classes < 1)
        throw ConfigError("centroid_fit: need at least one class");
    if (ridge < 0)
        throw ConfigError("centroid_fit: ridge must be non-negative");

    const Eigen::Index dim = features.rows();
    const Eigen::Index n = features.cols();

    std::vector<Eigen::Index> counts(static_cast<std::size_t>(n_classes), 0);
    CentroidModel model;
    model.ridge = ridge;
    model.means = Eigen::MatrixXd::Zero(dim, n_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= n_classes)
            throw ConfigError("centroid_fit: label out of range");
        model.means.col(y) += features.col(i);
        counts[static_cast<std::size_t>(y)]++;
    }
    for (int c = 0; c < n_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] < 2)
            throw ConfigError("centroid_fit: class " + std::to_string(c) + " needs at least two samples");
        model.means.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd d = features.col(i) - model.means.col(labels[static_cast<std::size_t>(i)]);
        pooled.noalias() += d * d.transpose();
    }
    pooled /= static_cast<double>(n - n_classes);

    model.covariance = pooled + ridge * Eigen::MatrixXd::Identity(dim, dim);
    model.cov_inverse = invert_spd(model.covariance, "centroid_fit");
    return model;
}

double mahalanobis(const CentroidModel& model, const Eigen::VectorXd& x, int cls) {
    if (cls < 0 || cls >= model.n_classes())
        throw ConfigError("mahalanobis: class out of range");
    const Eigen::VectorXd d = x - model.means.col(cls);
    const double q = d.dot(model.cov_inverse * d);
    return std::sqrt(std::max(q, 0.0));
}

Eigen::VectorXd mahalanobis_all(const CentroidModel& model, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(model.n_classes());
    for (int c = 0; c < model.n_classes(); ++c)
        out[c] = mahalanobis(model, x, c);
    return out;
}

int centroid_classify(const CentroidModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd d = mahalanobis_all(model, x);
    int best = 0;
    for (int c = 1; c < model.n_classes(); ++c)
        if (d[c] < d[best]) // strict: ties keep the lowest index
            best = c;
    return best;
}

Eigen::VectorXd centroid_posteriors(const CentroidModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd d = mahalanobis_all(model, x);
    Eigen::VectorXd logits = -0.5 * d.array().square();
    const double peak = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - peak).exp();
    p /= p.sum();
    return p;
}

double two_sample_mahalanobis(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double ridge) {
    if (a.rows() != b.rows())
        throw ConfigError("two_sample_mahalanobis: dimension mismatch");
    if (a.cols() < 2 || b.cols() < 2)
        throw ConfigError("two_sample_mahalanobis: need at least two samples per side");

    const Eigen::VectorXd mu_a = a.rowwise().mean();
    const Eigen::VectorXd mu_b = b.rowwise().mean();
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(a.rows(), a.rows());
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        const Eigen::VectorXd d = a.col(i) - mu_a;
        pooled.noalias() += d * d.transpose();
    }
    for (Eigen::Index i = 0; i < b.cols(); ++i) {
        const Eigen::VectorXd d = b.col(i) - mu_b;
        pooled.noalias() += d * d.transpose();
    }
    pooled /= static_cast<double>(a.cols() + b.cols() - 2);
    pooled += ridge * Eigen::MatrixXd::Identity(a.rows(), a.rows());

    const Eigen::MatrixXd inv = invert_spd(pooled, "two_sample_mahalanobis");
    const Eigen::VectorXd d = mu_a - mu_b;
    return std::sqrt(std::max(d.dot(inv * d), 0.0));
}

} // namespace rffi::classifier
