// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_CENTROID_HPP
#define RFFI_CENTROID_HPP

#include <vector>

#include <Eigen/Dense>

namespace rffi::classifier {

/// Nearest-centroid model under a shared (pooled, ridge-regularized)
/// covariance; the Mahalanobis metric used for the separability analysis.
struct CentroidModel {
    Eigen::MatrixXd means;       // dim x n_classes
    Eigen::MatrixXd covariance;  // after regularization
    Eigen::MatrixXd cov_inverse;
    double ridge = 0.0;

    int n_classes() const { return static_cast<int>(means.cols()); }
    int dim() const { return static_cast<int>(means.rows()); }
};

/// Fit class means and the pooled within-class covariance. Needs at least
/// two samples per class; a singular covariance with ridge = 0 surfaces as a
/// NumericError.
CentroidModel centroid_fit(const Eigen::MatrixXd& features, const std::vector<int>& labels, int n_classes,
                           double ridge = 1e-6);

/// sqrt((x - mu_c)^T Sigma^-1 (x - mu_c)).
double mahalanobis(const CentroidModel& model, const Eigen::VectorXd& x, int cls);

/// All class distances at once.
Eigen::VectorXd mahalanobis_all(const CentroidModel& model, const Eigen::VectorXd& x);

/// Argmin distance, lowest class index on ties.
int centroid_classify(const CentroidModel& model, const Eigen::VectorXd& x);

/// Gaussian posteriors under the shared covariance: softmax(-d^2/2).
Eigen::VectorXd centroid_posteriors(const CentroidModel& model, const Eigen::VectorXd& x);

/// Two-sample Mahalanobis distance between the means of two feature clouds
/// under their pooled covariance (ridge-regularized).
double two_sample_mahalanobis(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double ridge = 1e-6);

} // namespace rffi::classifier

#endif
