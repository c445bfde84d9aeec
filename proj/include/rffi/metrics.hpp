// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_METRICS_HPP
#define RFFI_METRICS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace rffi::metrics {

/// One-vs-all counts per class.
struct ClassCounts {
    std::vector<long> tp, fp, tn, fn;

    int n_classes() const { return static_cast<int>(tp.size()); }
    long total() const { return tp.empty() ? 0 : tp[0] + fp[0] + tn[0] + fn[0]; }
};

ClassCounts confusion(const std::vector<int>& labels, const std::vector<int>& predictions, int n_classes);

struct MicroMacro {
    double micro = 0.0;
    double macro = 0.0;
};

/// Zero-denominator rates are defined as 0 and logged into `warnings`.
MicroMacro precision(const ClassCounts& counts, std::vector<std::string>* warnings = nullptr);
MicroMacro recall(const ClassCounts& counts, std::vector<std::string>* warnings = nullptr);
MicroMacro fall_out(const ClassCounts& counts, std::vector<std::string>* warnings = nullptr);
MicroMacro f1_score(const ClassCounts& counts, std::vector<std::string>* warnings = nullptr);
double accuracy(const ClassCounts& counts);

struct RocPoint {
    double fpr;
    double tpr;
    double threshold;
};

/// One-vs-all ROC: thresholds at every distinct score plus the two infinite
/// endpoints.
std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<bool>& positive);
double trapezoid_auc(const std::vector<RocPoint>& curve);

enum class Averaging { micro, macro };

/// Multi-class AUC from per-sample class scores (classes x samples). Micro
/// pools every (score, indicator) pair; macro averages per-class AUCs,
/// excluding classes without positives (with a warning).
double roc_auc(const Eigen::MatrixXd& scores, const std::vector<int>& labels, Averaging averaging,
               std::vector<std::string>* warnings = nullptr);

struct EvaluationReport {
    double accuracy = 0.0;
    MicroMacro ppv, tpr, fpr, f1;
    double auc_micro = 0.0;
    double auc_macro = 0.0;
    ClassCounts counts;
    std::vector<RocPoint> roc_micro;
    std::vector<std::string> warnings;
};

/// Full one-vs-all evaluation of classifier scores.
EvaluationReport evaluate(const Eigen::MatrixXd& scores, const std::vector<int>& labels);

nlohmann::json report_to_json(const EvaluationReport& report);
/// Header and row in the table column order: accuracy, F1 micro/macro,
/// AUC micro/macro.
std::string report_csv_header();
std::string report_csv_row(const EvaluationReport& report);

} // namespace rffi::metrics

#endif
