// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rffi/errors.hpp"

namespace rffi::metrics {

namespace {

double ratio_or_zero(double num, double den, const char* what, int cls, std::vector<std::string>* warnings) {
    if (den > 0)
        return num / den;
    if (warnings)
        warnings->push_back(std::string(what) + " undefined for class " + std::to_string(cls) +
                            " (zero denominator), reported as 0");
    return 0.0;
}

} // namespace

ClassCounts confusion(const std::vector<int>& labels, const std::vector<int>& predictions, int n_classes) {
    if (labels.size() != predictions.size())
        throw ConfigError("confusion: labels and predictions differ in length");
    if (n_classes < 1)
        throw ConfigError("confusion: need at least one class");
    ClassCounts c;
    c.tp.assign(static_cast<std::size_t>(n_classes), 0);
    c.fp.assign(static_cast<std::size_t>(n_classes), 0);
    c.tn.assign(static_cast<std::size_t>(n_classes), 0);
    c.fn.assign(static_cast<std::size_t>(n_classes), 0);

    const long n = static_cast<long>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        const int p = predictions[i];
        if (y < 0 || y >= n_classes)
            throw ConfigError("confusion: label " + std::to_string(y) + " out of range");
        if (p < 0 || p >= n_classes)
            throw ConfigError("confusion: prediction " + std::to_string(p) + " out of range");
        if (y == p)
            c.tp[static_cast<std::size_t>(y)]++;
        else {
            c.fn[static_cast<std::size_t>(y)]++;
            c.fp[static_cast<std::size_t>(p)]++;
        }
    }
    for (int k = 0; k < n_classes; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        c.tn[ks] = n - c.tp[ks] - c.fp[ks] - c.fn[ks];
    }
    return c;
}

MicroMacro precision(const ClassCounts& counts, std::vector<std::string>* warnings) {
    MicroMacro out;
    double tp_sum = 0, fp_sum = 0, macro_acc = 0;
    for (int k = 0; k < counts.n_classes(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        tp_sum += static_cast<double>(counts.tp[ks]);
        fp_sum += static_cast<double>(counts.fp[ks]);
        macro_acc += ratio_or_zero(static_cast<double>(counts.tp[ks]),
                                   static_cast<double>(counts.tp[ks] + counts.fp[ks]), "precision", k, warnings);
    }
    out.micro = ratio_or_zero(tp_sum, tp_sum + fp_sum, "micro precision", -1, warnings);
    out.macro = macro_acc / counts.n_classes();
    return out;
}

MicroMacro recall(const ClassCounts& counts, std::vector<std::string>* warnings) {
    MicroMacro out;
    double tp_sum = 0, fn_sum = 0, macro_acc = 0;
    for (int k = 0; k < counts.n_classes(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        tp_sum += static_cast<double>(counts.tp[ks]);
        fn_sum += static_cast<double>(counts.fn[ks]);
        macro_acc += ratio_or_zero(static_cast<double>(counts.tp[ks]),
                                   static_cast<double>(counts.tp[ks] + counts.fn[ks]), "recall", k, warnings);
    }
    out.micro = ratio_or_zero(tp_sum, tp_sum + fn_sum, "micro recall", -1, warnings);
    out.macro = macro_acc / counts.n_classes();
    return out;
}

MicroMacro fall_out(const ClassCounts& counts, std::vector<std::string>* warnings) {
    MicroMacro out;
    double fp_sum = 0, tn_sum = 0, macro_acc = 0;
    for (int k = 0; k < counts.n_classes(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        fp_sum += static_cast<double>(counts.fp[ks]);
        tn_sum += static_cast<double>(counts.tn[ks]);
        macro_acc += ratio_or_zero(static_cast<double>(counts.fp[ks]),
                                   static_cast<double>(counts.fp[ks] + counts.tn[ks]), "fall-out", k, warnings);
    }
    out.micro = ratio_or_zero(fp_sum, fp_sum + tn_sum, "micro fall-out", -1, warnings);
    out.macro = macro_acc / counts.n_classes();
    return out;
}

MicroMacro f1_score(const ClassCounts& counts, std::vector<std::string>* warnings) {
    MicroMacro out;
    double tp_sum = 0, fp_sum = 0, fn_sum = 0, macro_acc = 0;
    for (int k = 0; k < counts.n_classes(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        tp_sum += static_cast<double>(counts.tp[ks]);
        fp_sum += static_cast<double>(counts.fp[ks]);
        fn_sum += static_cast<double>(counts.fn[ks]);
        macro_acc += ratio_or_zero(2.0 * static_cast<double>(counts.tp[ks]),
                                   static_cast<double>(2 * counts.tp[ks] + counts.fp[ks] + counts.fn[ks]), "F1",
                                   k, warnings);
    }
    out.micro = ratio_or_zero(2.0 * tp_sum, 2.0 * tp_sum + fp_sum + fn_sum, "micro F1", -1, warnings);
    out.macro = macro_acc / counts.n_classes();
    return out;
}

double accuracy(const ClassCounts& counts) {
    double tp_sum = 0;
    for (long v : counts.tp)
        tp_sum += static_cast<double>(v);
    const double n = static_cast<double>(counts.total());
    return n > 0 ? tp_sum / n : 0.0;
}

std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size())
        throw ConfigError("roc_curve: scores and indicators differ in length");
    long n_pos = 0, n_neg = 0;
    for (bool p : positive)
        (p ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw ConfigError("roc_curve: need both positives and negatives");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<RocPoint> curve;
    curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // absorb the whole tie group before emitting a point
        while (i < order.size() && scores[order[i]] == threshold) {
            (positive[order[i]] ? tp : fp)++;
            ++i;
        }
        curve.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                         static_cast<double>(tp) / static_cast<double>(n_pos), threshold});
    }
    return curve;
}

double trapezoid_auc(const std::vector<RocPoint>& curve) {
    double auc = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        auc += 0.5 * (curve[i].tpr + curve[i - 1].tpr) * (curve[i].fpr - curve[i - 1].fpr);
    return auc;
}

double roc_auc(const Eigen::MatrixXd& scores, const std::vector<int>& labels, Averaging averaging,
               std::vector<std::string>* warnings) {
    const auto n_classes = static_cast<int>(scores.rows());
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (scores.cols() != n)
        throw ConfigError("roc_auc: scores and labels differ in length");

    if (averaging == Averaging::micro) {
        std::vector<double> pooled;
        std::vector<bool> indicator;
        pooled.reserve(static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(n));
        indicator.reserve(pooled.capacity());
        for (int k = 0; k < n_classes; ++k) {
            for (Eigen::Index i = 0; i < n; ++i) {
                pooled.push_back(scores(k, i));
                indicator.push_back(labels[static_cast<std::size_t>(i)] == k);
            }
        }
        return trapezoid_auc(roc_curve(pooled, indicator));
    }

    double acc = 0.0;
    int used = 0;
    for (int k = 0; k < n_classes; ++k) {
        long n_pos = 0;
        for (int y : labels)
            n_pos += (y == k) ? 1 : 0;
        if (n_pos == 0 || n_pos == n) {
            if (warnings)
                warnings->push_back("AUC: class " + std::to_string(k) +
                                    " has no positives or no negatives; excluded from the macro average");
            continue;
        }
        std::vector<double> s(static_cast<std::size_t>(n));
        std::vector<bool> ind(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            s[static_cast<std::size_t>(i)] = scores(k, i);
            ind[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(i)] == k;
        }
        acc += trapezoid_auc(roc_curve(s, ind));
        ++used;
    }
    if (used == 0)
        throw ConfigError("roc_auc: no class usable for the macro average");
    return acc / used;
}

EvaluationReport evaluate(const Eigen::MatrixXd& scores, const std::vector<int>& labels) {
    EvaluationReport report;
    const auto n_classes = static_cast<int>(scores.rows());

    std::vector<int> predictions(labels.size());
    for (Eigen::Index i = 0; i < scores.cols(); ++i) {
        int best = 0;
        for (int k = 1; k < n_classes; ++k)
            if (scores(k, i) > scores(best, i))
                best = k;
        predictions[static_cast<std::size_t>(i)] = best;
    }

    report.counts = confusion(labels, predictions, n_classes);
    report.accuracy = accuracy(report.counts);
    report.ppv = precision(report.counts, &report.warnings);
    report.tpr = recall(report.counts, &report.warnings);
    report.fpr = fall_out(report.counts, &report.warnings);
    report.f1 = f1_score(report.counts, &report.warnings);
    report.auc_micro = roc_auc(scores, labels, Averaging::micro, &report.warnings);
    report.auc_macro = roc_auc(scores, labels, Averaging::macro, &report.warnings);

    // micro ROC points, for the plot exports
    std::vector<double> pooled;
    std::vector<bool> indicator;
    for (int k = 0; k < n_classes; ++k)
        for (Eigen::Index i = 0; i < scores.cols(); ++i) {
            pooled.push_back(scores(k, i));
            indicator.push_back(labels[static_cast<std::size_t>(i)] == k);
        }
    report.roc_micro = roc_curve(pooled, indicator);
    return report;
}

nlohmann::json report_to_json(const EvaluationReport& report) {
    nlohmann::json per_class = nlohmann::json::array();
    for (int k = 0; k < report.counts.n_classes(); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        per_class.push_back({{"tp", report.counts.tp[ks]},
                             {"fp", report.counts.fp[ks]},
                             {"tn", report.counts.tn[ks]},
                             {"fn", report.counts.fn[ks]}});
    }
    return nlohmann::json{{"accuracy", report.accuracy},
                          {"ppv_micro", report.ppv.micro},
                          {"ppv_macro", report.ppv.macro},
                          {"tpr_micro", report.tpr.micro},
                          {"tpr_macro", report.tpr.macro},
                          {"fpr_micro", report.fpr.micro},
                          {"fpr_macro", report.fpr.macro},
                          {"f1_micro", report.f1.micro},
                          {"f1_macro", report.f1.macro},
                          {"auc_micro", report.auc_micro},
                          {"auc_macro", report.auc_macro},
                          {"per_class", per_class},
                          {"warnings", report.warnings}};
}

std::string report_csv_header() { return "accuracy,f1_micro,f1_macro,auc_micro,auc_macro"; }

std::string report_csv_row(const EvaluationReport& report) {
    std::ostringstream out;
    out.precision(6);
    out << report.accuracy << "," << report.f1.micro << "," << report.f1.macro << "," << report.auc_micro
        << "," << report.auc_macro;
    return out.str();
}

} // namespace rffi::metrics
