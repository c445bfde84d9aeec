// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rffi/errors.hpp"

namespace rffi::attack {

double guard_zone_radius(double frequency_hz) {
    if (!(frequency_hz > 0))
        throw std::domain_error("guard zone radius requires a positive frequency");
    return kSpeedOfLight / (4.0 * frequency_hz);
}

Eigen::VectorXcd signal_replay(const Eigen::VectorXcd& y_at_attacker,
                               const FrequencyResponse& channel_at_to_s, double gain,
                               double server_noise_power, RngStream& rng) {
    if (y_at_attacker.size() != channel_at_to_s.values.size())
        throw ConfigError("signal_replay: recording and channel lengths differ");
    Eigen::VectorXcd y = gain * (y_at_attacker.array() * channel_at_to_s.values.array());
    if (server_noise_power > 0) {
        const double sigma = std::sqrt(server_noise_power);
        for (Eigen::Index j = 0; j < y.size(); ++j)
            y[j] += sigma * rng.complex_normal();
    }
    return y;
}

FrequencyResponse attacker_filter(const FrequencyResponse& sh_i_to_s, const FrequencyResponse& sh_i_to_at,
                                  const FrequencyResponse& h_at_to_s) {
    if (sh_i_to_s.frequencies != sh_i_to_at.frequencies || sh_i_to_s.frequencies != h_at_to_s.frequencies)
        throw ConfigError("attacker_filter: grids differ");
    FrequencyResponse out;
    out.frequencies = sh_i_to_s.frequencies;
    out.values = sh_i_to_s.values.array() /
                 (sh_i_to_at.values.array() * h_at_to_s.values.array());
    return out;
}

AttackerChannels derive_channels(const phy::LinkSession& session, std::uint64_t session_seed,
                                 const AttackerConfig& attacker) {
    session.validate();
    RngStream session_rng(session_seed);

    AttackerChannels out;
    RngStream channel_rng = session_rng.child("channel");
    const channel::ChannelRealization base =
        channel::realize(session.geometry, session.params, channel_rng);
    out.h_is = channel::frequency_response(base, session.grid);
    out.a_is = phy::link_amplitude(session, session_rng);

    const double center_hz = 0.5 * (session.grid[0] + session.grid[session.grid.size() - 1]);
    const double wavelength = kSpeedOfLight / center_hz;
    const double d_node = (attacker.position - session.geometry.tx_position).norm();
    const double d_server = (attacker.position - session.geometry.rx_position).norm();
    const double d_link = session.geometry.distance();

    // node -> attacker leg: closer means more line-of-sight
    {
        channel::ScenarioGeometry g = session.geometry;
        const double d_eff = std::max(d_node, 0.05); // near-field floor
        g.rx_position = g.tx_position + Eigen::Vector2d{d_eff, 0.0};
        channel::ChannelParams p = session.params;
        p.k_rician = std::min(session.params.k_rician * std::pow(d_link / d_eff, p.path_loss_exponent),
                              session.geometry.los_k_cap);
        RngStream leg_rng = session_rng.child("attacker-leg");
        const auto realization = channel::realize(g, p, leg_rng);
        out.h_iat = channel::frequency_response(realization, session.grid);
        out.a_iat = std::pow(10.0, -0.05 * (p.reference_loss_db +
                                            10.0 * p.path_loss_exponent * std::log10(d_eff)));
        const double budget = 105.0; // transmit power over the noise floor
        const double snr_db = std::min(budget + 20.0 * std::log10(out.a_iat), attacker.receiver_snr_cap_db);
        out.attacker_noise_power = out.a_iat * out.a_iat * std::pow(10.0, -snr_db / 10.0);
    }

    // attacker -> server leg: correlated with the node's channel for small
    // separations, independent beyond the decorrelation distance
    out.rho = channel::spatial_correlation(d_node, wavelength);
    {
        RngStream leg_rng = session_rng.child("attacker-server");
        if (out.rho > 0.0) {
            const auto realization = channel::correlated_rerealize(base, out.rho, leg_rng);
            out.h_ats = channel::frequency_response(realization, session.grid);
        } else {
            channel::ScenarioGeometry g = session.geometry;
            g.tx_position = attacker.position;
            const auto realization = channel::realize(g, session.params, leg_rng);
            out.h_ats = channel::frequency_response(realization, session.grid);
        }
        const double d_eff = std::max(d_server, 0.05);
        out.a_ats = std::pow(10.0, -0.05 * (session.params.reference_loss_db +
                                            10.0 * session.params.path_loss_exponent * std::log10(d_eff)));
    }
    return out;
}

BoxStats box_stats(std::vector<double> values) {
    if (values.empty())
        throw ConfigError("box_stats: empty sample");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = static_cast<std::size_t>(std::ceil(pos));
        const double t = pos - static_cast<double>(lo);
        return values[lo] + t * (values[hi] - values[lo]);
    };
    return BoxStats{values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

nlohmann::json attack_report_json(const AttackReport& report) {
    nlohmann::json tests = nlohmann::json::array();
    for (const auto& t : report.tests)
        tests.push_back(nlohmann::json{
            {"min", t.min}, {"q1", t.q1}, {"median", t.median}, {"q3", t.q3}, {"max", t.max}});
    return nlohmann::json{{"packets", report.packets},
                          {"accepted", report.accepted},
                          {"acceptance_rate", report.acceptance_rate},
                          {"genuine_median_distance", report.genuine_median_distance},
                          {"separation", report.separation},
                          {"tests", tests}};
}

void attack_boxes_csv(const AttackReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out.precision(10);
    out << "test,min,q1,median,q3,max\n";
    for (std::size_t i = 0; i < report.tests.size(); ++i) {
        const auto& t = report.tests[i];
        out << i << "," << t.min << "," << t.q1 << "," << t.median << "," << t.q3 << "," << t.max << "\n";
    }
}

namespace {

// finalize the report: box the per-packet distances into fixed-size tests
// and compare against the genuine spread
void finish_report(AttackReport& report, const std::vector<double>& attacker_distances,
                   double genuine_median, int packets_per_test) {
    report.acceptance_rate =
        report.packets > 0 ? static_cast<double>(report.accepted) / report.packets : 0.0;
    report.genuine_median_distance = genuine_median;
    report.separation = std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start + static_cast<std::size_t>(packets_per_test) <= attacker_distances.size();
         start += static_cast<std::size_t>(packets_per_test)) {
        std::vector<double> chunk(attacker_distances.begin() + static_cast<std::ptrdiff_t>(start),
                                  attacker_distances.begin() +
                                      static_cast<std::ptrdiff_t>(start + static_cast<std::size_t>(packets_per_test)));
        const auto box = box_stats(chunk);
        report.tests.push_back(box);
        report.separation = std::min(report.separation, box.median - genuine_median);
    }
    if (report.tests.empty())
        report.separation = 0.0;
}

double genuine_median_distance(const phy::LinkSession& session, std::uint64_t session_seed,
                               const auth::Server& server, const surface::ControlCode& code, int label,
                               int n_packets) {
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n_packets));
    for (int p = 0; p < n_packets; ++p) {
        const auto y = phy::simulate_packet(session, code, RngStream(session_seed),
                                            0x900000 + static_cast<std::uint64_t>(p));
        const auto feature = server.model().feature_of(phy::estimate_csi(y, server.pilot()));
        dists.push_back(classifier::mahalanobis(server.model().centroids, feature, label));
    }
    return box_stats(dists).median;
}

} // namespace

AttackReport run_signal_replay(const phy::LinkSession& session, std::uint64_t session_seed,
                               const auth::Server& server, const std::string& dev_id,
                               const surface::ControlCode& code, int label, const AttackerConfig& attacker,
                               int n_packets, int packets_per_test, RngStream rng) {
    const AttackerChannels ch = derive_channels(session, session_seed, attacker);

    surface::ControlCode tx_code = code;
    tx_code.cv = session.cv;
    const FrequencyResponse s = surface::response(session.surface, tx_code, session.grid);
    FrequencyResponse sh_iat = channel::injected_response(s, ch.h_iat);
    sh_iat.values *= ch.a_iat;

    FrequencyResponse h_ats_scaled = ch.h_ats;
    h_ats_scaled.values *= ch.a_ats;

    const double gain =
        attacker.replay_gain > 0 ? attacker.replay_gain : ch.a_is / (ch.a_iat * ch.a_ats);

    AttackReport report;
    report.packets = n_packets;
    std::vector<double> distances;
    distances.reserve(static_cast<std::size_t>(n_packets));
    for (int p = 0; p < n_packets; ++p) {
        RngStream prng = rng.child("replay").child(static_cast<std::uint64_t>(p));
        const Eigen::VectorXcd y_at = phy::transmit(session.pilot, sh_iat, ch.attacker_noise_power, prng);
        const Eigen::VectorXcd y_srv =
            signal_replay(y_at, h_ats_scaled, gain, session.params.noise_power, prng);
        const auto outcome = server.authenticate_p1(y_srv, dev_id);
        report.accepted += outcome.accepted ? 1 : 0;

        const auto feature = server.model().feature_of(phy::estimate_csi(y_srv, server.pilot()));
        distances.push_back(classifier::mahalanobis(server.model().centroids, feature, label));
    }

    const double genuine =
        genuine_median_distance(session, session_seed, server, code, label, packets_per_test);
    finish_report(report, distances, genuine, packets_per_test);
    return report;
}

Eigen::VectorXd SvEstimator::estimate(const Eigen::VectorXcd& csi) const {
    const auto feature = classifier::csi_to_input(csi, config.input_length);
    Eigen::MatrixXd input(feature.values.size(), 1);
    input.col(0) = feature.values;
    const Eigen::VectorXd out = classifier::predict_probs(config, params, input).col(0);
    return (sv_scale * out).cwiseMax(0.0).cwiseMin(sv_scale);
}

SvEstimator train_sv_estimator(const phy::Dataset& eavesdropped, const Eigen::MatrixXd& sv_targets,
                               classifier::TrainConfig tc) {
    eavesdropped.validate();
    if (sv_targets.cols() != static_cast<Eigen::Index>(eavesdropped.records.size()))
        throw ConfigError("train_sv_estimator: targets do not match the dataset");
    if (eavesdropped.n_classes() < 2)
        throw DataError("train_sv_estimator: need at least two known codes");

    SvEstimator estimator;
    estimator.cells = static_cast<int>(sv_targets.rows());
    estimator.config.input_length = 33;
    estimator.config.dense_sizes = {2048, 1024, estimator.cells};
    estimator.config.linear_output = true;

    // distinct sv vectors: a constant mapping cannot be learned from one
    std::vector<Eigen::VectorXd> distinct;
    for (Eigen::Index i = 0; i < sv_targets.cols(); ++i) {
        bool known = false;
        for (const auto& v : distinct)
            known = known || (v - sv_targets.col(i)).norm() < 1e-12;
        if (!known)
            distinct.push_back(sv_targets.col(i));
    }
    estimator.degenerate = distinct.size() < 2;

    const Eigen::MatrixXd features = classifier::features_from_dataset(eavesdropped, 33);
    const std::vector<int> labels = classifier::labels_from_dataset(eavesdropped);
    const Eigen::MatrixXd normalized = sv_targets / estimator.sv_scale;

    auto result = classifier::train<float>(features, labels, estimator.config, tc, normalized);
    estimator.params = std::move(result.params);
    estimator.validation_risk = result.best_val_risk;
    return estimator;
}

phy::Dataset eavesdrop_dataset(const phy::LinkSession& session, std::uint64_t session_seed,
                               const AttackerConfig& attacker, int packets_per_code, RngStream rng) {
    if (attacker.known_codes.size() < 2)
        throw DataError("eavesdrop_dataset: need at least two known codes");
    const AttackerChannels ch = derive_channels(session, session_seed, attacker);

    phy::Dataset ds;
    ds.subcarriers = session.grid.size();
    ds.seed = rng.key();
    for (std::size_t c = 0; c < attacker.known_codes.size(); ++c) {
        surface::ControlCode code = attacker.known_codes[c].first;
        code.cv = session.cv;
        const FrequencyResponse s = surface::response(session.surface, code, session.grid);
        FrequencyResponse sh = channel::injected_response(s, ch.h_iat);
        sh.values *= ch.a_iat;
        for (int p = 0; p < packets_per_code; ++p) {
            RngStream prng = rng.child("eavesdrop").child(c).child(static_cast<std::uint64_t>(p));
            const auto y = phy::transmit(session.pilot, sh, ch.attacker_noise_power, prng);
            phy::Record r;
            r.code_label = static_cast<std::uint32_t>(c);
            r.channel_id = static_cast<std::uint32_t>(session.wifi_channel);
            r.scenario_id = session.scenario_id;
            r.seed = prng.key();
            r.csi = phy::estimate_csi(y, session.pilot).cast<std::complex<float>>();
            ds.records.push_back(std::move(r));
        }
    }
    ds.validate();
    return ds;
}

Eigen::VectorXd estimate_secret_sv(const SvEstimator& estimator, const phy::LinkSession& session,
                                   std::uint64_t session_seed, const AttackerConfig& attacker,
                                   const surface::ControlCode& secret_code, int n_packets, RngStream rng) {
    const AttackerChannels ch = derive_channels(session, session_seed, attacker);
    surface::ControlCode code = secret_code;
    code.cv = session.cv;
    const FrequencyResponse s = surface::response(session.surface, code, session.grid);
    FrequencyResponse sh = channel::injected_response(s, ch.h_iat);
    sh.values *= ch.a_iat;

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(estimator.cells);
    for (int p = 0; p < n_packets; ++p) {
        RngStream prng = rng.child("secret").child(static_cast<std::uint64_t>(p));
        const auto y = phy::transmit(session.pilot, sh, ch.attacker_noise_power, prng);
        acc += estimator.estimate(phy::estimate_csi(y, session.pilot));
    }
    return acc / n_packets;
}

AttackReport run_feature_replay(const phy::LinkSession& session, std::uint64_t session_seed,
                                const auth::Server& server, const std::string& dev_id,
                                const Eigen::VectorXd& sv_estimate, const surface::ControlCode& secret_code,
                                int target_label, const AttackerConfig& attacker, int n_packets,
                                int packets_per_test, RngStream rng) {
    if (!attacker.owns_surface)
        throw ConfigError("run_feature_replay: the attacker needs its own surface to re-inject");
    const AttackerChannels ch = derive_channels(session, session_seed, attacker);

    // the attacker drives its own (identical) surface with the estimate
    surface::ControlCode code{session.cv, sv_estimate};
    const FrequencyResponse s_at = surface::response(session.surface, code, session.grid);
    FrequencyResponse sh_ats = channel::injected_response(s_at, ch.h_ats);
    sh_ats.values *= ch.a_ats;
    const double gain = attacker.replay_gain > 0 ? attacker.replay_gain : ch.a_is / ch.a_ats;
    sh_ats.values *= gain;

    AttackReport report;
    report.packets = n_packets;
    std::vector<double> distances;
    distances.reserve(static_cast<std::size_t>(n_packets));
    for (int p = 0; p < n_packets; ++p) {
        RngStream prng = rng.child("inject").child(static_cast<std::uint64_t>(p));
        const Eigen::VectorXcd y_srv = phy::transmit(session.pilot, sh_ats, session.params.noise_power, prng);
        const auto outcome = server.authenticate_p1(y_srv, dev_id);
        report.accepted += outcome.accepted ? 1 : 0;
        const auto feature = server.model().feature_of(phy::estimate_csi(y_srv, server.pilot()));
        distances.push_back(classifier::mahalanobis(server.model().centroids, feature, target_label));
    }

    const double genuine = genuine_median_distance(session, session_seed, server, secret_code, target_label,
                                                   packets_per_test);
    finish_report(report, distances, genuine, packets_per_test);
    return report;
}

} // namespace rffi::attack
