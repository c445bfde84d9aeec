// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "rffi/attack.hpp"
#include "rffi/errors.hpp"

using namespace rffi;
using namespace rffi::attack;

namespace {

phy::LinkSession make_session(std::uint64_t budget_seed) {
    phy::LinkSession s;
    s.surface = surface::default_surface();
    s.wifi_channel = 5;
    const double center = wifi_channel_center_hz(5);
    s.cv = surface::channel_select_cv(s.surface, center, surface::kSvRange / 2);
    s.grid = csi_grid(center);
    s.pilot = phy::PilotSymbol::constant(s.grid.size());
    phy::apply_link_budget(s, phy::LinkBudget{}, RngStream(budget_seed));
    return s;
}

std::vector<surface::ControlCode> spread_codes(const surface::Surface& s, int n) {
    std::vector<surface::ControlCode> codes;
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd sv = Eigen::VectorXd::Zero(s.cell_count());
        sv[k % s.cell_count()] =
            surface::kSvStep * static_cast<double>(surface::kSvLevels - 1 - 8 * (k / s.cell_count()));
        codes.push_back(surface::ControlCode{0.0, sv});
    }
    return codes;
}

struct Rig {
    phy::LinkSession session;
    std::uint64_t session_seed;
    std::vector<surface::ControlCode> codes;
    auth::Server server;

    Rig(std::uint64_t seed, int n_codes) : session(make_session(seed)), session_seed(seed) {
        codes = spread_codes(session.surface, n_codes);
        server.enroll("alice", phy::generate_dataset(session, codes, 30, RngStream(seed)));
    }
};

} // namespace

TEST_CASE("guard zone radius is a quarter wavelength") {
    CHECK(guard_zone_radius(1e9) == kSpeedOfLight / 4e9);
    CHECK(guard_zone_radius(1e9) == doctest::Approx(0.075).epsilon(1e-3));      // with c rounded to 3e8
    CHECK(guard_zone_radius(2.4e9) == doctest::Approx(0.03125).epsilon(1e-3)); // lambda/4, not lambda/2
    CHECK(guard_zone_radius(2e9) == doctest::Approx(2.0 * guard_zone_radius(4e9)));
    CHECK_THROWS_AS(guard_zone_radius(0.0), std::domain_error);
}

TEST_CASE("identity channels and zero noise make the replay exact") {
    const auto grid = linear_grid(2.42e9, 2.44e9, 16);
    RngStream rng(3);
    Eigen::VectorXcd y(grid.size());
    for (Eigen::Index j = 0; j < y.size(); ++j)
        y[j] = rng.complex_normal();
    FrequencyResponse identity{grid, Eigen::VectorXcd::Ones(grid.size())};
    RngStream noise(1);
    const auto replayed = signal_replay(y, identity, 1.0, 0.0, noise);
    CHECK((replayed - y).norm() == 0.0);
}

TEST_CASE("the filter condition holds exactly in both directions") {
    const auto grid = linear_grid(2.42e9, 2.44e9, 8);
    RngStream rng(9);
    auto random_response = [&rng, &grid]() {
        FrequencyResponse r{grid, Eigen::VectorXcd::Zero(grid.size())};
        for (Eigen::Index j = 0; j < grid.size(); ++j)
            r.values[j] = rng.complex_normal() + std::complex<double>(2.0, 0.0); // away from zero
        return r;
    };
    const auto s = random_response();
    const auto h_is = random_response();
    const auto h_iat = random_response();
    const auto h_ats = random_response();

    const auto sh_is = channel::injected_response(s, h_is);
    const auto sh_iat = channel::injected_response(s, h_iat);

    // forward: with the exact filter, the noiseless replay equals the original
    const auto f_at = attacker_filter(sh_is, sh_iat, h_ats);
    Eigen::VectorXcd replay = sh_iat.values.array() * f_at.values.array() * h_ats.values.array();
    CHECK((replay - sh_is.values).norm() / sh_is.values.norm() < 1e-12);

    // converse: any other flat gain leaves a mismatch on some subcarrier
    for (double g : {0.5, 1.0, 2.0}) {
        Eigen::VectorXcd off = sh_iat.values.array() * g * h_ats.values.array();
        CHECK((off - sh_is.values).norm() / sh_is.values.norm() > 1e-3);
    }
}

TEST_CASE("co-located attackers see a nearly identical channel") {
    Rig rig(2001, 6);
    AttackerConfig atk;
    atk.position = rig.session.geometry.tx_position + Eigen::Vector2d{0.003, 0.0}; // 3 mm
    const auto ch = derive_channels(rig.session, rig.session_seed, atk);
    CHECK(ch.rho > 0.99);

    // replayed CSI correlates with the genuine CSI
    const auto report = run_signal_replay(rig.session, rig.session_seed, rig.server, "alice", rig.codes[1],
                                          1, atk, 60, 20, RngStream(7));
    CHECK(report.acceptance_rate >= 0.9);

    const auto y_genuine = phy::simulate_packet(rig.session, rig.codes[1], RngStream(rig.session_seed), 5);
    const Eigen::VectorXcd genuine_csi = phy::estimate_csi(y_genuine, rig.session.pilot);

    surface::ControlCode code = rig.codes[1];
    code.cv = rig.session.cv;
    const auto s = surface::response(rig.session.surface, code, rig.session.grid);
    FrequencyResponse sh_iat = channel::injected_response(s, ch.h_iat);
    sh_iat.values *= ch.a_iat;
    RngStream prng(8);
    const auto y_at = phy::transmit(rig.session.pilot, sh_iat, ch.attacker_noise_power, prng);
    FrequencyResponse h_ats_scaled = ch.h_ats;
    h_ats_scaled.values *= ch.a_ats;
    const auto y_replay =
        signal_replay(y_at, h_ats_scaled, ch.a_is / (ch.a_iat * ch.a_ats), rig.session.params.noise_power, prng);
    const Eigen::VectorXcd replay_csi = phy::estimate_csi(y_replay, rig.session.pilot);

    const std::complex<double> corr =
        genuine_csi.dot(replay_csi) / (genuine_csi.norm() * replay_csi.norm());
    CHECK(std::abs(corr) > 0.99);
}

TEST_CASE("distant signal replay is rejected") {
    Rig rig(2002, 6);
    AttackerConfig atk;
    atk.position = rig.session.geometry.tx_position + Eigen::Vector2d{0.0, 3.0}; // 3 m away
    const auto ch = derive_channels(rig.session, rig.session_seed, atk);
    CHECK(ch.rho == 0.0);

    const auto report = run_signal_replay(rig.session, rig.session_seed, rig.server, "alice", rig.codes[1],
                                          1, atk, 200, 25, RngStream(11));
    CHECK(report.acceptance_rate <= 0.01);
    CHECK(report.separation > 0.0);
    for (const auto& box : report.tests) {
        CHECK(box.min <= box.q1);
        CHECK(box.q1 <= box.median);
        CHECK(box.median <= box.q3);
        CHECK(box.q3 <= box.max);
    }
}

TEST_CASE("expected acceptance does not grow with attacker distance") {
    Rig rig(2003, 6);
    double prev_rate = 1.1;
    for (double d : {0.002, 0.5, 3.0}) {
        AttackerConfig atk;
        atk.position = rig.session.geometry.tx_position + Eigen::Vector2d{0.0, d};
        double acc = 0.0;
        const int seeds = 30;
        for (int s = 0; s < seeds; ++s) {
            const auto report = run_signal_replay(rig.session, rig.session_seed, rig.server, "alice",
                                                  rig.codes[2], 2, atk, 20, 20,
                                                  RngStream(500 + static_cast<std::uint64_t>(s)));
            acc += report.acceptance_rate;
        }
        acc /= seeds;
        CHECK(acc <= prev_rate + 1e-9);
        prev_rate = acc;
    }
}

TEST_CASE("sv estimator learns its own training codes and flags degenerate data") {
    Rig rig(2004, 8);
    AttackerConfig atk;
    atk.position = {0.4, 0.8};
    atk.known_codes.clear();
    for (std::uint32_t k = 0; k < 6; ++k)
        atk.known_codes.emplace_back(rig.codes[k], k);

    const auto eaves = eavesdrop_dataset(rig.session, rig.session_seed, atk, 40, RngStream(31));
    Eigen::MatrixXd targets(rig.session.surface.cell_count(), eaves.records.size());
    for (std::size_t i = 0; i < eaves.records.size(); ++i)
        targets.col(static_cast<Eigen::Index>(i)) = atk.known_codes[eaves.records[i].code_label].first.sv;

    classifier::TrainConfig tc;
    tc.epochs = 40;
    tc.batch_size = 32;
    tc.train_fraction = 0.9;
    tc.validation_fraction = 0.1;
    tc.learning_rate = 0.005;
    tc.seed = 77;
    const auto estimator = train_sv_estimator(eaves, targets, tc);
    CHECK_FALSE(estimator.degenerate);

    // low error on a fresh packet of a training code
    const auto ch = derive_channels(rig.session, rig.session_seed, atk);
    surface::ControlCode code = rig.codes[3];
    code.cv = rig.session.cv;
    const auto s = surface::response(rig.session.surface, code, rig.session.grid);
    FrequencyResponse sh = channel::injected_response(s, ch.h_iat);
    sh.values *= ch.a_iat;
    RngStream prng(99);
    const auto y = phy::transmit(rig.session.pilot, sh, ch.attacker_noise_power, prng);
    const auto sv_hat = estimator.estimate(phy::estimate_csi(y, rig.session.pilot));
    CHECK((sv_hat - rig.codes[3].sv).norm() / rig.codes[3].sv.norm() < 0.35);

    // determinism
    const auto estimator2 = train_sv_estimator(eaves, targets, tc);
    CHECK(estimator2.validation_risk == estimator.validation_risk);
    bool identical = true;
    auto pa = estimator.params;
    auto pb = estimator2.params;
    pa.zip_tensors(pb, [&identical](const auto& x, const auto& y) { identical = identical && (x == y); });
    CHECK(identical);

    // single known code: constant estimator, flagged
    phy::Dataset tiny;
    tiny.subcarriers = eaves.subcarriers;
    for (const auto& r : eaves.records)
        if (r.code_label <= 1) {
            phy::Record copy = r;
            tiny.records.push_back(copy);
        }
    Eigen::MatrixXd same_targets(rig.session.surface.cell_count(), tiny.records.size());
    for (Eigen::Index i = 0; i < same_targets.cols(); ++i)
        same_targets.col(i) = rig.codes[0].sv; // identical sv for every record
    classifier::TrainConfig tc_small = tc;
    tc_small.epochs = 2;
    const auto degen = train_sv_estimator(tiny, same_targets, tc_small);
    CHECK(degen.degenerate);

    phy::Dataset one_class;
    one_class.subcarriers = eaves.subcarriers;
    for (const auto& r : eaves.records)
        if (r.code_label == 0)
            one_class.records.push_back(r);
    Eigen::MatrixXd t1(rig.session.surface.cell_count(), one_class.records.size());
    CHECK_THROWS_AS(train_sv_estimator(one_class, t1, tc_small), DataError);
}

TEST_CASE("feature replay against a secret code fails at a distance") {
    Rig rig(2005, 8);
    AttackerConfig atk;
    atk.position = rig.session.geometry.tx_position + Eigen::Vector2d{0.0, 3.0};
    for (std::uint32_t k = 0; k < 7; ++k)
        atk.known_codes.emplace_back(rig.codes[k], k);
    const int secret = 7;

    const auto eaves = eavesdrop_dataset(rig.session, rig.session_seed, atk, 30, RngStream(41));
    Eigen::MatrixXd targets(rig.session.surface.cell_count(), eaves.records.size());
    for (std::size_t i = 0; i < eaves.records.size(); ++i)
        targets.col(static_cast<Eigen::Index>(i)) = atk.known_codes[eaves.records[i].code_label].first.sv;

    classifier::TrainConfig tc;
    tc.epochs = 30;
    tc.batch_size = 32;
    tc.train_fraction = 0.9;
    tc.validation_fraction = 0.1;
    tc.learning_rate = 0.005;
    tc.seed = 5;
    const auto estimator = train_sv_estimator(eaves, targets, tc);

    const auto sv_hat = estimate_secret_sv(estimator, rig.session, rig.session_seed, atk,
                                           rig.codes[secret], 25, RngStream(43));
    const auto report = run_feature_replay(rig.session, rig.session_seed, rig.server, "alice", sv_hat,
                                           rig.codes[secret], secret, atk, 100, 25, RngStream(47));
    CHECK(report.acceptance_rate <= 0.01);
    CHECK(report.separation > 0.0);
}

TEST_CASE("an attacker with the exact code at the node's position matches the legitimate rate") {
    Rig rig(2006, 6);
    AttackerConfig atk;
    atk.position = rig.session.geometry.tx_position; // co-located transmit
    const int target = 4;

    const auto report = run_feature_replay(rig.session, rig.session_seed, rig.server, "alice",
                                           rig.codes[target].sv, rig.codes[target], target, atk, 100, 25,
                                           RngStream(53));

    int genuine_accepted = 0;
    for (int p = 0; p < 100; ++p) {
        const auto y = phy::simulate_packet(rig.session, rig.codes[target], RngStream(rig.session_seed),
                                            7000 + static_cast<std::uint64_t>(p));
        genuine_accepted += rig.server.authenticate_p1(y, "alice").accepted ? 1 : 0;
    }
    CHECK(report.acceptance_rate >= genuine_accepted / 100.0 - 0.05);
}
