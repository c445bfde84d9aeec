// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/phy.hpp"

#include <cmath>

#include "rffi/errors.hpp"

namespace rffi::phy {

PilotSymbol PilotSymbol::constant(Eigen::Index n) {
    PilotSymbol p;
    p.values = Eigen::VectorXcd::Ones(n);
    return p;
}

PilotSymbol PilotSymbol::qpsk(Eigen::Index n, RngStream rng) {
    PilotSymbol p;
    p.values.resize(n);
    const double s = M_SQRT1_2;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double re = rng.uniform() < 0.5 ? -s : s;
        const double im = rng.uniform() < 0.5 ? -s : s;
        p.values[j] = {re, im};
    }
    return p;
}

void PilotSymbol::validate() const {
    if (values.size() == 0)
        throw ConfigError("pilot: empty");
    for (Eigen::Index j = 0; j < values.size(); ++j)
        if (values[j] == std::complex<double>(0.0, 0.0))
            throw std::domain_error("pilot: zero entry at subcarrier " + std::to_string(j));
    const double mean_power = values.array().abs2().mean();
    if (std::abs(mean_power - 1.0) > 1e-9)
        throw ConfigError("pilot: mean power must be 1");
}

Eigen::VectorXcd transmit(const PilotSymbol& pilot, const FrequencyResponse& injected, double noise_power,
                          RngStream& rng) {
    pilot.validate();
    if (pilot.values.size() != injected.values.size())
        throw ConfigError("transmit: pilot and response lengths differ");
    if (noise_power < 0)
        throw ConfigError("transmit: noise power must be non-negative");
    Eigen::VectorXcd y = injected.values.array() * pilot.values.array();
    if (noise_power > 0) {
        const double sigma = std::sqrt(noise_power);
        for (Eigen::Index j = 0; j < y.size(); ++j)
            y[j] += sigma * rng.complex_normal();
    }
    return y;
}

Eigen::VectorXcd estimate_csi(const Eigen::VectorXcd& received, const PilotSymbol& pilot) {
    pilot.validate();
    if (received.size() != pilot.values.size())
        throw ConfigError("estimate_csi: received and pilot lengths differ");
    return received.array() / pilot.values.array();
}

void LinkSession::validate() const {
    surface.validate();
    geometry.validate();
    params.validate();
    pilot.validate();
    if (grid.size() != pilot.values.size())
        throw ConfigError("session: grid and pilot lengths differ");
}

double orientation_gain_db(double orientation_deg) {
    // measured-style pattern table, symmetric, flat beyond 90 degrees
    static const double angles[] = {0.0, 30.0, 60.0, 90.0};
    static const double gains[] = {0.0, -0.6, -1.5, -2.5};
    double a = std::abs(std::fmod(orientation_deg, 360.0));
    if (a > 180.0)
        a = 360.0 - a;
    if (a >= 90.0)
        return gains[3];
    for (int i = 0; i < 3; ++i) {
        if (a <= angles[i + 1]) {
            const double t = (a - angles[i]) / (angles[i + 1] - angles[i]);
            return gains[i] + t * (gains[i + 1] - gains[i]);
        }
    }
    return gains[3];
}

double link_amplitude(const LinkSession& session, RngStream& rng_session) {
    const double path_gain = channel::path_loss_gain(session.geometry, session.params);
    RngStream shadow_rng = rng_session.child("shadow");
    const double shadow_db = channel::shadowing_sample_db(session.params.shadowing_sigma_db, shadow_rng);
    const double orient_db = orientation_gain_db(session.geometry.orientation_deg);
    const double gain_db = 10.0 * std::log10(path_gain) + shadow_db + orient_db;
    return std::pow(10.0, gain_db / 20.0);
}

Eigen::VectorXcd simulate_packet(const LinkSession& session, const surface::ControlCode& code,
                                 RngStream rng_session, std::uint64_t packet_id) {
    session.validate();
    RngStream channel_rng = rng_session.child("channel");
    channel::ChannelRealization base = channel::realize(session.geometry, session.params, channel_rng);
    const double amplitude = link_amplitude(session, rng_session);
    if (session.dynamic) {
        RngStream fading_rng = rng_session.child("auth-fading").child(packet_id);
        base = channel::correlated_rerealize(base, 0.0, fading_rng);
    }

    surface::ControlCode tx_code = code;
    tx_code.cv = session.cv;
    const FrequencyResponse s = surface::response(session.surface, tx_code, session.grid);
    FrequencyResponse sh = channel::injected_response(s, channel::frequency_response(base, session.grid));
    sh.values *= amplitude;

    RngStream noise_rng = rng_session.child("auth-noise").child(packet_id);
    return transmit(session.pilot, sh, session.params.noise_power, noise_rng);
}

double effective_snr_db(const LinkSession& session, const LinkBudget& budget, RngStream rng_session) {
    const double amplitude = link_amplitude(session, rng_session);
    const double link_gain_db = 20.0 * std::log10(amplitude);
    return std::min(budget.tx_power_over_noise_db + link_gain_db, budget.rx_snr_cap_db);
}

void set_noise_for_snr(LinkSession& session, double snr_db, RngStream rng_session) {
    const double amplitude = link_amplitude(session, rng_session);
    // reference power: unit-magnitude baseline through the unit-mean channel
    session.params.noise_power = amplitude * amplitude * std::pow(10.0, -snr_db / 10.0);
}

void apply_link_budget(LinkSession& session, const LinkBudget& budget, RngStream rng_session) {
    set_noise_for_snr(session, effective_snr_db(session, budget, rng_session), rng_session);
}

Dataset generate_dataset(const LinkSession& session, const std::vector<surface::ControlCode>& codes,
                         int packets_per_code, RngStream rng) {
    session.validate();
    if (codes.size() < 2)
        throw ConfigError("generate_dataset: need at least two codes");
    if (packets_per_code < 1)
        throw ConfigError("generate_dataset: need at least one packet per code");

    RngStream channel_rng = rng.child("channel");
    const channel::ChannelRealization base = channel::realize(session.geometry, session.params, channel_rng);
    const double amplitude = link_amplitude(session, rng);

    Dataset ds;
    ds.subcarriers = session.grid.size();
    ds.seed = rng.key();

    const FrequencyResponse h_static = channel::frequency_response(base, session.grid);

    for (std::size_t c = 0; c < codes.size(); ++c) {
        surface::ControlCode code = codes[c];
        code.cv = session.cv;
        const FrequencyResponse s = surface::response(session.surface, code, session.grid);
        for (int p = 0; p < packets_per_code; ++p) {
            FrequencyResponse h = h_static;
            if (session.dynamic) {
                RngStream fading_rng = rng.child("fading").child(c).child(static_cast<std::uint64_t>(p));
                h = channel::frequency_response(channel::correlated_rerealize(base, 0.0, fading_rng),
                                                session.grid);
            }
            FrequencyResponse sh = channel::injected_response(s, h);
            sh.values *= amplitude;

            RngStream noise_rng = rng.child("noise").child(c).child(static_cast<std::uint64_t>(p));
            const std::uint64_t record_seed = noise_rng.key();
            const Eigen::VectorXcd y = transmit(session.pilot, sh, session.params.noise_power, noise_rng);
            const Eigen::VectorXcd csi = estimate_csi(y, session.pilot);

            Record r;
            r.code_label = static_cast<std::uint32_t>(c);
            r.channel_id = static_cast<std::uint32_t>(session.wifi_channel);
            r.scenario_id = session.scenario_id;
            r.seed = record_seed;
            r.csi = csi.cast<std::complex<float>>();
            ds.records.push_back(std::move(r));
        }
    }
    ds.validate();
    return ds;
}

} // namespace rffi::phy
