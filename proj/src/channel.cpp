// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/channel.hpp"

#include <algorithm>
#include <cmath>

#include "rffi/errors.hpp"

namespace rffi::channel {

void ScenarioGeometry::validate() const {
    if (distance() <= 0)
        throw ConfigError("scenario: tx and rx positions must be distinct");
    if (!(r_max > r_min) || !(r_min > 0))
        throw ConfigError("scenario: need r_max > r_min > 0");
    if (moving_objects < 0)
        throw ConfigError("scenario: moving object count must be non-negative");
    if (object_width <= 0)
        throw ConfigError("scenario: object width must be positive");
    for (double w : wall_attenuations_db)
        if (w < 0)
            throw ConfigError("scenario: wall attenuation must be non-negative dB");
}

void ChannelParams::validate() const {
    if (path_loss_exponent < 1)
        throw ConfigError("channel: path loss exponent must be >= 1");
    if (shadowing_sigma_db < 0)
        throw ConfigError("channel: shadowing sigma must be non-negative");
    if (k_rician < 0)
        throw ConfigError("channel: k factor must be non-negative");
    if (tap_count < 1)
        throw ConfigError("channel: need at least one tap");
    if (noise_power < 0)
        throw ConfigError("channel: noise power must be non-negative");
    if (max_delay_spread <= 0)
        throw ConfigError("channel: max delay spread must be positive");
}

void ChannelRealization::validate(double max_delay_spread) const {
    if (taps.empty())
        throw ConfigError("realization: no taps");
    double prev = 0.0;
    for (const auto& t : taps) {
        if (t.delay < 0 || t.delay > max_delay_spread)
            throw ConfigError("realization: tap delay outside [0, max delay spread]");
        if (t.delay < prev)
            throw ConfigError("realization: tap delays must be non-decreasing");
        prev = t.delay;
    }
}

double path_loss_gain(const ScenarioGeometry& geometry, const ChannelParams& params) {
    const double d = geometry.distance();
    if (d <= 0)
        throw std::domain_error("path loss requires positive distance");
    double loss_db = params.reference_loss_db + 10.0 * params.path_loss_exponent * std::log10(d);
    for (double w : geometry.wall_attenuations_db)
        loss_db += w;
    return std::pow(10.0, -loss_db / 10.0);
}

double shadowing_sample_db(double sigma_db, RngStream& rng) {
    if (sigma_db < 0)
        throw std::domain_error("shadowing sigma must be non-negative");
    if (sigma_db == 0)
        return 0.0;
    return rng.normal(0.0, sigma_db);
}

double log_bessel_i0(double z) {
    if (z < 0)
        throw std::domain_error("log_bessel_i0 defined for z >= 0");
    if (z < 12.0) {
        // power series, converges quickly in this range
        const double q = 0.25 * z * z;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 64; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-18 * sum)
                break;
        }
        return std::log(sum);
    }
    // asymptotic expansion: I0(z) ~ e^z / sqrt(2 pi z) * (1 + 1/8z + 9/128z^2 + ...)
    const double inv = 1.0 / z;
    const double corr = 1.0 + inv * (0.125 + inv * (0.0703125 + inv * (0.0732421875 + inv * 0.112152099609375)));
    return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(corr);
}

double rician_envelope_pdf(double x, double k_r) {
    if (x < 0)
        throw std::domain_error("rician pdf defined for x >= 0");
    if (k_r < 0)
        throw std::domain_error("rician pdf requires k_r >= 0");
    const double log_pdf =
        std::log1p(k_r) - k_r - (1.0 + k_r) * x + log_bessel_i0(2.0 * std::sqrt(x * k_r * (k_r + 1.0)));
    return std::exp(log_pdf);
}

double rician_k_from_objects(double direct_power, double path_power, const ScenarioGeometry& geometry) {
    geometry.validate();
    if (geometry.moving_objects == 0)
        return geometry.los_k_cap;
    if (!(path_power > 0))
        throw std::domain_error("rician k: path power must be positive");
    const double zeta2 = std::norm(geometry.absorb_factor);
    if (!(zeta2 > 0))
        throw std::domain_error("rician k: absorb factor must be non-zero");
    return (direct_power / path_power) * M_PI * (geometry.r_max + geometry.r_min) /
           (geometry.moving_objects * zeta2 * geometry.object_width);
}

ChannelRealization realize(const ScenarioGeometry& geometry, const ChannelParams& params, RngStream& rng) {
    geometry.validate();
    params.validate();

    const double k = params.k_rician;
    const double direct_delay = std::min(geometry.distance() / kSpeedOfLight, params.max_delay_spread);
    const double orientation_rad = geometry.orientation_deg * M_PI / 180.0;

    ChannelRealization out;
    out.taps.reserve(params.tap_count);

    const int n_diffuse = params.tap_count - 1;
    const double direct_power = (n_diffuse == 0) ? 1.0 : k / (k + 1.0);
    out.taps.push_back(Tap{std::sqrt(direct_power), orientation_rad, direct_delay});

    if (n_diffuse > 0) {
        const double per_tap_power = 1.0 / ((k + 1.0) * n_diffuse);
        std::vector<Tap> diffuse;
        diffuse.reserve(n_diffuse);
        for (int m = 0; m < n_diffuse; ++m) {
            // Rayleigh amplitude with E[a^2] = per_tap_power, uniform phase
            const std::complex<double> g = std::sqrt(per_tap_power) * rng.complex_normal();
            const double delay = rng.uniform(direct_delay, params.max_delay_spread);
            diffuse.push_back(Tap{std::abs(g), std::arg(g) + orientation_rad * (m + 1), delay});
        }
        std::sort(diffuse.begin(), diffuse.end(), [](const Tap& a, const Tap& b) { return a.delay < b.delay; });
        out.taps.insert(out.taps.end(), diffuse.begin(), diffuse.end());
    }
    out.validate(params.max_delay_spread);
    return out;
}

ChannelRealization correlated_rerealize(const ChannelRealization& base, double rho, RngStream& rng) {
    if (rho < 0.0 || rho > 1.0)
        throw ConfigError("correlated_rerealize: rho must be in [0, 1]");
    ChannelRealization out;
    out.taps.reserve(base.taps.size());
    out.taps.push_back(base.taps.front());
    const double mix = std::sqrt(1.0 - rho * rho);
    for (std::size_t m = 1; m < base.taps.size(); ++m) {
        const Tap& t = base.taps[m];
        const std::complex<double> g_base = std::polar(t.amplitude, t.phase);
        // preserve the per-tap mean power under the rho-mix
        const std::complex<double> g = rho * g_base + mix * t.amplitude * rng.complex_normal();
        out.taps.push_back(Tap{std::abs(g), std::arg(g), t.delay});
    }
    return out;
}

double spatial_correlation(double separation_m, double wavelength_m) {
    if (separation_m < 0 || wavelength_m <= 0)
        throw std::domain_error("spatial correlation: bad separation or wavelength");
    const double arg = 2.0 * M_PI * separation_m / wavelength_m;
    constexpr double kFirstZeroJ0 = 2.404825557695773;
    if (arg >= kFirstZeroJ0)
        return 0.0;
    return std::cyl_bessel_j(0.0, arg);
}

FrequencyResponse frequency_response(const ChannelRealization& realization, const Eigen::VectorXd& grid_hz) {
    if (grid_hz.size() == 0)
        throw ConfigError("channel frequency response: empty grid");
    for (Eigen::Index i = 1; i < grid_hz.size(); ++i)
        if (!(grid_hz[i] > grid_hz[i - 1]))
            throw ConfigError("channel frequency response: grid not strictly increasing");
    FrequencyResponse out;
    out.frequencies = grid_hz;
    out.values = Eigen::VectorXcd::Zero(grid_hz.size());
    for (const auto& t : realization.taps) {
        for (Eigen::Index j = 0; j < grid_hz.size(); ++j)
            out.values[j] += std::polar(t.amplitude, t.phase - 2.0 * M_PI * grid_hz[j] * t.delay);
    }
    return out;
}

FrequencyResponse injected_response(const FrequencyResponse& surface, const FrequencyResponse& channel) {
    if (surface.frequencies.size() != channel.frequencies.size() || surface.frequencies != channel.frequencies)
        throw ConfigError("injected response: surface and channel grids differ");
    FrequencyResponse out;
    out.frequencies = surface.frequencies;
    out.values = surface.values.array() * channel.values.array();
    return out;
}

double signature_margin_db(double surface_gain_db, double expected_multipath_db) {
    if (!std::isfinite(surface_gain_db) || !std::isfinite(expected_multipath_db))
        throw std::domain_error("signature margin: inputs must be finite");
    return surface_gain_db - expected_multipath_db;
}

double composite_gain_db(double path_loss_db, double shadowing_db, double multipath_db, double signature_db) {
    return path_loss_db + shadowing_db + multipath_db + signature_db;
}

} // namespace rffi::channel
