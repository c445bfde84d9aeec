// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_CHANNEL_HPP
#define RFFI_CHANNEL_HPP

#include <complex>
#include <vector>

#include "rffi/rng.hpp"
#include "rffi/types.hpp"

namespace rffi::channel {

/// Indoor scenario: node and receiver positions plus the moving-object
/// population that drives the Rician K factor.
struct ScenarioGeometry {
    Eigen::Vector2d tx_position{0.0, 0.0}; // m
    Eigen::Vector2d rx_position{2.54, 0.0};
    double orientation_deg = 0.0;
    std::vector<double> wall_attenuations_db;
    int moving_objects = 4;                       // N_obj
    double object_width = 0.5;                    // m
    std::complex<double> absorb_factor{0.7, 0.0}; // zeta
    double r_min = 1.0;                           // m
    double r_max = 10.0;                          // m
    double los_k_cap = 1e6; // K factor reported when no moving objects exist

    double distance() const { return (rx_position - tx_position).norm(); }
    void validate() const;
};

struct ChannelParams {
    double path_loss_exponent = 2.0;
    double reference_loss_db = 40.0; // at 1 m
    double shadowing_sigma_db = 2.0;
    double k_rician = 7.0;
    int tap_count = 8;
    double max_delay_spread = 300e-9; // s
    double noise_power = 1e-3;        // per-subcarrier noise power at the receiver

    void validate() const;
};

struct Tap {
    double amplitude; // linear
    double phase;     // rad
    double delay;     // s
};

/// Multipath realization normalized to unit mean power: the direct tap
/// carries k/(k+1) of the power, the diffuse taps the remainder. Large-scale
/// gains (path loss, shadowing, antenna pattern) are applied separately so
/// the dB decomposition of the received power is exact.
struct ChannelRealization {
    std::vector<Tap> taps; // non-decreasing delays, taps[0] is the direct path
    void validate(double max_delay_spread) const;
};

/// Log-distance path gain with per-wall attenuation, linear scale.
double path_loss_gain(const ScenarioGeometry& geometry, const ChannelParams& params);

/// Zero-mean Gaussian shadowing draw in dB.
double shadowing_sample_db(double sigma_db, RngStream& rng);

/// log I0(z) for z >= 0, stable for large arguments.
double log_bessel_i0(double z);

/// Density of the normalized multipath power x under Rician factor k_r:
/// (1+k) exp(-k - (1+k)x) I0(2 sqrt(x k (k+1))).
double rician_envelope_pdf(double x, double k_r);

/// K factor from the moving-object population:
/// (p_d/p_m) * pi (r_max + r_min) / (N_obj |zeta|^2 delta_w).
/// With no moving objects returns geometry.los_k_cap.
double rician_k_from_objects(double direct_power, double path_power, const ScenarioGeometry& geometry);

/// Draw a realization: deterministic direct tap at the geometric delay plus
/// tap_count-1 diffuse taps (Rayleigh amplitudes, uniform phases, uniform
/// delays) scaled to meet k_rician in expectation. The orientation enters as
/// a deterministic per-tap phase rotation.
ChannelRealization realize(const ScenarioGeometry& geometry, const ChannelParams& params, RngStream& rng);

/// Redraw the diffuse taps of `base` with complex correlation rho to the
/// original ones (delays kept). rho = 1 returns base, rho = 0 redraws
/// the diffuse part entirely.
ChannelRealization correlated_rerealize(const ChannelRealization& base, double rho, RngStream& rng);

/// Clarke spatial decorrelation for two transmitters `separation_m` apart
/// observed by a common receiver: J0(2 pi d / lambda) up to its first zero,
/// 0 beyond.
double spatial_correlation(double separation_m, double wavelength_m);

/// H over the grid: sum over taps of amplitude * exp(j(phase - 2 pi f delay)).
FrequencyResponse frequency_response(const ChannelRealization& realization, const Eigen::VectorXd& grid_hz);

/// Per-subcarrier product SH (requires identical grids).
FrequencyResponse injected_response(const FrequencyResponse& surface, const FrequencyResponse& channel);

/// Injected-signature gain minus the expected multipath power, in dB.
double signature_margin_db(double surface_gain_db, double expected_multipath_db);

/// Exact dB composition of the large-scale terms of a link.
double composite_gain_db(double path_loss_db, double shadowing_db, double multipath_db, double signature_db);

} // namespace rffi::channel

#endif
