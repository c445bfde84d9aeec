// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_TYPES_HPP
#define RFFI_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <filesystem>

namespace rffi {

constexpr double kSpeedOfLight = 299792458.0; // m/s

/// Complex transfer function sampled on a strictly increasing frequency grid.
/// Used for the surface response S, the propagation channel H and their
/// composition SH alike.
struct FrequencyResponse {
    Eigen::VectorXd frequencies; // Hz
    Eigen::VectorXcd values;

    Eigen::Index size() const { return frequencies.size(); }
    void validate() const; // throws ConfigError on broken invariants

    /// Mean power 10*log10(mean |value|^2).
    double mean_power_db() const;
};

/// n evenly spaced samples covering [f_lo, f_hi].
Eigen::VectorXd linear_grid(double f_lo, double f_hi, Eigen::Index n);

/// Center frequency of a 2.4 GHz WiFi channel (1..13).
double wifi_channel_center_hz(int channel);

/// Default 30-point CSI grid spanning 20 MHz around a channel center.
Eigen::VectorXd csi_grid(double center_hz, Eigen::Index subcarriers = 30, double span_hz = 20e6);

/// Rows of "frequency,re,im".
void write_response_csv(const FrequencyResponse& fr, const std::filesystem::path& path);

} // namespace rffi

#endif
