// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/types.hpp"

#include <cmath>
#include <fstream>

#include "rffi/errors.hpp"

namespace rffi {

void FrequencyResponse::validate() const {
    if (frequencies.size() != values.size())
        throw ConfigError("frequency response: grid and values length mismatch");
    if (frequencies.size() == 0)
        throw ConfigError("frequency response: empty grid");
    for (Eigen::Index i = 1; i < frequencies.size(); ++i)
        if (!(frequencies[i] > frequencies[i - 1]))
            throw ConfigError("frequency response: grid not strictly increasing");
    if (!values.allFinite())
        throw ConfigError("frequency response: non-finite values");
}

double FrequencyResponse::mean_power_db() const {
    const double p = values.array().abs2().mean();
    return 10.0 * std::log10(p);
}

Eigen::VectorXd linear_grid(double f_lo, double f_hi, Eigen::Index n) {
    if (!(f_hi > f_lo) || n < 2)
        throw ConfigError("linear_grid: need f_hi > f_lo and n >= 2");
    return Eigen::VectorXd::LinSpaced(n, f_lo, f_hi);
}

double wifi_channel_center_hz(int channel) {
    if (channel < 1 || channel > 13)
        throw ConfigError("wifi channel must be in 1..13");
    return 2.407e9 + 5e6 * channel;
}

Eigen::VectorXd csi_grid(double center_hz, Eigen::Index subcarriers, double span_hz) {
    return linear_grid(center_hz - span_hz / 2, center_hz + span_hz / 2, subcarriers);
}

void write_response_csv(const FrequencyResponse& fr, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << "frequency,re,im\n";
    for (Eigen::Index i = 0; i < fr.size(); ++i)
        out << fr.frequencies[i] << "," << fr.values[i].real() << "," << fr.values[i].imag() << "\n";
}

} // namespace rffi
