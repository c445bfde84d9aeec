// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_SURFACE_HPP
#define RFFI_SURFACE_HPP

#include <complex>
#include <filesystem>
#include <vector>

#include "rffi/biguint.hpp"
#include "rffi/types.hpp"

namespace rffi::surface {

/// Varactor bias-to-capacitance law: an abrupt-junction diode curve
/// C(V) = c_max * (1 + V/junction_potential)^(-grading_exponent),
/// rescaled so the capacitance is exactly c_min at v_max. Strictly
/// decreasing over [0, v_max].
struct VaractorModel {
    double c_max;              // F, capacitance at zero bias
    double c_min;              // F, capacitance at v_max
    double v_max;              // V, upper end of the usable bias range
    double junction_potential; // V
    double grading_exponent;   // dimensionless

    void validate() const;
};

/// One varactor-tuned resonant element of the reflect array.
struct UnitCell {
    double inductance;     // H
    VaractorModel varactor;
    double quality_factor; // dimensionless, > 0
    double coupling_gain;  // peak reflection amplitude added at resonance
    double path_delay;     // s, element position delay

    void validate() const;
};

/// The secret hardware key: a channel-select voltage common to all cells
/// plus one signature voltage per cell. The effective varactor bias of cell
/// n is cv + sv[n].
struct ControlCode {
    double cv = 0.0;    // V
    Eigen::VectorXd sv; // V, length = cell count
};

/// Full reflect-array device: the unit cells plus the direct (baseline)
/// reflection path.
struct Surface {
    std::vector<UnitCell> cells;
    double baseline_delay = 0.0; // s, round-trip delay of the unit-magnitude baseline reflection

    int cell_count() const { return static_cast<int>(cells.size()); }
    void validate() const;
};

/// C(bias); throws std::domain_error outside [0, v_max].
double varactor_capacitance(const VaractorModel& model, double bias_v);

/// LC resonance 1/(2*pi*sqrt(L*C)); throws std::domain_error for C <= 0.
double unit_cell_resonance(const UnitCell& cell, double capacitance_f);

/// Resonance of a cell at a given bias voltage (capacitance law composed
/// with the LC resonance).
double resonance_at_bias(const UnitCell& cell, double bias_v);

/// Complex reflection added by one cell at frequency f when biased to
/// resonance f_res: a resonator line with peak amplitude coupling_gain,
/// including the element's position delay.
std::complex<double> cell_term(const UnitCell& cell, double bias_v, double f_hz);

/// Reflection transfer function S over the grid: unit-magnitude delayed
/// baseline plus the sum of all cell resonances. Linear in the cell
/// contributions by construction.
FrequencyResponse response(const Surface& surface, const ControlCode& code, const Eigen::VectorXd& grid_hz);

/// Number of distinct injectable signatures floor(dynamic_range/step)^cells,
/// exact.
BigUint signature_capacity(double dynamic_range_v, double step_v, int cells);

/// Default 8-cell device calibrated so that cv = 16.1 V with sv = 0 centers
/// the resonance band at 2.4225 GHz. Cell constants carry a small
/// deterministic manufacturing spread so the cells are individually
/// distinguishable.
Surface default_surface(int n_cells = 8);

/// Solve for the cv that centers the band (at signature bias sv_mid) on the
/// target frequency. Bisection on the mean cell's resonance.
double channel_select_cv(const Surface& surface, double target_hz, double sv_mid = 0.0);

/// Signature voltage range and quantization defaults mirroring the
/// 26-level control used by the experiments.
constexpr double kSvRange = 10.0;         // V
constexpr int kSvLevels = 26;
constexpr double kSvStep = kSvRange / kSvLevels;
constexpr double kCalibrationCv = 16.1;   // V
constexpr double kCalibrationHz = 2.4225e9;

/// JSON (de)serialization of surface configurations.
Surface surface_from_json_file(const std::filesystem::path& path);
void surface_to_json_file(const Surface& surface, const std::filesystem::path& path);

} // namespace rffi::surface

#endif
