// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/surface.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rffi/errors.hpp"

namespace rffi::surface {

using nlohmann::json;

void VaractorModel::validate() const {
    if (!(c_max > c_min) || !(c_min > 0))
        throw ConfigError("varactor: need c_max > c_min > 0");
    if (!(v_max > 0))
        throw ConfigError("varactor: need v_max > 0");
    if (!(junction_potential > 0) || !(grading_exponent > 0))
        throw ConfigError("varactor: need positive junction potential and grading exponent");
}

void UnitCell::validate() const {
    varactor.validate();
    if (!(inductance > 0))
        throw ConfigError("unit cell: inductance must be positive");
    if (!(quality_factor > 0))
        throw ConfigError("unit cell: quality factor must be positive");
    if (coupling_gain < 0)
        throw ConfigError("unit cell: coupling gain must be non-negative");
    if (path_delay < 0)
        throw ConfigError("unit cell: path delay must be non-negative");
}

void Surface::validate() const {
    if (cells.empty())
        throw ConfigError("surface: no cells");
    if (baseline_delay < 0)
        throw ConfigError("surface: baseline delay must be non-negative");
    for (const auto& c : cells)
        c.validate();
}

double varactor_capacitance(const VaractorModel& model, double bias_v) {
    model.validate();
    if (bias_v < 0.0 || bias_v > model.v_max)
        throw std::domain_error("varactor bias outside [0, v_max]");
    auto raw = [&](double v) { return std::pow(1.0 + v / model.junction_potential, -model.grading_exponent); };
    const double raw_end = raw(model.v_max);
    const double u = (raw(bias_v) - raw_end) / (1.0 - raw_end); // 1 at bias 0, 0 at v_max
    return model.c_min + (model.c_max - model.c_min) * u;
}

double unit_cell_resonance(const UnitCell& cell, double capacitance_f) {
    if (!(capacitance_f > 0))
        throw std::domain_error("unit cell resonance requires positive capacitance");
    return 1.0 / (2.0 * M_PI * std::sqrt(cell.inductance * capacitance_f));
}

double resonance_at_bias(const UnitCell& cell, double bias_v) {
    return unit_cell_resonance(cell, varactor_capacitance(cell.varactor, bias_v));
}

std::complex<double> cell_term(const UnitCell& cell, double bias_v, double f_hz) {
    const double f_res = resonance_at_bias(cell, bias_v);
    const double width = f_hz * f_res / cell.quality_factor;
    const std::complex<double> line =
        cell.coupling_gain * width / std::complex<double>(f_res * f_res - f_hz * f_hz, width);
    const double delay_phase = -2.0 * M_PI * f_hz * cell.path_delay;
    return line * std::polar(1.0, delay_phase);
}

FrequencyResponse response(const Surface& surface, const ControlCode& code, const Eigen::VectorXd& grid_hz) {
    surface.validate();
    if (code.sv.size() != surface.cell_count())
        throw ConfigError("control code has " + std::to_string(code.sv.size()) + " signature voltages for " +
                          std::to_string(surface.cell_count()) + " cells");
    if (grid_hz.size() == 0)
        throw ConfigError("surface response: empty grid");
    for (Eigen::Index i = 1; i < grid_hz.size(); ++i)
        if (!(grid_hz[i] > grid_hz[i - 1]))
            throw ConfigError("surface response: grid not strictly increasing");
    for (int n = 0; n < surface.cell_count(); ++n) {
        const auto& var = surface.cells[n].varactor;
        if (code.cv < 0 || code.sv[n] < 0 || code.cv + code.sv[n] > var.v_max)
            throw ConfigError("cell " + std::to_string(n) + ": bias cv + sv = " +
                              std::to_string(code.cv + code.sv[n]) + " V outside [0, " +
                              std::to_string(var.v_max) + "] V");
    }

    FrequencyResponse out;
    out.frequencies = grid_hz;
    out.values.resize(grid_hz.size());
    for (Eigen::Index j = 0; j < grid_hz.size(); ++j) {
        const double f = grid_hz[j];
        std::complex<double> s = std::polar(1.0, -2.0 * M_PI * f * surface.baseline_delay);
        for (int n = 0; n < surface.cell_count(); ++n)
            s += cell_term(surface.cells[n], code.cv + code.sv[n], f);
        out.values[j] = s;
    }
    return out;
}

BigUint signature_capacity(double dynamic_range_v, double step_v, int cells) {
    if (!(dynamic_range_v > 0) || !(step_v > 0))
        throw ConfigError("signature capacity: range and step must be positive");
    if (cells < 1)
        throw ConfigError("signature capacity: need at least one cell");
    const auto levels = static_cast<std::uint64_t>(std::floor(dynamic_range_v / step_v));
    return BigUint::pow(levels, static_cast<unsigned>(cells));
}

Surface default_surface(int n_cells) {
    if (n_cells < 1)
        throw ConfigError("default surface: need at least one cell");

    VaractorModel varactor{};
    varactor.c_max = 2.00e-12;
    varactor.c_min = 1.91e-12;
    varactor.v_max = 40.0;
    varactor.junction_potential = 60.0;
    varactor.grading_exponent = 1.0;

    // Inductance that puts the calibration bias exactly on the calibration
    // frequency, then a small per-cell spread standing in for fabrication
    // tolerance (sub-MHz resonance offsets between cells).
    const double c_cal = varactor_capacitance(varactor, kCalibrationCv);
    const double omega = 2.0 * M_PI * kCalibrationHz;
    const double l_base = 1.0 / (c_cal * omega * omega);

    Surface s;
    s.baseline_delay = 0.135e-9; // ~2 cm standoff, round trip
    s.cells.reserve(n_cells);
    const double mid = 0.5 * (n_cells - 1);
    // cells sit a quarter period in front of the baseline reflection plane,
    // which rotates the resonator's -90 degree peak onto the baseline phase:
    // the perturbations add constructively at the calibration frequency
    const double align_delay = 0.25 / kCalibrationHz;
    for (int n = 0; n < n_cells; ++n) {
        UnitCell cell{};
        cell.varactor = varactor;
        cell.inductance = l_base * (1.0 + 5e-4 * (n - mid));
        cell.quality_factor = 2400.0 * (1.0 + 0.01 * n);
        cell.coupling_gain = 0.62 + 0.02 * n;
        cell.path_delay = s.baseline_delay - align_delay + 8e-12 * n;
        s.cells.push_back(cell);
    }
    return s;
}

double channel_select_cv(const Surface& surface, double target_hz, double sv_mid) {
    surface.validate();
    // mean-cell resonance as the band center
    auto band_center = [&](double cv) {
        double sum = 0.0;
        for (const auto& cell : surface.cells)
            sum += resonance_at_bias(cell, cv + sv_mid);
        return sum / surface.cell_count();
    };
    const double v_max = surface.cells.front().varactor.v_max;
    double lo = 0.0, hi = v_max - sv_mid;
    if (band_center(lo) > target_hz || band_center(hi) < target_hz)
        throw ConfigError("channel_select_cv: target frequency outside tunable band");
    for (int it = 0; it < 200; ++it) {
        const double mid_v = 0.5 * (lo + hi);
        if (band_center(mid_v) < target_hz)
            lo = mid_v;
        else
            hi = mid_v;
    }
    return 0.5 * (lo + hi);
}

namespace {

json varactor_to_json(const VaractorModel& v) {
    return json{{"c_max", v.c_max},
                {"c_min", v.c_min},
                {"v_max", v.v_max},
                {"junction_potential", v.junction_potential},
                {"grading_exponent", v.grading_exponent}};
}

VaractorModel varactor_from_json(const json& j) {
    VaractorModel v{};
    v.c_max = j.at("c_max").get<double>();
    v.c_min = j.at("c_min").get<double>();
    v.v_max = j.at("v_max").get<double>();
    v.junction_potential = j.at("junction_potential").get<double>();
    v.grading_exponent = j.at("grading_exponent").get<double>();
    return v;
}

} // namespace

Surface surface_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open surface config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("surface config " + path.string() + ": " + e.what());
    }
    Surface s;
    s.baseline_delay = j.value("baseline_delay", 0.0);
    for (const auto& jc : j.at("cells")) {
        UnitCell c{};
        c.inductance = jc.at("inductance").get<double>();
        c.varactor = varactor_from_json(jc.at("varactor"));
        c.quality_factor = jc.at("quality_factor").get<double>();
        c.coupling_gain = jc.at("coupling_gain").get<double>();
        c.path_delay = jc.at("path_delay").get<double>();
        s.cells.push_back(c);
    }
    s.validate();
    return s;
}

void surface_to_json_file(const Surface& surface, const std::filesystem::path& path) {
    json cells = json::array();
    for (const auto& c : surface.cells) {
        cells.push_back(json{{"inductance", c.inductance},
                             {"varactor", varactor_to_json(c.varactor)},
                             {"quality_factor", c.quality_factor},
                             {"coupling_gain", c.coupling_gain},
                             {"path_delay", c.path_delay}});
    }
    json j{{"baseline_delay", surface.baseline_delay}, {"cells", cells}};
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

} // namespace rffi::surface
