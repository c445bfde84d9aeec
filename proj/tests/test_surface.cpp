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

#include <cmath>
#include <filesystem>

#include "rffi/errors.hpp"
#include "rffi/rng.hpp"
#include "rffi/surface.hpp"

using namespace rffi;
using namespace rffi::surface;

TEST_CASE("varactor capacitance hits the fitted-law boundaries") {
    const VaractorModel v = default_surface().cells[0].varactor;
    CHECK(varactor_capacitance(v, 0.0) == doctest::Approx(v.c_max).epsilon(1e-12));
    CHECK(varactor_capacitance(v, v.v_max) == doctest::Approx(v.c_min).epsilon(1e-12));
    CHECK_THROWS_AS(varactor_capacitance(v, -0.1), std::domain_error);
    CHECK_THROWS_AS(varactor_capacitance(v, v.v_max + 0.1), std::domain_error);
}

TEST_CASE("varactor capacitance is strictly decreasing over a dense sweep") {
    const VaractorModel v = default_surface().cells[0].varactor;
    const int n = 10000;
    double prev = varactor_capacitance(v, 0.0);
    for (int i = 1; i <= n; ++i) {
        const double bias = v.v_max * i / n;
        const double c = varactor_capacitance(v, bias);
        CHECK(c < prev);
        CHECK(c >= v.c_min);
        CHECK(c <= v.c_max);
        prev = c;
    }
    // mid-range value stays strictly inside the fitted interval
    const double mid = varactor_capacitance(v, v.v_max / 2);
    CHECK(mid > v.c_min);
    CHECK(mid < v.c_max);
}

TEST_CASE("unit cell resonance closed forms") {
    UnitCell cell = default_surface().cells[0];
    cell.inductance = 1.0;
    CHECK(unit_cell_resonance(cell, 1.0 / (4.0 * M_PI * M_PI)) == doctest::Approx(1.0).epsilon(1e-12));

    const double f1 = unit_cell_resonance(cell, 2e-12);
    const double f2 = unit_cell_resonance(cell, 4e-12);
    CHECK(f2 / f1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(unit_cell_resonance(cell, 0.0), std::domain_error);
    CHECK_THROWS_AS(unit_cell_resonance(cell, -1e-12), std::domain_error);
}

TEST_CASE("calibrated default cell resonates in the observed band at 16.1 V") {
    const Surface s = default_surface();
    for (const auto& cell : s.cells) {
        const double f = resonance_at_bias(cell, kCalibrationCv);
        CHECK(f >= 2.420e9);
        CHECK(f <= 2.425e9);
    }
}

TEST_CASE("zero coupling gives the flat baseline") {
    Surface s = default_surface();
    for (auto& c : s.cells)
        c.coupling_gain = 0.0;
    ControlCode code{kCalibrationCv, Eigen::VectorXd::Zero(s.cell_count())};
    const auto grid = linear_grid(2.41e9, 2.43e9, 64);
    const FrequencyResponse r = response(s, code, grid);
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        CHECK(std::abs(r.values[j]) == doctest::Approx(1.0).epsilon(1e-12));
        const double expected_phase = -2.0 * M_PI * grid[j] * s.baseline_delay;
        const double got = std::arg(r.values[j] * std::polar(1.0, -expected_phase));
        CHECK(std::abs(got) < 1e-9);
    }
}

TEST_CASE("response is the baseline plus per-cell terms (superposition oracle)") {
    const Surface s = default_surface();
    const auto grid = linear_grid(2.41e9, 2.44e9, 41);
    RngStream rng(42);

    for (int trial = 0; trial < 8; ++trial) {
        Eigen::VectorXd sv(s.cell_count());
        for (int n = 0; n < s.cell_count(); ++n)
            sv[n] = rng.uniform(0.0, kSvRange);
        const ControlCode code{kCalibrationCv, sv};

        const FrequencyResponse full = response(s, code, grid);

        // independent evaluation: baseline plus the single-cell perturbations
        Surface bare = s;
        for (auto& c : bare.cells)
            c.coupling_gain = 0.0;
        FrequencyResponse acc = response(bare, code, grid);
        for (int n = 0; n < s.cell_count(); ++n) {
            Surface single = bare;
            single.cells[n].coupling_gain = s.cells[n].coupling_gain;
            const FrequencyResponse one = response(single, code, grid);
            acc.values += one.values - response(bare, code, grid).values;
        }

        const double rel = (full.values - acc.values).norm() / full.values.norm();
        CHECK(rel < 1e-12);
    }
}

TEST_CASE("max |S| of the calibrated 8-cell surface at 16.1 V lies in the observed band") {
    const Surface s = default_surface();
    const ControlCode code{kCalibrationCv, Eigen::VectorXd::Zero(s.cell_count())};
    const auto grid = linear_grid(2.400e9, 2.450e9, 2001);
    const FrequencyResponse r = response(s, code, grid);
    Eigen::Index best = 0;
    double best_mag = 0;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const double m = std::abs(r.values[j]);
        if (m > best_mag) {
            best_mag = m;
            best = j;
        }
    }
    CHECK(grid[best] >= 2.420e9);
    CHECK(grid[best] <= 2.425e9);
    CHECK(best_mag > 1.0);
}

TEST_CASE("response rejects mismatched code length and out-of-range bias") {
    const Surface s = default_surface();
    const auto grid = linear_grid(2.41e9, 2.43e9, 8);
    CHECK_THROWS_AS(response(s, ControlCode{16.1, Eigen::VectorXd::Zero(3)}, grid), ConfigError);
    Eigen::VectorXd sv = Eigen::VectorXd::Zero(s.cell_count());
    sv[0] = 39.0; // cv + sv beyond v_max
    CHECK_THROWS_AS(response(s, ControlCode{16.1, sv}, grid), ConfigError);
}

TEST_CASE("monotone tuning: resonance rises with cv, ordering preserved") {
    const Surface s = default_surface();
    std::vector<double> prev(s.cells.size(), 0.0);
    for (double cv = 0.0; cv <= 30.0; cv += 0.5) {
        for (std::size_t n = 0; n < s.cells.size(); ++n) {
            const double f = resonance_at_bias(s.cells[n], cv);
            CHECK(f > prev[n]);
            prev[n] = f;
        }
    }
}

TEST_CASE("signature capacity closed forms") {
    CHECK(signature_capacity(48.0, 1.0, 8).to_string() == "28179280429056"); // 48^8
    CHECK(std::abs(signature_capacity(48.0, 1.0, 8).log2() - 45.0) < 0.5);   // about 2^45
    CHECK(signature_capacity(1.0, 1.0, 5) == BigUint(1));
    CHECK(signature_capacity(3.0, 1.0, 2) == BigUint(9));
    // default 26-level quantization over the signature range
    CHECK(signature_capacity(kSvRange, kSvStep, 8).to_string() == BigUint::pow(26, 8).to_string());
    CHECK_THROWS_AS(signature_capacity(0.0, 1.0, 2), ConfigError);
    CHECK_THROWS_AS(signature_capacity(1.0, 1.0, 0), ConfigError);
}

TEST_CASE("capacity formula matches exhaustive lattice enumeration") {
    for (int cells = 1; cells <= 3; ++cells) {
        for (int ratio = 1; ratio <= 5; ++ratio) {
            const double range = 10.0;
            const double step = range / ratio;
            // walk the whole quantized lattice: every sv tuple with each
            // coordinate on {0, step, 2 step, ...} inside [0, range)
            int levels = 0;
            while (levels * step < range - 1e-9)
                ++levels;
            std::vector<int> odo(cells, 0);
            std::uint64_t count = 0;
            while (true) {
                ++count;
                int pos = 0;
                while (pos < cells && ++odo[pos] == levels) {
                    odo[pos] = 0;
                    ++pos;
                }
                if (pos == cells)
                    break;
            }
            CHECK(signature_capacity(range, step, cells).to_u64() == count);
        }
    }
}

TEST_CASE("codes a quantization step apart give distinct responses") {
    const Surface s = default_surface();
    const double cv = channel_select_cv(s, wifi_channel_center_hz(5), kSvRange / 2);
    const auto grid = csi_grid(wifi_channel_center_hz(5));
    RngStream rng(7);

    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd sv(s.cell_count());
        for (int n = 0; n < s.cell_count(); ++n)
            sv[n] = kSvStep * static_cast<double>(rng.uniform_index(kSvLevels));
        Eigen::VectorXd sv2 = sv;
        const int cell = static_cast<int>(rng.uniform_index(s.cell_count()));
        sv2[cell] = sv[cell] >= kSvStep ? sv[cell] - kSvStep : sv[cell] + kSvStep;

        const auto r1 = response(s, ControlCode{cv, sv}, grid);
        const auto r2 = response(s, ControlCode{cv, sv2}, grid);
        CHECK((r1.values - r2.values).norm() > 0.0);
    }
}

TEST_CASE("surface json round trip") {
    const Surface s = default_surface();
    const auto path = std::filesystem::temp_directory_path() / "rffi_surface_test.json";
    surface_to_json_file(s, path);
    const Surface t = surface_from_json_file(path);
    REQUIRE(t.cell_count() == s.cell_count());
    CHECK(t.baseline_delay == doctest::Approx(s.baseline_delay).epsilon(1e-15));
    for (int n = 0; n < s.cell_count(); ++n) {
        CHECK(t.cells[n].inductance == doctest::Approx(s.cells[n].inductance).epsilon(1e-15));
        CHECK(t.cells[n].coupling_gain == doctest::Approx(s.cells[n].coupling_gain).epsilon(1e-15));
    }
    std::filesystem::remove(path);
}
