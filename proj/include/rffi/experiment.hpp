// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_EXPERIMENT_HPP
#define RFFI_EXPERIMENT_HPP

#include <optional>
#include <string>

#include "rffi/attack.hpp"
#include "rffi/auth.hpp"
#include "rffi/metrics.hpp"
#include "rffi/phy.hpp"

namespace rffi::experiment {

/// Built-in experiments mirroring the evaluation campaign: signature
/// capacity, distance, orientation, blockage, multi-channel and the replay
/// attacks.
enum class Kind { capacity_208, distance, orientation, through_wall, multi_channel_96, attack, custom };

Kind kind_from_string(const std::string& name);
std::string kind_to_string(Kind kind);

struct ExperimentConfig {
    Kind kind = Kind::capacity_208;
    std::uint64_t seed = 1;
    bool paper_scale = false; // restore the full packet counts

    // 0 / empty means "kind default"
    int packets_per_code = 0;
    double test_fraction = 0.0;
    int epochs = 0;
    double learning_rate = 0.0;
    int batch_size = 0;
    std::optional<double> snr_db;          // overrides the link budget
    std::vector<double> distances_m;       // distance experiment stops
    std::vector<double> orientations_deg;  // orientation experiment stops
    std::vector<int> wifi_channels;        // multi-channel experiment
    int n_codes = 0;                // code count for the 12-code experiments
    std::string classifier_backend; // "cnn" (default) or "centroid"
    nlohmann::json scenario_overrides = nlohmann::json::object(); // merged into the scenario

    std::filesystem::path output_dir = ".";

    /// Load from JSON; an "include" key pulls a base config (relative to the
    /// file) that the document's own keys override.
    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

    /// Canonical echo: every effective knob, defaults resolved.
    nlohmann::json to_json() const;

    int effective_packets() const;
    double effective_test_fraction() const;
    classifier::TrainConfig train_config() const;
};

struct RunReport {
    nlohmann::json config_echo;
    std::string config_digest; // sha256 of the canonical config echo
    std::uint64_t seed = 0;
    metrics::EvaluationReport eval;
    nlohmann::json extra;     // per-experiment tables
    double wall_clock_s = 0.0; // logged separately; not part of the canonical file
};

/// Scenario presets named after the floor-plan positions: A conference room,
/// B corridor (distance), C through-wall, D orientation.
phy::LinkSession scenario_session(char label, const ExperimentConfig& cfg, std::uint64_t session_seed);

/// The 208-code campaign: one cell active at a time, all quantization levels.
std::vector<surface::ControlCode> code_grid_208(const surface::Surface& surface);

/// n well-separated codes over the (cell, level) grid.
std::vector<surface::ControlCode> spread_codes(const surface::Surface& surface, int n);

/// Generate, train, evaluate, and assemble the report. The attack experiment
/// additionally runs the adversary pipeline.
RunReport run_experiment(const ExperimentConfig& cfg);

/// report.json (canonical, byte-reproducible for a config + seed) plus a
/// timing.log sidecar carrying the wall clock.
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// Plot-ready CSVs: micro-ROC points, per-stop accuracy tables, attack
/// boxes, whichever the experiment produced.
void emit_plots_csv(const RunReport& report, const std::filesystem::path& dir);

/// Dataset for the experiment's primary session (used by the generate
/// subcommand and the determinism checks).
phy::Dataset generate_primary_dataset(const ExperimentConfig& cfg);

} // namespace rffi::experiment

#endif
