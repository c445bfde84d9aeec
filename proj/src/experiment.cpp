// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/experiment.hpp"

#include <chrono>
#include <fstream>

#include "rffi/centroid.hpp"
#include "rffi/errors.hpp"
#include "rffi/sha256.hpp"

namespace rffi::experiment {

using nlohmann::json;

Kind kind_from_string(const std::string& name) {
    if (name == "capacity_208")
        return Kind::capacity_208;
    if (name == "distance")
        return Kind::distance;
    if (name == "orientation")
        return Kind::orientation;
    if (name == "through_wall")
        return Kind::through_wall;
    if (name == "multi_channel_96")
        return Kind::multi_channel_96;
    if (name == "attack")
        return Kind::attack;
    if (name == "custom")
        return Kind::custom;
    throw ConfigError("unknown experiment '" + name + "'");
}

std::string kind_to_string(Kind kind) {
    switch (kind) {
    case Kind::capacity_208:
        return "capacity_208";
    case Kind::distance:
        return "distance";
    case Kind::orientation:
        return "orientation";
    case Kind::through_wall:
        return "through_wall";
    case Kind::multi_channel_96:
        return "multi_channel_96";
    case Kind::attack:
        return "attack";
    case Kind::custom:
        return "custom";
    }
    throw ConfigError("unknown experiment kind");
}

int ExperimentConfig::effective_packets() const {
    if (packets_per_code > 0)
        return packets_per_code;
    return paper_scale ? 500 : 100;
}

double ExperimentConfig::effective_test_fraction() const {
    if (test_fraction > 0)
        return test_fraction;
    switch (kind) {
    case Kind::multi_channel_96:
        return 0.5;
    default:
        return 0.8; // 20 percent of the data trains
    }
}

classifier::TrainConfig ExperimentConfig::train_config() const {
    classifier::TrainConfig tc;
    tc.epochs = epochs > 0 ? epochs : 30;
    tc.batch_size = batch_size > 0 ? batch_size : 64;
    tc.learning_rate = learning_rate > 0 ? learning_rate : 0.05;
    tc.momentum = 0.9;
    tc.seed = seed;
    tc.train_fraction = 1.0 - effective_test_fraction();
    tc.validation_fraction = 0.1;
    return tc;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open experiment config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("experiment config " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    json merged = j;
    if (j.contains("include")) {
        const auto base_path = base_dir / j.at("include").get<std::string>();
        std::ifstream in(base_path);
        if (!in)
            throw ConfigError("config include not found: " + base_path.string());
        json base;
        try {
            in >> base;
        } catch (const json::exception& e) {
            throw ConfigError("config include " + base_path.string() + ": " + e.what());
        }
        merged = base;
        for (const auto& [key, value] : j.items())
            if (key != "include")
                merged[key] = value;
    }

    ExperimentConfig cfg;
    try {
        cfg.kind = kind_from_string(merged.value("experiment", "capacity_208"));
        cfg.seed = merged.value("seed", std::uint64_t{1});
        cfg.paper_scale = merged.value("paper_scale", false);
        cfg.packets_per_code = merged.value("packets_per_code", 0);
        cfg.test_fraction = merged.value("test_fraction", 0.0);
        cfg.epochs = merged.value("epochs", 0);
        cfg.learning_rate = merged.value("learning_rate", 0.0);
        cfg.batch_size = merged.value("batch_size", 0);
        if (merged.contains("snr_db"))
            cfg.snr_db = merged.at("snr_db").get<double>();
        cfg.distances_m = merged.value("distances_m", std::vector<double>{});
        cfg.orientations_deg = merged.value("orientations_deg", std::vector<double>{});
        cfg.wifi_channels = merged.value("wifi_channels", std::vector<int>{});
        cfg.n_codes = merged.value("n_codes", 0);
        cfg.classifier_backend = merged.value("classifier_backend", "");
        cfg.scenario_overrides = merged.value("scenario", json::object());
        cfg.output_dir = merged.value("output_dir", std::string("."));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
    if (cfg.test_fraction < 0 || cfg.test_fraction >= 1)
        throw ConfigError("experiment config: test_fraction must be in [0, 1)");
    return cfg;
}

json ExperimentConfig::to_json() const {
    return json{{"experiment", kind_to_string(kind)},
                {"seed", seed},
                {"paper_scale", paper_scale},
                {"packets_per_code", effective_packets()},
                {"test_fraction", effective_test_fraction()},
                {"epochs", train_config().epochs},
                {"learning_rate", train_config().learning_rate},
                {"batch_size", train_config().batch_size},
                {"snr_db", snr_db ? json(*snr_db) : json(nullptr)},
                {"distances_m", distances_m.empty() ? std::vector<double>{7.0, 27.0, 53.0} : distances_m},
                {"orientations_deg",
                 orientations_deg.empty() ? std::vector<double>{0.0, 30.0, 60.0, 90.0} : orientations_deg},
                {"wifi_channels", wifi_channels.empty() ? std::vector<int>{1, 3, 5, 7} : wifi_channels},
                {"n_codes", n_codes},
                {"classifier_backend", classifier_backend.empty() ? "cnn" : classifier_backend},
                {"scenario", scenario_overrides}};
}

// ---------------------------------------------------------------------------
// sessions

namespace {

struct SessionSpec {
    char label = 'A';
    double distance_m = 2.54;
    double orientation_deg = 0.0;
    int wifi_channel = 5;
    int walls = 0;
    std::uint32_t scenario_id = 0;
};

phy::LinkSession build_session(const SessionSpec& spec, const ExperimentConfig& cfg,
                               std::uint64_t session_seed) {
    phy::LinkSession s;
    s.surface = cfg.scenario_overrides.contains("surface")
                    ? surface::surface_from_json_file(cfg.scenario_overrides.at("surface").get<std::string>())
                    : surface::default_surface();
    s.wifi_channel = spec.wifi_channel;
    const double center = wifi_channel_center_hz(spec.wifi_channel);
    s.cv = surface::channel_select_cv(s.surface, center, surface::kSvRange / 2);
    s.grid = csi_grid(center);
    s.pilot = phy::PilotSymbol::constant(s.grid.size());
    s.scenario_id = spec.scenario_id;

    s.geometry.tx_position = {0.0, 0.0};
    s.geometry.rx_position = {spec.distance_m, 0.0};
    s.geometry.orientation_deg = spec.orientation_deg;
    for (int w = 0; w < spec.walls; ++w)
        s.geometry.wall_attenuations_db.push_back(6.0);

    // the Rician factor follows from the moving-object population
    const double direct_power = 0.2, path_power = 1.0;
    s.params.k_rician = channel::rician_k_from_objects(direct_power, path_power, s.geometry);

    const auto& ov = cfg.scenario_overrides;
    if (ov.contains("distance_m"))
        s.geometry.rx_position = {ov.at("distance_m").get<double>(), 0.0};
    if (ov.contains("orientation_deg"))
        s.geometry.orientation_deg = ov.at("orientation_deg").get<double>();
    if (ov.contains("moving_objects")) {
        s.geometry.moving_objects = ov.at("moving_objects").get<int>();
        s.params.k_rician = channel::rician_k_from_objects(direct_power, path_power, s.geometry);
    }
    if (ov.contains("wall_attenuations_db"))
        s.geometry.wall_attenuations_db = ov.at("wall_attenuations_db").get<std::vector<double>>();
    if (ov.contains("tap_count"))
        s.params.tap_count = ov.at("tap_count").get<int>();
    if (ov.contains("shadowing_sigma_db"))
        s.params.shadowing_sigma_db = ov.at("shadowing_sigma_db").get<double>();
    if (ov.contains("dynamic"))
        s.dynamic = ov.at("dynamic").get<bool>();

    if (cfg.snr_db)
        phy::set_noise_for_snr(s, *cfg.snr_db, RngStream(session_seed));
    else
        phy::apply_link_budget(s, phy::LinkBudget{}, RngStream(session_seed));
    return s;
}

SessionSpec spec_for_label(char label) {
    SessionSpec spec;
    spec.label = label;
    switch (label) {
    case 'A': // conference room
        spec.distance_m = 2.54;
        break;
    case 'B': // corridor, distance varied by the caller
        spec.distance_m = 7.0;
        break;
    case 'C': // next room, one wall
        spec.distance_m = 3.3;
        spec.walls = 1;
        break;
    case 'D': // orientation rig
        spec.distance_m = 2.54;
        break;
    default:
        throw ConfigError(std::string("unknown scenario label '") + label + "'");
    }
    return spec;
}

std::uint64_t session_seed_of(const ExperimentConfig& cfg, std::uint64_t index) {
    return RngStream(cfg.seed).child("session").child(index).key();
}

} // namespace

phy::LinkSession scenario_session(char label, const ExperimentConfig& cfg, std::uint64_t session_seed) {
    return build_session(spec_for_label(label), cfg, session_seed);
}

std::vector<surface::ControlCode> code_grid_208(const surface::Surface& surface) {
    std::vector<surface::ControlCode> codes;
    for (int cell = 0; cell < surface.cell_count(); ++cell) {
        for (int level = 0; level < surface::kSvLevels; ++level) {
            Eigen::VectorXd sv = Eigen::VectorXd::Zero(surface.cell_count());
            sv[cell] = level * surface::kSvStep;
            codes.push_back(surface::ControlCode{0.0, sv});
        }
    }
    return codes;
}

std::vector<surface::ControlCode> spread_codes(const surface::Surface& surface, int n) {
    if (n < 1)
        throw ConfigError("spread_codes: need at least one code");
    std::vector<surface::ControlCode> codes;
    const int cells = surface.cell_count();
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd sv = Eigen::VectorXd::Zero(cells);
        const int tier = k / cells;
        const int level = surface::kSvLevels - 1 - 8 * tier;
        if (level < 1)
            throw ConfigError("spread_codes: too many codes for the level grid");
        sv[k % cells] = surface::kSvStep * static_cast<double>(level);
        codes.push_back(surface::ControlCode{0.0, sv});
    }
    return codes;
}

// ---------------------------------------------------------------------------
// classification runs

namespace {

struct ClassRun {
    metrics::EvaluationReport report;
    json extra;
};

ClassRun classification_run(const phy::Dataset& ds, const ExperimentConfig& cfg) {
    const Eigen::MatrixXd features = classifier::features_from_dataset(ds);
    const std::vector<int> labels = classifier::labels_from_dataset(ds);
    const int n_classes = ds.n_classes();
    const auto tc = cfg.train_config();

    ClassRun out;
    std::vector<int> test_idx;
    Eigen::MatrixXd test_scores;

    const std::string backend = cfg.classifier_backend.empty() ? "cnn" : cfg.classifier_backend;
    if (backend == "cnn") {
        classifier::NetworkConfig net;
        net.dense_sizes = {2048, 1024, n_classes};
        const auto result = classifier::train<float>(features, labels, net, tc);
        test_idx = result.split.test;

        Eigen::MatrixXd test_features(features.rows(), static_cast<Eigen::Index>(test_idx.size()));
        for (std::size_t i = 0; i < test_idx.size(); ++i)
            test_features.col(static_cast<Eigen::Index>(i)) = features.col(test_idx[i]);
        test_scores = classifier::predict_probs(net, result.params, test_features);

        json history = json::array();
        for (const auto& e : result.history)
            history.push_back(json{{"epoch", e.epoch}, {"train_risk", e.train_risk}, {"val_risk", e.val_risk}});
        out.extra["history"] = std::move(history);
        out.extra["best_epoch"] = result.best_epoch;
        out.extra["param_count"] = classifier::param_count(net);
    } else if (backend == "centroid") {
        const auto split =
            classifier::stratified_split(labels, tc.train_fraction, 0.0, RngStream(tc.seed).child("split"));
        std::vector<int> train_labels;
        Eigen::MatrixXd train_features(features.rows(), static_cast<Eigen::Index>(split.train.size()));
        for (std::size_t i = 0; i < split.train.size(); ++i) {
            train_features.col(static_cast<Eigen::Index>(i)) = features.col(split.train[i]);
            train_labels.push_back(labels[static_cast<std::size_t>(split.train[i])]);
        }
        const auto model = classifier::centroid_fit(train_features, train_labels, n_classes);
        test_idx = split.test;
        test_scores.resize(n_classes, static_cast<Eigen::Index>(test_idx.size()));
        for (std::size_t i = 0; i < test_idx.size(); ++i)
            test_scores.col(static_cast<Eigen::Index>(i)) =
                classifier::centroid_posteriors(model, features.col(test_idx[i]));
    } else {
        throw ConfigError("unknown classifier backend '" + backend + "'");
    }

    std::vector<int> test_labels;
    test_labels.reserve(test_idx.size());
    for (int i : test_idx)
        test_labels.push_back(labels[static_cast<std::size_t>(i)]);
    out.report = metrics::evaluate(test_scores, test_labels);
    out.extra["train_size"] = labels.size() - test_idx.size();
    out.extra["test_size"] = test_idx.size();
    return out;
}

json summary_row(const metrics::EvaluationReport& r) {
    return json{{"accuracy", r.accuracy}, {"f1_micro", r.f1.micro},   {"f1_macro", r.f1.macro},
                {"auc_micro", r.auc_micro}, {"auc_macro", r.auc_macro}};
}

// sweep experiments: one classification run per stop
RunReport sweep_runs(const ExperimentConfig& cfg, char label, const std::string& param_name,
                     const std::vector<double>& stops) {
    RunReport report;
    json rows = json::array();
    metrics::EvaluationReport last;
    const int n_codes = cfg.n_codes > 0 ? cfg.n_codes : 12;
    for (std::size_t i = 0; i < stops.size(); ++i) {
        SessionSpec spec = spec_for_label(label);
        if (param_name == "distance_m")
            spec.distance_m = stops[i];
        else if (param_name == "orientation_deg")
            spec.orientation_deg = stops[i];
        spec.scenario_id = static_cast<std::uint32_t>(i);
        const auto session_seed = session_seed_of(cfg, i);
        const auto session = build_session(spec, cfg, session_seed);
        const auto codes = spread_codes(session.surface, n_codes);
        const auto ds =
            phy::generate_dataset(session, codes, cfg.effective_packets(), RngStream(session_seed));
        auto run = classification_run(ds, cfg);
        json row = summary_row(run.report);
        row[param_name] = stops[i];
        rows.push_back(std::move(row));
        last = std::move(run.report);
    }
    report.eval = std::move(last);
    report.extra["rows"] = std::move(rows);
    report.extra["param"] = param_name;
    return report;
}

RunReport run_attack_experiment(const ExperimentConfig& cfg) {
    RunReport report;
    const auto session_seed = session_seed_of(cfg, 0);
    SessionSpec spec = spec_for_label('A');
    const auto session = build_session(spec, cfg, session_seed);
    const int n_codes = cfg.n_codes > 0 ? cfg.n_codes : 12;
    const auto codes = spread_codes(session.surface, n_codes);
    const int packets = cfg.effective_packets();

    // the server enrolls the node's full code set
    auth::ServerConfig server_cfg;
    server_cfg.fit.backend = (cfg.classifier_backend == "centroid") ? auth::ClassifierModel::Backend::centroid
                                                                    : auth::ClassifierModel::Backend::cnn;
    server_cfg.fit.train = cfg.train_config();
    server_cfg.fit.train.train_fraction = 0.8;
    auth::Server server(server_cfg);
    const auto enroll_ds = phy::generate_dataset(session, codes, packets, RngStream(session_seed));
    server.enroll("alice", enroll_ds);

    // report the enrollment model quality as the run's evaluation
    {
        ExperimentConfig eval_cfg = cfg;
        eval_cfg.classifier_backend = cfg.classifier_backend.empty() ? "cnn" : cfg.classifier_backend;
        auto run = classification_run(enroll_ds, eval_cfg);
        report.eval = std::move(run.report);
        report.extra["enrollment"] = std::move(run.extra);
    }

    const double center = 0.5 * (session.grid[0] + session.grid[session.grid.size() - 1]);
    report.extra["guard_zone_m"] = attack::guard_zone_radius(center);

    const int replay_packets = 500;
    const int target = 1;
    RngStream rng(cfg.seed);

    {
        attack::AttackerConfig distant;
        distant.position = session.geometry.tx_position + Eigen::Vector2d{0.0, 3.0};
        const auto r = attack::run_signal_replay(session, session_seed, server, "alice", codes[target],
                                                 target, distant, replay_packets, 25, rng.child("sr-far"));
        report.extra["signal_replay_distant"] = attack::attack_report_json(r);
    }
    {
        attack::AttackerConfig close;
        close.position = session.geometry.tx_position + Eigen::Vector2d{0.003, 0.0};
        const auto r = attack::run_signal_replay(session, session_seed, server, "alice", codes[target],
                                                 target, close, replay_packets, 25, rng.child("sr-near"));
        report.extra["signal_replay_colocated"] = attack::attack_report_json(r);
    }
    {
        attack::AttackerConfig at;
        at.position = session.geometry.tx_position + Eigen::Vector2d{0.0, 3.0};
        const int secret = n_codes - 1;
        for (int k = 0; k < secret; ++k)
            at.known_codes.emplace_back(codes[static_cast<std::size_t>(k)], static_cast<std::uint32_t>(k));

        const auto eaves =
            attack::eavesdrop_dataset(session, session_seed, at, packets, rng.child("eavesdrop"));
        Eigen::MatrixXd targets(session.surface.cell_count(), eaves.records.size());
        for (std::size_t i = 0; i < eaves.records.size(); ++i)
            targets.col(static_cast<Eigen::Index>(i)) = at.known_codes[eaves.records[i].code_label].first.sv;

        classifier::TrainConfig tc = cfg.train_config();
        tc.epochs = cfg.epochs > 0 ? cfg.epochs : 40;
        tc.batch_size = 32;
        tc.learning_rate = 0.005;
        tc.train_fraction = 0.9;
        tc.validation_fraction = 0.1;
        const auto estimator = attack::train_sv_estimator(eaves, targets, tc);

        const auto sv_hat = attack::estimate_secret_sv(estimator, session, session_seed, at,
                                                       codes[static_cast<std::size_t>(secret)], packets,
                                                       rng.child("secret"));
        const auto r = attack::run_feature_replay(session, session_seed, server, "alice", sv_hat,
                                                  codes[static_cast<std::size_t>(secret)], secret, at,
                                                  replay_packets, 25, rng.child("fr"));
        json fr = attack::attack_report_json(r);
        fr["estimator_validation_risk"] = estimator.validation_risk;
        fr["sv_error"] = (sv_hat - codes[static_cast<std::size_t>(secret)].sv).norm();
        // the separability analysis: 12 tests of 25 packets
        json boxes = json::array();
        for (std::size_t t = 0; t < std::min<std::size_t>(12, r.tests.size()); ++t)
            boxes.push_back(json{{"min", r.tests[t].min},
                                 {"q1", r.tests[t].q1},
                                 {"median", r.tests[t].median},
                                 {"q3", r.tests[t].q3},
                                 {"max", r.tests[t].max}});
        fr["box_tests"] = std::move(boxes);
        report.extra["feature_replay"] = std::move(fr);
    }
    return report;
}

} // namespace

phy::Dataset generate_primary_dataset(const ExperimentConfig& cfg) {
    const auto session_seed = session_seed_of(cfg, 0);
    switch (cfg.kind) {
    case Kind::capacity_208: {
        const auto session = scenario_session('A', cfg, session_seed);
        return phy::generate_dataset(session, code_grid_208(session.surface), cfg.effective_packets(),
                                     RngStream(session_seed));
    }
    case Kind::distance: {
        SessionSpec spec = spec_for_label('B');
        spec.distance_m = cfg.distances_m.empty() ? 7.0 : cfg.distances_m.front();
        const auto session = build_session(spec, cfg, session_seed);
        return phy::generate_dataset(session, spread_codes(session.surface, cfg.n_codes > 0 ? cfg.n_codes : 12),
                                     cfg.effective_packets(), RngStream(session_seed));
    }
    default: {
        const auto session = scenario_session(cfg.kind == Kind::through_wall ? 'C' : 'A', cfg, session_seed);
        return phy::generate_dataset(session, spread_codes(session.surface, cfg.n_codes > 0 ? cfg.n_codes : 12),
                                     cfg.effective_packets(), RngStream(session_seed));
    }
    }
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();

    RunReport report;
    switch (cfg.kind) {
    case Kind::capacity_208: {
        const auto session_seed = session_seed_of(cfg, 0);
        const auto session = scenario_session('A', cfg, session_seed);
        const auto ds = phy::generate_dataset(session, code_grid_208(session.surface),
                                              cfg.effective_packets(), RngStream(session_seed));
        auto run = classification_run(ds, cfg);
        report.eval = std::move(run.report);
        report.extra = std::move(run.extra);
        report.extra["codes"] = 208;
        break;
    }
    case Kind::distance: {
        const auto stops = cfg.distances_m.empty() ? std::vector<double>{7.0, 27.0, 53.0} : cfg.distances_m;
        report = sweep_runs(cfg, 'B', "distance_m", stops);
        break;
    }
    case Kind::orientation: {
        const auto stops =
            cfg.orientations_deg.empty() ? std::vector<double>{0.0, 30.0, 60.0, 90.0} : cfg.orientations_deg;
        report = sweep_runs(cfg, 'D', "orientation_deg", stops);
        break;
    }
    case Kind::through_wall: {
        const auto session_seed = session_seed_of(cfg, 0);
        const auto session = scenario_session('C', cfg, session_seed);
        const int n_codes = cfg.n_codes > 0 ? cfg.n_codes : 12;
        const auto ds = phy::generate_dataset(session, spread_codes(session.surface, n_codes),
                                              cfg.effective_packets(), RngStream(session_seed));
        auto run = classification_run(ds, cfg);
        report.eval = std::move(run.report);
        report.extra = std::move(run.extra);
        report.extra["walls_db"] = session.geometry.wall_attenuations_db;
        break;
    }
    case Kind::multi_channel_96: {
        const auto channels = cfg.wifi_channels.empty() ? std::vector<int>{1, 3, 5, 7} : cfg.wifi_channels;
        const int n_codes = cfg.n_codes > 0 ? cfg.n_codes : 24;
        phy::Dataset merged;
        merged.subcarriers = 30;
        merged.seed = cfg.seed;
        for (std::size_t c = 0; c < channels.size(); ++c) {
            SessionSpec spec = spec_for_label('A');
            spec.wifi_channel = channels[c];
            spec.scenario_id = static_cast<std::uint32_t>(c);
            const auto session_seed = session_seed_of(cfg, c);
            const auto session = build_session(spec, cfg, session_seed);
            const auto codes = spread_codes(session.surface, n_codes);
            auto ds = phy::generate_dataset(session, codes, cfg.effective_packets(), RngStream(session_seed));
            for (auto& r : ds.records) {
                r.code_label += static_cast<std::uint32_t>(c) * static_cast<std::uint32_t>(n_codes);
                merged.records.push_back(std::move(r));
            }
        }
        merged.validate();
        auto run = classification_run(merged, cfg);
        report.eval = std::move(run.report);
        report.extra = std::move(run.extra);
        report.extra["channels"] = channels;
        report.extra["classes"] = static_cast<int>(channels.size()) * n_codes;
        break;
    }
    case Kind::attack:
        report = run_attack_experiment(cfg);
        break;
    case Kind::custom: {
        const auto session_seed = session_seed_of(cfg, 0);
        const std::string label = cfg.scenario_overrides.value("label", "A");
        const auto session = scenario_session(label.empty() ? 'A' : label[0], cfg, session_seed);
        const int n_codes = cfg.n_codes > 0 ? cfg.n_codes : 12;
        const auto ds = phy::generate_dataset(session, spread_codes(session.surface, n_codes),
                                              cfg.effective_packets(), RngStream(session_seed));
        auto run = classification_run(ds, cfg);
        report.eval = std::move(run.report);
        report.extra = std::move(run.extra);
        report.extra["scenario_label"] = label;
        break;
    }
    }

    report.seed = cfg.seed;
    report.config_echo = cfg.to_json();
    report.config_digest = hex_digest(sha256(report.config_echo.dump()));
    report.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json j{{"config", report.config_echo},
           {"config_digest", report.config_digest},
           {"seed", report.seed},
           {"metrics", metrics::report_to_json(report.eval)},
           {"extra", report.extra}};
    {
        std::ofstream out(dir / "report.json");
        if (!out)
            throw DataError("cannot write " + (dir / "report.json").string());
        out << j.dump(2) << "\n";
    }
    {
        // wall clock lives outside the canonical report so reruns stay
        // byte-identical
        std::ofstream out(dir / "timing.log");
        out << "wall_clock_s " << report.wall_clock_s << "\n";
    }
}

void emit_plots_csv(const RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "roc_micro.csv");
        out.precision(10);
        out << "threshold,fpr,tpr\n";
        for (const auto& p : report.eval.roc_micro)
            out << p.threshold << "," << p.fpr << "," << p.tpr << "\n";
    }
    if (report.extra.contains("rows")) {
        const std::string param = report.extra.value("param", "x");
        std::ofstream out(dir / ("accuracy_vs_" + param + ".csv"));
        out.precision(10);
        out << param << ",accuracy,f1_micro,f1_macro,auc_micro,auc_macro\n";
        for (const auto& row : report.extra.at("rows"))
            out << row.at(param).get<double>() << "," << row.at("accuracy").get<double>() << ","
                << row.at("f1_micro").get<double>() << "," << row.at("f1_macro").get<double>() << ","
                << row.at("auc_micro").get<double>() << "," << row.at("auc_macro").get<double>() << "\n";
    }
    if (report.extra.contains("feature_replay")) {
        {
            std::ofstream out(dir / "mahalanobis_boxes.csv");
            out.precision(10);
            out << "test,min,q1,median,q3,max\n";
            const auto& boxes = report.extra.at("feature_replay").at("box_tests");
            for (std::size_t i = 0; i < boxes.size(); ++i) {
                const auto& b = boxes[i];
                out << i << "," << b.at("min").get<double>() << "," << b.at("q1").get<double>() << ","
                    << b.at("median").get<double>() << "," << b.at("q3").get<double>() << ","
                    << b.at("max").get<double>() << "\n";
            }
        }
        {
            std::ofstream out(dir / "attack_acceptance.csv");
            out << "attack,packets,accepted,acceptance_rate\n";
            for (const char* key : {"signal_replay_distant", "signal_replay_colocated", "feature_replay"}) {
                if (!report.extra.contains(key))
                    continue;
                const auto& a = report.extra.at(key);
                out << key << "," << a.at("packets").get<int>() << "," << a.at("accepted").get<int>() << ","
                    << a.at("acceptance_rate").get<double>() << "\n";
            }
        }
    }
}

} // namespace rffi::experiment
