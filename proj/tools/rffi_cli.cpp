// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rffi/experiment.hpp"
#include "rffi/model_io.hpp"

namespace {

using namespace rffi;

experiment::ExperimentConfig load_config(const std::string& config_path, const std::string& kind,
                                         std::uint64_t seed, bool paper_scale, int packets) {
    experiment::ExperimentConfig cfg;
    if (!config_path.empty())
        cfg = experiment::ExperimentConfig::from_json_file(config_path);
    if (!kind.empty())
        cfg.kind = experiment::kind_from_string(kind);
    if (seed != 0)
        cfg.seed = seed;
    if (paper_scale)
        cfg.paper_scale = true;
    if (packets > 0)
        cfg.packets_per_code = packets;
    return cfg;
}

int cmd_generate(const experiment::ExperimentConfig& cfg, const std::string& out, bool csv) {
    const auto ds = experiment::generate_primary_dataset(cfg);
    phy::export_dataset(ds, out);
    if (csv)
        phy::export_dataset_csv(ds, out + ".csv");
    std::cout << "wrote " << ds.records.size() << " records (" << ds.n_classes() << " classes) to " << out
              << "\n";
    return 0;
}

int cmd_train(const std::string& dataset_path, const std::string& out, const experiment::ExperimentConfig& cfg,
              const std::string& history_csv) {
    const auto ds = phy::import_dataset(dataset_path);
    const Eigen::MatrixXd features = classifier::features_from_dataset(ds);
    const auto labels = classifier::labels_from_dataset(ds);

    classifier::NetworkConfig net;
    net.dense_sizes = {2048, 1024, ds.n_classes()};
    const auto tc = cfg.train_config();
    const auto result = classifier::train<float>(features, labels, net, tc);

    nlohmann::json metadata{{"seed", tc.seed},
                            {"best_epoch", result.best_epoch},
                            {"best_val_risk", result.best_val_risk},
                            {"dataset", dataset_path},
                            {"classes", ds.n_classes()}};
    classifier::save_model(out, net, result.params, metadata);
    if (!history_csv.empty())
        classifier::export_history_csv(result.history, history_csv);
    std::cout << "trained " << classifier::param_count(net) << " parameters; best epoch "
              << result.best_epoch << " (validation risk " << result.best_val_risk << ") -> " << out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& dataset_path, const std::string& model_path, const std::string& out) {
    const auto ds = phy::import_dataset(dataset_path);
    const auto model = classifier::load_model(model_path);
    const Eigen::MatrixXd features = classifier::features_from_dataset(ds, model.config.input_length);
    const auto labels = classifier::labels_from_dataset(ds);
    const Eigen::MatrixXd probs = classifier::predict_probs(model.config, model.params, features);
    const auto report = metrics::evaluate(probs, labels);

    std::cout << metrics::report_csv_header() << "\n" << metrics::report_csv_row(report) << "\n";
    if (!out.empty()) {
        std::ofstream f(out);
        f << metrics::report_to_json(report).dump(2) << "\n";
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_auth_demo(std::uint64_t seed, const std::string& out_dir) {
    // a compact end-to-end pass over the three protocols
    experiment::ExperimentConfig cfg;
    cfg.seed = seed == 0 ? 1 : seed;
    const auto session_seed = RngStream(cfg.seed).child("session").child(std::uint64_t{0}).key();
    const auto session = experiment::scenario_session('A', cfg, session_seed);
    const auto codes = experiment::spread_codes(session.surface, 6);

    auth::Server server;
    const auto creds =
        server.enroll("node-a", phy::generate_dataset(session, codes, 30, RngStream(session_seed)));

    const auto p1 =
        server.authenticate_p1(phy::simulate_packet(session, codes[0], RngStream(session_seed), 1), "node-a");
    std::vector<Eigen::VectorXcd> seq;
    for (int i = 0; i < server.config().protocol2_n; ++i)
        seq.push_back(phy::simulate_packet(session, codes[static_cast<std::size_t>(i)],
                                           RngStream(session_seed), 10 + static_cast<std::uint64_t>(i)));
    const auto p2 = server.authenticate_p2(seq, "node-a", creds.server_digest);
    const auto ghost = server.authenticate_p1(phy::simulate_packet(session, codes[1], RngStream(session_seed), 2),
                                              "node-z");

    std::cout << "protocol 1 (enrolled code): " << (p1.accepted ? "accepted" : "rejected") << "\n"
              << "protocol 2 (" << server.config().protocol2_n
              << " designated codes): " << (p2.accepted ? "accepted" : "rejected") << "\n"
              << "protocol 1 (unknown device): " << (ghost.accepted ? "accepted" : "rejected") << "\n";

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        server.save_database(std::filesystem::path(out_dir) / "enrollment_db.json");
        std::ofstream f(std::filesystem::path(out_dir) / "transcripts.json");
        f << nlohmann::json{{"p1", auth::transcript_to_json(p1.transcript)},
                            {"p2", auth::transcript_to_json(p2.transcript)},
                            {"unknown_device", auth::transcript_to_json(ghost.transcript)}}
                 .dump(2)
          << "\n";
        std::cout << "wrote " << out_dir << "/enrollment_db.json and transcripts.json\n";
    }
    return (p1.accepted && p2.accepted && !ghost.accepted) ? 0 : 1;
}

int cmd_response(const std::string& surface_path, double cv, const std::string& sv_csv, int channel,
                 const std::string& out) {
    const auto surf =
        surface_path.empty() ? surface::default_surface() : surface::surface_from_json_file(surface_path);
    Eigen::VectorXd sv = Eigen::VectorXd::Zero(surf.cell_count());
    if (!sv_csv.empty()) {
        std::stringstream ss(sv_csv);
        std::string item;
        int n = 0;
        while (std::getline(ss, item, ',') && n < surf.cell_count())
            sv[n++] = std::stod(item);
    }
    const double effective_cv =
        cv >= 0 ? cv : surface::channel_select_cv(surf, wifi_channel_center_hz(channel), surface::kSvRange / 2);
    const auto grid = csi_grid(wifi_channel_center_hz(channel));
    const auto response = surface::response(surf, surface::ControlCode{effective_cv, sv}, grid);
    write_response_csv(response, out);
    std::cout << "cv " << effective_cv << " V; wrote " << grid.size() << " rows to " << out << "\n";
    return 0;
}

int cmd_calibrate(const std::string& out) {
    // derive the default device constants and verify the tuning curve
    const auto surf = surface::default_surface();
    std::cout << "calibration point: cv " << surface::kCalibrationCv << " V -> band center "
              << surface::kCalibrationHz / 1e9 << " GHz\n";
    std::cout << "cell  inductance_nH  Q      gain   delay_ps  f(cv=16.1)_GHz\n";
    for (int n = 0; n < surf.cell_count(); ++n) {
        const auto& c = surf.cells[n];
        std::printf("%4d  %12.6f  %6.0f  %.3f  %8.2f  %.6f\n", n, c.inductance * 1e9, c.quality_factor,
                    c.coupling_gain, c.path_delay * 1e12,
                    surface::resonance_at_bias(c, surface::kCalibrationCv) / 1e9);
    }
    for (int ch : {1, 3, 5, 7}) {
        const double cv = surface::channel_select_cv(surf, wifi_channel_center_hz(ch), surface::kSvRange / 2);
        std::printf("channel %2d (%.3f GHz): cv = %.3f V\n", ch, wifi_channel_center_hz(ch) / 1e9, cv);
    }
    if (!out.empty()) {
        surface::surface_to_json_file(surf, out);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_report(const experiment::ExperimentConfig& cfg, const std::string& out_dir) {
    auto report = experiment::run_experiment(cfg);
    const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
    experiment::write_report(report, dir);
    experiment::emit_plots_csv(report, dir);
    std::cout << metrics::report_csv_header() << "\n"
              << metrics::report_csv_row(report.eval) << "\n"
              << "config digest " << report.config_digest << "\n"
              << "wall clock " << report.wall_clock_s << " s\n"
              << "wrote " << (dir / "report.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"metasurface fingerprint injection and authentication simulator"};
    app.require_subcommand(1);

    std::string config_path, kind, out, out_dir, dataset_path, model_path, history_csv;
    std::uint64_t seed = 0;
    bool paper_scale = false, csv = false;
    int packets = 0;

    app.add_option("--config", config_path, "experiment config JSON (supports \"include\")");
    app.add_option("--experiment", kind,
                   "capacity_208|distance|orientation|through_wall|multi_channel_96|attack|custom");
    app.add_option("--seed", seed, "master seed");
    app.add_flag("--paper-scale", paper_scale, "restore the full packet counts");
    app.add_option("--packets", packets, "packets per code");

    auto* gen = app.add_subcommand("generate", "generate a CSI dataset");
    gen->add_option("--out", out, "output dataset file")->required();
    gen->add_flag("--csv", csv, "also write a CSV copy");

    auto* train = app.add_subcommand("train", "train the CNN on a dataset file");
    train->add_option("--dataset", dataset_path, "dataset file")->required();
    train->add_option("--out", out, "output model file")->required();
    train->add_option("--history-csv", history_csv, "per-epoch risk CSV");

    auto* eval = app.add_subcommand("evaluate", "evaluate a model on a dataset");
    eval->add_option("--dataset", dataset_path, "dataset file")->required();
    eval->add_option("--model", model_path, "model file")->required();
    eval->add_option("--out", out, "metrics JSON");

    auto* demo = app.add_subcommand("auth-demo", "run the three protocols end to end");
    demo->add_option("--out-dir", out_dir, "where to write the db and transcripts");

    auto* atk = app.add_subcommand("attack", "run the replay-attack evaluation");
    atk->add_option("--out-dir", out_dir, "report directory");

    auto* rep = app.add_subcommand("report", "run a full experiment and write its report");
    rep->add_option("--out-dir", out_dir, "report directory");

    auto* cal = app.add_subcommand("calibrate", "print the calibrated device constants");
    cal->add_option("--out", out, "also write the surface config JSON");

    std::string surface_path, sv_csv;
    double cv = -1.0;
    int channel = 5;
    auto* resp = app.add_subcommand("response", "export a surface reflection response as CSV");
    resp->add_option("--surface", surface_path, "surface config JSON (default: calibrated 8-cell device)");
    resp->add_option("--cv", cv, "channel-select voltage (default: tuned to --channel)");
    resp->add_option("--sv", sv_csv, "comma-separated signature voltages");
    resp->add_option("--channel", channel, "WiFi channel for the grid");
    resp->add_option("--out", out, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = load_config(config_path, kind, seed, paper_scale, packets);
        if (gen->parsed())
            return cmd_generate(cfg, out, csv);
        if (train->parsed())
            return cmd_train(dataset_path, out, cfg, history_csv);
        if (eval->parsed())
            return cmd_evaluate(dataset_path, model_path, out);
        if (demo->parsed())
            return cmd_auth_demo(seed, out_dir);
        if (atk->parsed()) {
            cfg.kind = rffi::experiment::Kind::attack;
            return cmd_report(cfg, out_dir);
        }
        if (rep->parsed())
            return cmd_report(cfg, out_dir);
        if (resp->parsed())
            return cmd_response(surface_path, cv, sv_csv, channel, out);
        if (cal->parsed())
            return cmd_calibrate(out);
        return 1;
    } catch (const rffi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rffi::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const rffi::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
