// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_ATTACK_HPP
#define RFFI_ATTACK_HPP

#include "rffi/auth.hpp"
#include "rffi/channel.hpp"
#include "rffi/phy.hpp"

namespace rffi::attack {

struct AttackerConfig {
    Eigen::Vector2d position{0.0, 3.0};
    double receiver_snr_cap_db = 25.0; // eavesdropper CSI quality ceiling
    bool owns_surface = true;          // same reflect-array hardware as the node
    double replay_gain = 0.0;          // 0 = auto power match
    std::vector<std::pair<surface::ControlCode, std::uint32_t>> known_codes;
};

/// lambda/4 at the carrier: inside this radius an eavesdropper sees an
/// almost identical channel.
double guard_zone_radius(double frequency_hz);

/// Replay of a recorded signal through the attacker-to-server channel with a
/// flat gain: y_at * g * H_ats + server noise. The attacker cannot remove
/// either propagation channel from the recording.
Eigen::VectorXcd signal_replay(const Eigen::VectorXcd& y_at_attacker,
                               const FrequencyResponse& channel_at_to_s, double gain,
                               double server_noise_power, RngStream& rng);

/// The filter a feature-replaying attacker would need per subcarrier:
/// SH_{i->s} / (SH_{i->at} * H_{at->s}).
FrequencyResponse attacker_filter(const FrequencyResponse& sh_i_to_s, const FrequencyResponse& sh_i_to_at,
                                  const FrequencyResponse& h_at_to_s);

/// The three channels of the man-in-the-middle geometry, with amplitude
/// scales and the attacker's recording noise.
struct AttackerChannels {
    FrequencyResponse h_is;  // node -> server, the session's frozen channel
    FrequencyResponse h_iat; // node -> attacker
    FrequencyResponse h_ats; // attacker -> server
    double a_is = 1.0;       // link amplitude scales
    double a_iat = 1.0;
    double a_ats = 1.0;
    double attacker_noise_power = 0.0;
    double rho = 0.0; // spatial correlation between h_ats and h_is
};

/// Derive the attacker-side channels consistently with the session that
/// produced the enrollment data: h_ats decorrelates from h_is with the
/// node-to-attacker separation (Clarke), and the node-to-attacker leg gets
/// more line-of-sight as the attacker closes in.
AttackerChannels derive_channels(const phy::LinkSession& session, std::uint64_t session_seed,
                                 const AttackerConfig& attacker);

struct BoxStats {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
BoxStats box_stats(std::vector<double> values);

struct AttackReport {
    int packets = 0;
    int accepted = 0;
    double acceptance_rate = 0.0;
    std::vector<BoxStats> tests;        // per-test attacker Mahalanobis boxes
    double genuine_median_distance = 0; // genuine packets to their own centroid
    double separation = 0.0;            // min over tests of (median - genuine median)
};

nlohmann::json attack_report_json(const AttackReport& report);
void attack_boxes_csv(const AttackReport& report, const std::filesystem::path& path);

/// Record-and-replay of genuine transmissions of `code` (label `label`),
/// presented to the server under dev_id. Acceptance via protocol 1.
AttackReport run_signal_replay(const phy::LinkSession& session, std::uint64_t session_seed,
                               const auth::Server& server, const std::string& dev_id,
                               const surface::ControlCode& code, int label, const AttackerConfig& attacker,
                               int n_packets, int packets_per_test, RngStream rng);

/// Deep regression estimator from received CSI to the signature voltage
/// vector, built on the classifier trunk with a linear head.
struct SvEstimator {
    classifier::NetworkConfig config;
    classifier::NetworkParams<float> params;
    double sv_scale = surface::kSvRange;
    int cells = 8;
    bool degenerate = false; // fewer than two distinct codes to learn from
    double validation_risk = 0.0;

    Eigen::VectorXd estimate(const Eigen::VectorXcd& csi) const;
};

/// Eavesdropped CSI of the attacker's known codes, labeled with the code
/// index; sv targets normalized by the signature range.
SvEstimator train_sv_estimator(const phy::Dataset& eavesdropped, const Eigen::MatrixXd& sv_targets,
                               classifier::TrainConfig tc);

/// Eavesdrop the node's transmissions of the attacker's known codes through
/// the node-to-attacker channel.
phy::Dataset eavesdrop_dataset(const phy::LinkSession& session, std::uint64_t session_seed,
                               const AttackerConfig& attacker, int packets_per_code, RngStream rng);

/// Estimate the secret signature vector from eavesdropped packets of the
/// secret code (mean over per-packet estimates, clamped to the range).
Eigen::VectorXd estimate_secret_sv(const SvEstimator& estimator, const phy::LinkSession& session,
                                   std::uint64_t session_seed, const AttackerConfig& attacker,
                                   const surface::ControlCode& secret_code, int n_packets, RngStream rng);

/// Re-injection of the estimated signature through the attacker's own
/// surface and channels; acceptance via protocol 1 against the server.
/// secret_code is the genuine code, used only for the genuine-spread
/// reference of the separability report.
AttackReport run_feature_replay(const phy::LinkSession& session, std::uint64_t session_seed,
                                const auth::Server& server, const std::string& dev_id,
                                const Eigen::VectorXd& sv_estimate, const surface::ControlCode& secret_code,
                                int target_label, const AttackerConfig& attacker, int n_packets,
                                int packets_per_test, RngStream rng);

} // namespace rffi::attack

#endif
