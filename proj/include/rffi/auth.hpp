// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_AUTH_HPP
#define RFFI_AUTH_HPP

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rffi/centroid.hpp"
#include "rffi/classifier.hpp"
#include "rffi/phy.hpp"
#include "rffi/sha256.hpp"

namespace rffi::auth {

// ---------------------------------------------------------------------------
// classifier model shared by the protocols

/// Trained signature classifier: either the CNN or the nearest-centroid
/// backend. The centroid model is always fitted; it provides the Mahalanobis
/// feature gate that rejects inputs far from every enrolled signature, and
/// the separability analysis of the attack reports.
struct ClassifierModel {
    enum class Backend { cnn, centroid };

    Backend backend = Backend::centroid;
    classifier::NetworkConfig net_config;
    classifier::NetworkParams<float> net; // populated for the cnn backend
    classifier::CentroidModel centroids;
    double gate_distance = std::numeric_limits<double>::infinity();
    int input_length = 33;
    int n_classes = 0;

    struct Decision {
        int label = -1;
        double probability = 0.0;
        double distance = 0.0; // Mahalanobis distance to the predicted class
        bool degenerate = false;
    };

    Decision classify_feature(const Eigen::VectorXd& feature) const;
    Decision classify_csi(const Eigen::VectorXcd& csi) const;
    Eigen::VectorXd feature_of(const Eigen::VectorXcd& csi) const;
};

struct FitOptions {
    ClassifierModel::Backend backend = ClassifierModel::Backend::centroid;
    classifier::TrainConfig train;  // cnn backend hyperparameters
    double ridge = 1e-6;
    double gate_quantile = 0.999;   // of enrollment within-class distances
    double gate_multiplier = 3.0;
    int input_length = 33;

    FitOptions() { train.train_fraction = 0.5; }
};

/// Fit the model on an enrollment dataset (labels must be dense).
ClassifierModel fit_classifier(const phy::Dataset& data, const FitOptions& opts);

// ---------------------------------------------------------------------------
// protocol objects

struct DeviceRecord {
    std::string dev_id;
    std::vector<std::uint32_t> enrolled_labels;  // sorted, global label space
    std::vector<std::uint32_t> allowed_channels; // sorted
    std::map<std::uint32_t, std::uint32_t> channel_labels; // channel -> designated class
    std::uint64_t nonce = 0;
    Digest256 fp_digest{};
    std::string model_ref;
};

struct AuthMessage {
    enum class Kind : std::uint8_t { pilot_req = 1, a_req = 2, ack = 3, reject = 4 };

    Kind kind = Kind::pilot_req;
    std::string dev_id;
    Eigen::VectorXcf inj_c_est; // a_req only
    Digest256 fp_hash{};        // ack only
    std::string reason;         // reject only

    static AuthMessage pilot_req(std::string dev_id);
    static AuthMessage a_req(std::string dev_id, const Eigen::VectorXcf& csi);
    static AuthMessage ack_msg(std::string dev_id, const Digest256& fp_hash);
    static AuthMessage reject(std::string reason);

    /// Length-prefixed little-endian wire encoding.
    std::vector<std::uint8_t> encode() const;
    static AuthMessage decode(std::span<const std::uint8_t> bytes);
};

struct ProtocolOutcome {
    bool accepted = false;
    std::vector<std::uint32_t> matched_labels;
    double score = 0.0; // minimum matched-packet probability
    std::vector<AuthMessage> transcript;
};

nlohmann::json transcript_to_json(const std::vector<AuthMessage>& transcript);

/// Digest binding the device identity to its enrolled signature classes:
/// sha256 over (dev_id, sorted labels, enrollment nonce).
Digest256 fingerprint_hash(const DeviceRecord& record);

/// Node-side check that an Ack came from the enrolling server.
bool verify_server_hash(const Digest256& node_digest, const AuthMessage& ack);

// ---------------------------------------------------------------------------
// server

struct ServerConfig {
    double probability_threshold = 0.5;
    int protocol2_n = 3;
    std::uint64_t seed = 0x5eed;
    FitOptions fit;
    Eigen::Index subcarriers = 30;
};

/// What the node takes home from enrollment: the digest it later verifies
/// server Acks against.
struct NodeCredentials {
    std::string dev_id;
    Digest256 server_digest{};
};

/// Single-writer enrollment store plus the three authentication protocols as
/// deterministic transcript-producing state machines.
class Server {
  public:
    explicit Server(ServerConfig cfg = ServerConfig());

    /// Register a device: the enrollment dataset's labels are remapped into
    /// the server's global class space, the classifier is refitted over all
    /// enrolled data, and the fingerprint digest is provisioned to the node.
    NodeCredentials enroll(const std::string& dev_id, const phy::Dataset& training,
                           const std::vector<std::uint32_t>& allowed_channels = {});

    const DeviceRecord* find_device(const std::string& dev_id) const;
    const ClassifierModel& model() const { return model_; }
    const ServerConfig& config() const { return cfg_; }
    const phy::PilotSymbol& pilot() const { return pilot_; }

    /// Protocol 1: single pilot, classify, match against the device record.
    ProtocolOutcome authenticate_p1(const Eigen::VectorXcd& rx_pilot, const std::string& dev_id) const;

    /// Protocol 2: the node verifies the server digest after the first
    /// exchange, then pushes n-1 designated signatures; all n must classify
    /// to the designated labels in order.
    ProtocolOutcome authenticate_p2(const std::vector<Eigen::VectorXcd>& rx_sequence, const std::string& dev_id,
                                    const Digest256& node_digest) const;

    /// Protocol 3: one fixed code observed on every allowed channel; each
    /// channel's CSI must classify to that channel's designated class.
    ProtocolOutcome authenticate_p3(const std::map<std::uint32_t, Eigen::VectorXcd>& rx_per_channel,
                                    const std::string& dev_id) const;

    /// Enrollment database, persisted as JSON.
    void save_database(const std::filesystem::path& path) const;
    nlohmann::json database_json() const;

  private:
    ClassifierModel::Decision classify(const Eigen::VectorXcd& rx_pilot, Eigen::VectorXcf* csi_out) const;
    bool decision_passes(const ClassifierModel::Decision& d) const;

    ServerConfig cfg_;
    phy::PilotSymbol pilot_;
    std::map<std::string, DeviceRecord> devices_;
    phy::Dataset enrolled_data_; // accumulated, labels in the global space
    ClassifierModel model_;
    std::uint64_t enroll_counter_ = 0;
};

} // namespace rffi::auth

#endif
