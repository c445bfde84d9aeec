// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/auth.hpp"

#include <algorithm>
#include <fstream>

#include "rffi/errors.hpp"

namespace rffi::auth {

using nlohmann::json;

// ---------------------------------------------------------------------------
// ClassifierModel

Eigen::VectorXd ClassifierModel::feature_of(const Eigen::VectorXcd& csi) const {
    return classifier::csi_to_input(csi, input_length).values;
}

ClassifierModel::Decision ClassifierModel::classify_feature(const Eigen::VectorXd& feature) const {
    Decision d;
    Eigen::VectorXd probs;
    if (backend == Backend::cnn) {
        Eigen::MatrixXd input(feature.size(), 1);
        input.col(0) = feature;
        probs = classifier::predict_probs(net_config, net, input).col(0);
    } else {
        probs = classifier::centroid_posteriors(centroids, feature);
    }
    int best = 0;
    for (int k = 1; k < static_cast<int>(probs.size()); ++k)
        if (probs[k] > probs[best])
            best = k;
    d.label = best;
    d.probability = probs[best];
    d.distance = classifier::mahalanobis(centroids, feature, best);
    return d;
}

ClassifierModel::Decision ClassifierModel::classify_csi(const Eigen::VectorXcd& csi) const {
    const auto feature = classifier::csi_to_input(csi, input_length);
    Decision d = classify_feature(feature.values);
    d.degenerate = feature.degenerate;
    return d;
}

ClassifierModel fit_classifier(const phy::Dataset& data, const FitOptions& opts) {
    data.validate();
    ClassifierModel model;
    model.backend = opts.backend;
    model.input_length = opts.input_length;
    model.n_classes = data.n_classes();

    const Eigen::MatrixXd features = classifier::features_from_dataset(data, opts.input_length);
    const std::vector<int> labels = classifier::labels_from_dataset(data);

    model.centroids = classifier::centroid_fit(features, labels, model.n_classes, opts.ridge);

    if (opts.backend == ClassifierModel::Backend::cnn) {
        classifier::NetworkConfig cfg;
        cfg.input_length = opts.input_length;
        cfg.dense_sizes = {2048, 1024, model.n_classes};
        auto result = classifier::train<float>(features, labels, cfg, opts.train);
        model.net_config = cfg;
        model.net = std::move(result.params);
    }

    // data-driven gate: the spread of enrollment features around their own
    // class centroid, padded by the multiplier
    std::vector<double> dists(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index i = 0; i < features.cols(); ++i)
        dists[static_cast<std::size_t>(i)] =
            classifier::mahalanobis(model.centroids, features.col(i), labels[static_cast<std::size_t>(i)]);
    std::sort(dists.begin(), dists.end());
    const auto idx = static_cast<std::size_t>(
        std::min<double>(std::ceil(opts.gate_quantile * static_cast<double>(dists.size())),
                         static_cast<double>(dists.size())) -
        1.0);
    model.gate_distance = opts.gate_multiplier * dists[idx];
    return model;
}

// ---------------------------------------------------------------------------
// messages

AuthMessage AuthMessage::pilot_req(std::string dev_id) {
    AuthMessage m;
    m.kind = Kind::pilot_req;
    m.dev_id = std::move(dev_id);
    return m;
}

AuthMessage AuthMessage::a_req(std::string dev_id, const Eigen::VectorXcf& csi) {
    AuthMessage m;
    m.kind = Kind::a_req;
    m.dev_id = std::move(dev_id);
    m.inj_c_est = csi;
    return m;
}

AuthMessage AuthMessage::ack_msg(std::string dev_id, const Digest256& fp_hash) {
    AuthMessage m;
    m.kind = Kind::ack;
    m.dev_id = std::move(dev_id);
    m.fp_hash = fp_hash;
    return m;
}

AuthMessage AuthMessage::reject(std::string reason) {
    AuthMessage m;
    m.kind = Kind::reject;
    m.reason = std::move(reason);
    return m;
}

std::vector<std::uint8_t> AuthMessage::encode() const {
    ByteWriter w;
    w.put_u8(static_cast<std::uint8_t>(kind));
    switch (kind) {
    case Kind::pilot_req:
        w.put_field(dev_id);
        break;
    case Kind::a_req: {
        w.put_field(dev_id);
        w.put_u32(static_cast<std::uint32_t>(inj_c_est.size()));
        for (Eigen::Index j = 0; j < inj_c_est.size(); ++j) {
            w.put_f32(inj_c_est[j].real());
            w.put_f32(inj_c_est[j].imag());
        }
        break;
    }
    case Kind::ack:
        w.put_field(dev_id);
        w.put_bytes(std::span<const std::uint8_t>(fp_hash.data(), fp_hash.size()));
        break;
    case Kind::reject:
        w.put_field(reason);
        break;
    }
    return w.bytes();
}

AuthMessage AuthMessage::decode(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    AuthMessage m;
    const auto kind_raw = r.get_u8();
    if (kind_raw < 1 || kind_raw > 4)
        throw DataError("auth message: unknown kind " + std::to_string(kind_raw));
    m.kind = static_cast<Kind>(kind_raw);
    switch (m.kind) {
    case Kind::pilot_req:
        m.dev_id = r.get_field_string();
        break;
    case Kind::a_req: {
        m.dev_id = r.get_field_string();
        const std::uint32_t n = r.get_u32();
        m.inj_c_est.resize(n);
        for (std::uint32_t j = 0; j < n; ++j) {
            const float re = r.get_f32();
            const float im = r.get_f32();
            m.inj_c_est[j] = {re, im};
        }
        break;
    }
    case Kind::ack: {
        m.dev_id = r.get_field_string();
        for (auto& b : m.fp_hash)
            b = r.get_u8();
        break;
    }
    case Kind::reject:
        m.reason = r.get_field_string();
        break;
    }
    if (!r.exhausted())
        throw DataError("auth message: " + std::to_string(bytes.size() - r.offset()) +
                        " trailing bytes at offset " + std::to_string(r.offset()));
    return m;
}

json transcript_to_json(const std::vector<AuthMessage>& transcript) {
    json out = json::array();
    for (const auto& m : transcript) {
        json jm;
        switch (m.kind) {
        case AuthMessage::Kind::pilot_req:
            jm = {{"type", "pilot_req"}, {"dev_id", m.dev_id}};
            break;
        case AuthMessage::Kind::a_req:
            jm = {{"type", "a_req"}, {"dev_id", m.dev_id}, {"csi_len", m.inj_c_est.size()}};
            break;
        case AuthMessage::Kind::ack:
            jm = {{"type", "ack"}, {"dev_id", m.dev_id}, {"fp_hash", hex_digest(m.fp_hash)}};
            break;
        case AuthMessage::Kind::reject:
            jm = {{"type", "reject"}, {"reason", m.reason}};
            break;
        }
        out.push_back(std::move(jm));
    }
    return out;
}

Digest256 fingerprint_hash(const DeviceRecord& record) {
    ByteWriter w;
    w.put_field(record.dev_id);
    std::vector<std::uint32_t> labels = record.enrolled_labels;
    std::sort(labels.begin(), labels.end());
    w.put_u32(static_cast<std::uint32_t>(labels.size()));
    for (auto l : labels)
        w.put_u32(l);
    w.put_u64(record.nonce);
    return sha256(std::span<const std::uint8_t>(w.bytes().data(), w.bytes().size()));
}

bool verify_server_hash(const Digest256& node_digest, const AuthMessage& ack) {
    return ack.kind == AuthMessage::Kind::ack && ack.fp_hash == node_digest;
}

// ---------------------------------------------------------------------------
// server

Server::Server(ServerConfig cfg) : cfg_(std::move(cfg)), pilot_(phy::PilotSymbol::constant(cfg_.subcarriers)) {
    enrolled_data_.subcarriers = cfg_.subcarriers;
}

NodeCredentials Server::enroll(const std::string& dev_id, const phy::Dataset& training,
                               const std::vector<std::uint32_t>& allowed_channels) {
    if (devices_.count(dev_id))
        throw ConfigError("enroll: device id '" + dev_id + "' already registered");
    training.validate();
    if (training.subcarriers != cfg_.subcarriers)
        throw ConfigError("enroll: dataset subcarrier count mismatch");

    // remap the dataset labels into the server's global class space
    const auto offset = static_cast<std::uint32_t>(enrolled_data_.n_classes());
    DeviceRecord record;
    record.dev_id = dev_id;
    std::uint64_t nonce_state = cfg_.seed + (++enroll_counter_);
    record.nonce = detail::splitmix64(nonce_state);

    const auto local_classes = static_cast<std::uint32_t>(training.n_classes());
    for (std::uint32_t c = 0; c < local_classes; ++c)
        record.enrolled_labels.push_back(offset + c);

    for (const auto& r : training.records) {
        phy::Record global = r;
        global.code_label += offset;
        if (record.channel_labels.count(r.channel_id) == 0)
            record.channel_labels[r.channel_id] = global.code_label;
        enrolled_data_.records.push_back(std::move(global));
    }
    record.allowed_channels = allowed_channels;
    if (record.allowed_channels.empty())
        for (const auto& [ch, lbl] : record.channel_labels)
            record.allowed_channels.push_back(ch);
    std::sort(record.allowed_channels.begin(), record.allowed_channels.end());

    record.fp_digest = fingerprint_hash(record);
    record.model_ref = "model-" + std::to_string(enroll_counter_);

    model_ = fit_classifier(enrolled_data_, cfg_.fit);
    devices_.emplace(dev_id, record);
    return NodeCredentials{dev_id, record.fp_digest};
}

const DeviceRecord* Server::find_device(const std::string& dev_id) const {
    const auto it = devices_.find(dev_id);
    return it == devices_.end() ? nullptr : &it->second;
}

ClassifierModel::Decision Server::classify(const Eigen::VectorXcd& rx_pilot, Eigen::VectorXcf* csi_out) const {
    const Eigen::VectorXcd csi = phy::estimate_csi(rx_pilot, pilot_);
    if (csi_out)
        *csi_out = csi.cast<std::complex<float>>();
    return model_.classify_csi(csi);
}

bool Server::decision_passes(const ClassifierModel::Decision& d) const {
    return !d.degenerate && d.probability >= cfg_.probability_threshold && d.distance <= model_.gate_distance;
}

ProtocolOutcome Server::authenticate_p1(const Eigen::VectorXcd& rx_pilot, const std::string& dev_id) const {
    ProtocolOutcome out;
    out.transcript.push_back(AuthMessage::pilot_req(dev_id));

    const DeviceRecord* record = find_device(dev_id);
    Eigen::VectorXcf csi;
    if (devices_.empty() || record == nullptr) {
        // still extract the CSI the access point would forward
        if (!devices_.empty()) {
            classify(rx_pilot, &csi);
            out.transcript.push_back(AuthMessage::a_req(dev_id, csi));
        }
        out.transcript.push_back(AuthMessage::reject("unknown device"));
        return out;
    }

    const auto decision = classify(rx_pilot, &csi);
    out.transcript.push_back(AuthMessage::a_req(dev_id, csi));

    const bool label_enrolled =
        std::binary_search(record->enrolled_labels.begin(), record->enrolled_labels.end(),
                           static_cast<std::uint32_t>(decision.label));
    if (label_enrolled && decision_passes(decision)) {
        out.accepted = true;
        out.matched_labels = {static_cast<std::uint32_t>(decision.label)};
        out.score = decision.probability;
        out.transcript.push_back(AuthMessage::ack_msg(dev_id, record->fp_digest));
    } else {
        out.score = decision.probability;
        out.transcript.push_back(AuthMessage::reject(label_enrolled ? "signature mismatch" : "label mismatch"));
    }
    return out;
}

ProtocolOutcome Server::authenticate_p2(const std::vector<Eigen::VectorXcd>& rx_sequence,
                                        const std::string& dev_id, const Digest256& node_digest) const {
    ProtocolOutcome out;
    const auto n = static_cast<int>(rx_sequence.size());
    out.transcript.push_back(AuthMessage::pilot_req(dev_id));

    const DeviceRecord* record = find_device(dev_id);
    if (record == nullptr) {
        out.transcript.push_back(AuthMessage::reject("unknown device"));
        return out;
    }
    if (n < 2) {
        out.transcript.push_back(AuthMessage::reject("protocol violation"));
        return out;
    }
    if (record->enrolled_labels.size() < static_cast<std::size_t>(n)) {
        out.transcript.push_back(AuthMessage::reject("insufficient enrolled signatures"));
        return out;
    }

    // first exchange mirrors protocol 1
    Eigen::VectorXcf csi;
    const auto first = classify(rx_sequence[0], &csi);
    out.transcript.push_back(AuthMessage::a_req(dev_id, csi));
    if (first.label != static_cast<int>(record->enrolled_labels[0]) || !decision_passes(first)) {
        out.score = first.probability;
        out.transcript.push_back(AuthMessage::reject("signature mismatch"));
        return out;
    }
    const auto server_ack = AuthMessage::ack_msg(dev_id, record->fp_digest);
    out.transcript.push_back(server_ack);

    // the node pushes the remaining signatures only after verifying the hash
    if (!verify_server_hash(node_digest, server_ack)) {
        out.transcript.push_back(AuthMessage::reject("protocol violation"));
        return out;
    }

    double min_prob = first.probability;
    std::vector<std::uint32_t> matched = {record->enrolled_labels[0]};
    for (int i = 1; i < n; ++i) {
        Eigen::VectorXcf csi_i;
        const auto d = classify(rx_sequence[static_cast<std::size_t>(i)], &csi_i);
        out.transcript.push_back(AuthMessage::a_req(dev_id, csi_i));
        const auto designated = record->enrolled_labels[static_cast<std::size_t>(i)];
        if (d.label != static_cast<int>(designated) || !decision_passes(d)) {
            out.score = std::min(min_prob, d.probability);
            out.transcript.push_back(AuthMessage::reject("signature mismatch at step " + std::to_string(i)));
            return out;
        }
        matched.push_back(designated);
        min_prob = std::min(min_prob, d.probability);
    }

    out.accepted = true;
    out.matched_labels = std::move(matched);
    out.score = min_prob;
    out.transcript.push_back(AuthMessage::ack_msg(dev_id, record->fp_digest));
    return out;
}

ProtocolOutcome Server::authenticate_p3(const std::map<std::uint32_t, Eigen::VectorXcd>& rx_per_channel,
                                        const std::string& dev_id) const {
    ProtocolOutcome out;
    out.transcript.push_back(AuthMessage::pilot_req(dev_id));

    const DeviceRecord* record = find_device(dev_id);
    if (record == nullptr) {
        out.transcript.push_back(AuthMessage::reject("unknown device"));
        return out;
    }
    if (record->allowed_channels.size() < 2) {
        out.transcript.push_back(AuthMessage::reject("device not enrolled for multi-channel auth"));
        return out;
    }

    double min_prob = 1.0;
    std::vector<std::uint32_t> matched;
    for (const auto channel : record->allowed_channels) {
        const auto it = rx_per_channel.find(channel);
        if (it == rx_per_channel.end()) {
            out.transcript.push_back(AuthMessage::reject("incomplete: missing channel " + std::to_string(channel)));
            return out;
        }
        Eigen::VectorXcf csi;
        const auto d = classify(it->second, &csi);
        out.transcript.push_back(AuthMessage::a_req(dev_id, csi));
        const auto designated = record->channel_labels.at(channel);
        if (d.label != static_cast<int>(designated) || !decision_passes(d)) {
            out.score = std::min(min_prob, d.probability);
            out.transcript.push_back(
                AuthMessage::reject("signature mismatch on channel " + std::to_string(channel)));
            return out;
        }
        matched.push_back(designated);
        min_prob = std::min(min_prob, d.probability);
    }

    out.accepted = true;
    out.matched_labels = std::move(matched);
    out.score = min_prob;
    out.transcript.push_back(AuthMessage::ack_msg(dev_id, record->fp_digest));
    return out;
}

json Server::database_json() const {
    json devices = json::array();
    for (const auto& [id, r] : devices_) {
        json channel_labels = json::object();
        for (const auto& [ch, lbl] : r.channel_labels)
            channel_labels[std::to_string(ch)] = lbl;
        devices.push_back(json{{"dev_id", r.dev_id},
                               {"enrolled_labels", r.enrolled_labels},
                               {"allowed_channels", r.allowed_channels},
                               {"channel_labels", channel_labels},
                               {"nonce", r.nonce},
                               {"fp_digest", hex_digest(r.fp_digest)},
                               {"model_ref", r.model_ref}});
    }
    return json{{"devices", devices}, {"classes", model_.n_classes}};
}

void Server::save_database(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out << database_json().dump(2) << "\n";
}

} // namespace rffi::auth
