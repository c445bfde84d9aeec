// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/model_io.hpp"

#include <fstream>

#include "rffi/errors.hpp"
#include "rffi/sha256.hpp"

namespace rffi::classifier {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'R', 'F', 'F', 'I', 'M', 'D', '0', '1'};

json config_to_json(const NetworkConfig& cfg) {
    return json{{"input_length", cfg.input_length},
                {"conv_kernel", cfg.conv_kernel},
                {"conv_channels", cfg.conv_channels},
                {"dense_sizes", cfg.dense_sizes},
                {"dropout_p", cfg.dropout_p},
                {"linear_output", cfg.linear_output}};
}

NetworkConfig config_from_json(const json& j) {
    NetworkConfig cfg;
    cfg.input_length = j.at("input_length").get<int>();
    cfg.conv_kernel = j.at("conv_kernel").get<int>();
    cfg.conv_channels = j.at("conv_channels").get<int>();
    cfg.dense_sizes = j.at("dense_sizes").get<std::vector<int>>();
    cfg.dropout_p = j.at("dropout_p").get<double>();
    cfg.linear_output = j.at("linear_output").get<bool>();
    cfg.validate();
    return cfg;
}

void append_tensor(ByteWriter& w, const MatX<float>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        w.put_f32(m.data()[i]);
}

} // namespace

void save_model(const std::filesystem::path& path, const NetworkConfig& cfg, const NetworkParams<float>& params,
                const json& metadata) {
    json tensors = json::array();
    auto describe = [&tensors](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
        tensors.push_back(json{{"name", name}, {"rows", rows}, {"cols", cols}});
    };
    describe("conv_w", params.conv_w.rows(), params.conv_w.cols());
    describe("conv_b", params.conv_b.rows(), 1);
    for (std::size_t l = 0; l < params.dense_w.size(); ++l) {
        describe("dense_w" + std::to_string(l), params.dense_w[l].rows(), params.dense_w[l].cols());
        describe("dense_b" + std::to_string(l), params.dense_b[l].rows(), 1);
    }
    const json header{{"config", config_to_json(cfg)}, {"metadata", metadata}, {"tensors", tensors}};
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof kMagic);
    ByteWriter w;
    w.put_u32(static_cast<std::uint32_t>(header_str.size()));
    w.put_bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(header_str.data()),
                                              header_str.size()));
    append_tensor(w, params.conv_w);
    MatX<float> conv_b = params.conv_b;
    append_tensor(w, conv_b);
    for (std::size_t l = 0; l < params.dense_w.size(); ++l) {
        append_tensor(w, params.dense_w[l]);
        MatX<float> b = params.dense_b[l];
        append_tensor(w, b);
    }
    out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out)
        throw DataError("short write to " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open model " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || !std::equal(kMagic, kMagic + sizeof kMagic, bytes.begin()))
        throw DataError(path.string() + ": not a model file");

    ByteReader r(std::span<const std::uint8_t>(bytes.data() + 8, bytes.size() - 8));
    const std::uint32_t header_len = r.get_u32();
    if (12 + static_cast<std::size_t>(header_len) > bytes.size())
        throw DataError(path.string() + ": truncated header at byte offset " + std::to_string(bytes.size()));
    json header;
    try {
        header = json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": header JSON: " + e.what());
    }

    LoadedModel model;
    model.config = config_from_json(header.at("config"));
    model.metadata = header.value("metadata", json::object());
    model.params = NetworkParams<float>::zeros(model.config);

    ByteReader blob(std::span<const std::uint8_t>(bytes.data() + 12 + header_len,
                                                  bytes.size() - 12 - header_len));
    auto read_into = [&blob, &path](auto& m, const json& desc) {
        if (m.rows() != desc.at("rows").get<Eigen::Index>() ||
            (desc.contains("cols") && m.cols() != desc.at("cols").get<Eigen::Index>()))
            throw DataError(path.string() + ": tensor shape mismatch for " +
                            desc.at("name").get<std::string>());
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = blob.get_f32();
    };
    const auto& tensors = header.at("tensors");
    std::size_t t = 0;
    read_into(model.params.conv_w, tensors.at(t++));
    read_into(model.params.conv_b, tensors.at(t++));
    for (std::size_t l = 0; l < model.params.dense_w.size(); ++l) {
        read_into(model.params.dense_w[l], tensors.at(t++));
        read_into(model.params.dense_b[l], tensors.at(t++));
    }
    if (!blob.exhausted())
        throw DataError(path.string() + ": trailing bytes after tensors");
    return model;
}

void export_history_csv(const std::vector<EpochStats>& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out.precision(10);
    out << "epoch,train_risk,val_risk\n";
    for (const auto& e : history)
        out << e.epoch << "," << e.train_risk << "," << e.val_risk << "\n";
}

} // namespace rffi::classifier
