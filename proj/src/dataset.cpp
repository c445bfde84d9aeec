// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/dataset.hpp"

#include <fstream>
#include <set>

#include "rffi/errors.hpp"
#include "rffi/sha256.hpp"

namespace rffi::phy {

using nlohmann::json;

namespace {
constexpr char kMagic[8] = {'R', 'F', 'F', 'I', 'D', 'S', '0', '1'};
}

int Dataset::n_classes() const {
    std::uint32_t max_label = 0;
    for (const auto& r : records)
        max_label = std::max(max_label, r.code_label);
    return records.empty() ? 0 : static_cast<int>(max_label) + 1;
}

void Dataset::validate() const {
    if (records.empty())
        throw DataError("dataset: no records");
    std::set<std::uint32_t> seen;
    for (const auto& r : records) {
        if (r.csi.size() != subcarriers)
            throw DataError("dataset: record CSI length mismatch");
        if (!r.csi.allFinite())
            throw DataError("dataset: non-finite CSI values");
        seen.insert(r.code_label);
    }
    const auto n = static_cast<std::uint32_t>(n_classes());
    for (std::uint32_t c = 0; c < n; ++c)
        if (!seen.count(c))
            throw DataError("dataset: label " + std::to_string(c) + " has no records (labels must be dense)");
}

void export_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    dataset.validate();

    json header;
    header["subcarriers"] = dataset.subcarriers;
    header["seed"] = dataset.seed;
    header["config"] = dataset.config;
    header["records"] = dataset.records.size();
    json labels = json::array(), channels = json::array(), scenarios = json::array(), seeds = json::array();
    for (const auto& r : dataset.records) {
        labels.push_back(r.code_label);
        channels.push_back(r.channel_id);
        scenarios.push_back(r.scenario_id);
        seeds.push_back(r.seed);
    }
    header["labels"] = std::move(labels);
    header["channels"] = std::move(channels);
    header["scenarios"] = std::move(scenarios);
    header["record_seeds"] = std::move(seeds);
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof kMagic);
    ByteWriter lenw;
    lenw.put_u32(static_cast<std::uint32_t>(header_str.size()));
    out.write(reinterpret_cast<const char*>(lenw.bytes().data()), 4);
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));

    ByteWriter roww;
    for (const auto& r : dataset.records) {
        for (Eigen::Index j = 0; j < r.csi.size(); ++j) {
            roww.put_f32(r.csi[j].real());
            roww.put_f32(r.csi[j].imag());
        }
    }
    out.write(reinterpret_cast<const char*>(roww.bytes().data()),
              static_cast<std::streamsize>(roww.bytes().size()));
    if (!out)
        throw DataError("short write to " + path.string());
}

Dataset import_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open dataset " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kMagic) + 4)
        throw DataError(path.string() + ": truncated at byte offset " + std::to_string(bytes.size()) +
                        " (no header)");
    if (!std::equal(kMagic, kMagic + sizeof kMagic, bytes.begin()))
        throw DataError(path.string() + ": bad magic; not a dataset file or unsupported version");

    ByteReader reader(std::span<const std::uint8_t>(bytes.data() + 8, bytes.size() - 8));
    const std::uint32_t header_len = reader.get_u32();
    if (12 + static_cast<std::size_t>(header_len) > bytes.size())
        throw DataError(path.string() + ": truncated header at byte offset " + std::to_string(bytes.size()));
    json header;
    try {
        header = json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": header JSON: " + e.what());
    }

    Dataset ds;
    ds.subcarriers = header.at("subcarriers").get<std::int64_t>();
    ds.seed = header.at("seed").get<std::uint64_t>();
    ds.config = header.value("config", json::object());
    const auto n_records = header.at("records").get<std::size_t>();
    const auto& labels = header.at("labels");
    const auto& channels = header.at("channels");
    const auto& scenarios = header.at("scenarios");
    const auto& seeds = header.at("record_seeds");
    if (labels.size() != n_records || channels.size() != n_records || scenarios.size() != n_records ||
        seeds.size() != n_records)
        throw DataError(path.string() + ": header record count " + std::to_string(n_records) +
                        " does not match label array sizes");

    const std::size_t row_bytes = static_cast<std::size_t>(ds.subcarriers) * 2 * sizeof(float);
    const std::size_t payload_offset = 12 + header_len;
    const std::size_t expected = payload_offset + n_records * row_bytes;
    if (bytes.size() != expected)
        throw DataError(path.string() + ": expected " + std::to_string(expected) + " bytes, got " +
                        std::to_string(bytes.size()) + " (payload truncated at byte offset " +
                        std::to_string(bytes.size()) + ")");

    ByteReader rows(std::span<const std::uint8_t>(bytes.data() + payload_offset, bytes.size() - payload_offset));
    ds.records.resize(n_records);
    for (std::size_t i = 0; i < n_records; ++i) {
        Record& r = ds.records[i];
        r.code_label = labels[i].get<std::uint32_t>();
        r.channel_id = channels[i].get<std::uint32_t>();
        r.scenario_id = scenarios[i].get<std::uint32_t>();
        r.seed = seeds[i].get<std::uint64_t>();
        r.csi.resize(ds.subcarriers);
        for (Eigen::Index j = 0; j < ds.subcarriers; ++j) {
            const float re = rows.get_f32();
            const float im = rows.get_f32();
            r.csi[j] = std::complex<float>(re, im);
        }
    }
    ds.validate();
    return ds;
}

void export_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    out.precision(9);
    out << "code_label,channel_id,scenario_id,seed";
    for (std::int64_t j = 0; j < dataset.subcarriers; ++j)
        out << ",re" << j << ",im" << j;
    out << "\n";
    for (const auto& r : dataset.records) {
        out << r.code_label << "," << r.channel_id << "," << r.scenario_id << "," << r.seed;
        for (Eigen::Index j = 0; j < r.csi.size(); ++j)
            out << "," << r.csi[j].real() << "," << r.csi[j].imag();
        out << "\n";
    }
}

} // namespace rffi::phy
