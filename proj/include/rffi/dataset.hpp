// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_DATASET_HPP
#define RFFI_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace rffi::phy {

/// One received CSI snapshot with its provenance.
struct Record {
    std::uint32_t code_label = 0;
    std::uint32_t channel_id = 0;
    std::uint32_t scenario_id = 0;
    std::uint64_t seed = 0; // derived per-record stream key
    Eigen::VectorXcf csi;
};

/// Labeled CSI collection. Labels are dense in [0, n_classes) with at least
/// one record per label; CSI values are stored in float32 so file round
/// trips are bit-exact.
struct Dataset {
    std::int64_t subcarriers = 0;
    std::uint64_t seed = 0;       // master seed the dataset was generated from
    nlohmann::json config;        // provenance echo (free-form)
    std::vector<Record> records;

    int n_classes() const;
    void validate() const;
};

/// Binary container: magic + u32 header length + JSON header + row-major
/// float32 interleaved re/im CSI rows (little-endian).
void export_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset import_dataset(const std::filesystem::path& path);

/// Human-readable CSV (label, channel, scenario, seed, re/im pairs).
void export_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);

} // namespace rffi::phy

#endif
