// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_MODEL_IO_HPP
#define RFFI_MODEL_IO_HPP

#include <filesystem>
#include <tuple>

#include <nlohmann/json.hpp>

#include "rffi/classifier.hpp"

namespace rffi::classifier {

/// Model container: magic, u32 header length, JSON header (config, seed,
/// metrics), then named float32 tensor blobs in header order, little-endian.
void save_model(const std::filesystem::path& path, const NetworkConfig& cfg, const NetworkParams<float>& params,
                const nlohmann::json& metadata);

struct LoadedModel {
    NetworkConfig config;
    NetworkParams<float> params;
    nlohmann::json metadata;
};

LoadedModel load_model(const std::filesystem::path& path);

/// Per-epoch train/validation risk as CSV.
void export_history_csv(const std::vector<EpochStats>& history, const std::filesystem::path& path);

} // namespace rffi::classifier

#endif
