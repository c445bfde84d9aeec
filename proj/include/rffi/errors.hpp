// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_ERRORS_HPP
#define RFFI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rffi {

/// Invalid configuration: bad parameter values, mismatched dimensions,
/// references to missing files. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data files (datasets, models, messages).
/// CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure (singular covariance, divergence). CLI exit code 4.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rffi

#endif
