// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_BIGUINT_HPP
#define RFFI_BIGUINT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace rffi {

/// Arbitrary-precision unsigned integer, just large enough for exact
/// signature-capacity arithmetic (small base, large exponent).
class BigUint {
  public:
    BigUint() : limbs_{0} {}
    BigUint(std::uint64_t v); // NOLINT(google-explicit-constructor)

    static BigUint pow(std::uint64_t base, unsigned exponent);

    BigUint& operator*=(std::uint64_t m);
    bool operator==(const BigUint& other) const = default;

    /// True when the value fits in 64 bits.
    bool fits_u64() const;
    std::uint64_t to_u64() const;

    std::string to_string() const;
    /// log2 of the value (for the "about 2^45" style magnitude reports).
    double log2() const;

  private:
    // base 2^32 limbs, little-endian, no trailing zero limbs (except value 0)
    std::vector<std::uint32_t> limbs_;
    void trim();
};

} // namespace rffi

#endif
