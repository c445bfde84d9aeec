// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "rffi/biguint.hpp"

#include <algorithm>
#include <cmath>

namespace rffi {

BigUint::BigUint(std::uint64_t v) {
    limbs_ = {static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v >> 32)};
    trim();
}

void BigUint::trim() {
    while (limbs_.size() > 1 && limbs_.back() == 0)
        limbs_.pop_back();
}

BigUint& BigUint::operator*=(std::uint64_t m) {
    // multiply by up to 64-bit m as two 32-bit passes: v*m = v*lo + (v*hi << 32)
    const std::uint64_t lo = m & 0xffffffffULL;
    const std::uint64_t hi = m >> 32;
    std::vector<std::uint32_t> acc(limbs_.size() + 2, 0);
    auto mul_add = [&](std::uint64_t factor, std::size_t shift) {
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            std::uint64_t cur = static_cast<std::uint64_t>(limbs_[i]) * factor + acc[i + shift] + carry;
            acc[i + shift] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        std::size_t pos = limbs_.size() + shift;
        while (carry != 0) {
            std::uint64_t cur = acc[pos] + carry;
            acc[pos] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
            ++pos;
        }
    };
    mul_add(lo, 0);
    if (hi != 0)
        mul_add(hi, 1);
    limbs_ = std::move(acc);
    trim();
    return *this;
}

BigUint BigUint::pow(std::uint64_t base, unsigned exponent) {
    BigUint out(1);
    for (unsigned i = 0; i < exponent; ++i)
        out *= base;
    return out;
}

bool BigUint::fits_u64() const { return limbs_.size() <= 2; }

std::uint64_t BigUint::to_u64() const {
    std::uint64_t v = limbs_[0];
    if (limbs_.size() > 1)
        v |= static_cast<std::uint64_t>(limbs_[1]) << 32;
    return v;
}

std::string BigUint::to_string() const {
    std::vector<std::uint32_t> work(limbs_.rbegin(), limbs_.rend());
    std::string digits;
    while (!(work.size() == 1 && work[0] == 0)) {
        std::uint64_t rem = 0;
        for (auto& limb : work) {
            std::uint64_t cur = (rem << 32) | limb;
            limb = static_cast<std::uint32_t>(cur / 10);
            rem = cur % 10;
        }
        digits.push_back(static_cast<char>('0' + rem));
        while (work.size() > 1 && work.front() == 0)
            work.erase(work.begin());
    }
    if (digits.empty())
        digits = "0";
    std::reverse(digits.begin(), digits.end());
    return digits;
}

double BigUint::log2() const {
    // top three limbs carry more than double precision
    double value = 0.0;
    const std::size_t n = limbs_.size();
    const std::size_t take = std::min<std::size_t>(3, n);
    for (std::size_t i = 0; i < take; ++i)
        value = value * 4294967296.0 + limbs_[n - 1 - i];
    if (value <= 0.0)
        return 0.0;
    return std::log2(value) + 32.0 * static_cast<double>(n - take);
}

} // namespace rffi
