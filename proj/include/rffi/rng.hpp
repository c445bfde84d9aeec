// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_RNG_HPP
#define RFFI_RNG_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

namespace rffi {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Deterministic random stream with named/indexed child derivation.
///
/// All randomness in the simulator flows from one master seed. Substreams are
/// derived from the parent's key, never from its consumed state, so the draw
/// order in one stream cannot perturb another. The generator is xoshiro256++
/// and all distributions are implemented here, making every sequence
/// reproducible bit-for-bit for a given (seed, stream name) pair.
class RngStream {
  public:
    RngStream() : RngStream(0) {}

    explicit RngStream(std::uint64_t seed) : key_(seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_)
            w = detail::splitmix64(sm);
    }

    /// Child stream keyed by name, e.g. rng.child("noise").child(17).
    RngStream child(std::string_view name) const {
        std::uint64_t sm = key_ ^ detail::fnv1a64(name);
        return RngStream(detail::splitmix64(sm));
    }

    /// Child stream keyed by index (counter-based split).
    RngStream child(std::uint64_t index) const {
        std::uint64_t sm = key_ ^ (0x9e3779b97f4a7c15ULL + index * 0xd1342543de82ef95ULL);
        return RngStream(detail::splitmix64(sm));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// Standard normal via Box-Muller (fixed two-draw consumption).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        // guard against log(0)
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Circularly-symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        const double r = std::sqrt(-std::log(u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t key_;
    std::array<std::uint64_t, 4> state_;
};

} // namespace rffi

#endif
