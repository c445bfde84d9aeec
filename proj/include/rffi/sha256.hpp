// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_SHA256_HPP
#define RFFI_SHA256_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rffi {

using Digest256 = std::array<std::uint8_t, 32>;

/// FIPS 180-4 SHA-256 of a byte buffer.
Digest256 sha256(std::span<const std::uint8_t> data);
Digest256 sha256(const std::string& data);

std::string hex_digest(const Digest256& d);

/// Little-endian length-prefixed field writer used by the auth wire format
/// and the fingerprint-hash preimage.
class ByteWriter {
  public:
    void put_u8(std::uint8_t v) { bytes_.push_back(v); }
    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_f32(float v);
    void put_bytes(std::span<const std::uint8_t> data);
    /// u32 length prefix followed by raw bytes.
    void put_field(std::span<const std::uint8_t> data);
    void put_field(const std::string& s);

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  private:
    std::vector<std::uint8_t> bytes_;
};

/// Matching reader; throws DataError naming the byte offset on truncation.
class ByteReader {
  public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t get_u8();
    std::uint32_t get_u32();
    std::uint64_t get_u64();
    float get_f32();
    std::vector<std::uint8_t> get_field();
    std::string get_field_string();
    std::size_t offset() const { return pos_; }
    bool exhausted() const { return pos_ == data_.size(); }

  private:
    void need(std::size_t n) const;
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace rffi

#endif
