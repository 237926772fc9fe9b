// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tcpa
{
using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

/// Thrown by ByteReader and the canonical decoders on malformed input.
struct DecodeError : std::runtime_error
{
    explicit DecodeError(const std::string& msg) : std::runtime_error{msg} {}
};

inline Bytes to_bytes(std::string_view s)
{
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(BytesView b)
{
    return std::string(b.begin(), b.end());
}

std::string to_hex(BytesView data);
Bytes from_hex(std::string_view hex);

/// True if needle occurs as a contiguous byte substring of haystack.
bool contains(BytesView haystack, BytesView needle);

/// Sequential writer for the canonical encodings used by certificates,
/// protocol frames and reports: big-endian integers and 4-byte
/// length-prefixed fields, concatenated in declared order.
class ByteWriter
{
public:
    void put_u8(uint8_t v) { m_out.push_back(v); }
    void put_be32(uint32_t v);
    void put_be64(uint64_t v);
    void put_bytes(BytesView b) { m_out.insert(m_out.end(), b.begin(), b.end()); }
    /// 4-byte big-endian length followed by the bytes.
    void put_field(BytesView b);
    void put_field(std::string_view s) { put_field(BytesView{reinterpret_cast<const uint8_t*>(s.data()), s.size()}); }

    const Bytes& bytes() const noexcept { return m_out; }
    Bytes take() noexcept { return std::move(m_out); }

private:
    Bytes m_out;
};

/// Sequential reader matching ByteWriter's encoding. All reads throw
/// DecodeError on truncation.
class ByteReader
{
public:
    explicit ByteReader(BytesView data) : m_data{data} {}

    uint8_t u8();
    uint32_t be32();
    uint64_t be64();
    Bytes field();
    Bytes raw(size_t n);
    Bytes rest();

    size_t remaining() const noexcept { return m_data.size() - m_pos; }
    bool done() const noexcept { return m_pos == m_data.size(); }
    /// Throws unless the input has been fully consumed.
    void expect_done() const;

private:
    void need(size_t n) const;

    BytesView m_data;
    size_t m_pos = 0;
};

}  // namespace tcpa
