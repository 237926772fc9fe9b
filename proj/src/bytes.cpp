// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tcpa/bytes.hpp"

#include <algorithm>

namespace tcpa
{
std::string to_hex(BytesView data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (const uint8_t b : data)
    {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

static int hex_nibble(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0)
        throw DecodeError{"hex string has odd length"};
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2)
    {
        const int hi = hex_nibble(hex[i]);
        const int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw DecodeError{"invalid hex digit"};
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

bool contains(BytesView haystack, BytesView needle)
{
    if (needle.empty())
        return true;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

void ByteWriter::put_be32(uint32_t v)
{
    m_out.push_back(static_cast<uint8_t>(v >> 24));
    m_out.push_back(static_cast<uint8_t>(v >> 16));
    m_out.push_back(static_cast<uint8_t>(v >> 8));
    m_out.push_back(static_cast<uint8_t>(v));
}

void ByteWriter::put_be64(uint64_t v)
{
    put_be32(static_cast<uint32_t>(v >> 32));
    put_be32(static_cast<uint32_t>(v));
}

void ByteWriter::put_field(BytesView b)
{
    if (b.size() > 0xFFFFFFFFu)
        throw std::length_error{"field too large for 4-byte length prefix"};
    put_be32(static_cast<uint32_t>(b.size()));
    put_bytes(b);
}

void ByteReader::need(size_t n) const
{
    if (m_data.size() - m_pos < n)
        throw DecodeError{"input truncated"};
}

uint8_t ByteReader::u8()
{
    need(1);
    return m_data[m_pos++];
}

uint32_t ByteReader::be32()
{
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v = (v << 8) | m_data[m_pos++];
    return v;
}

uint64_t ByteReader::be64()
{
    const uint64_t hi = be32();
    return (hi << 32) | be32();
}

Bytes ByteReader::raw(size_t n)
{
    need(n);
    Bytes out(m_data.begin() + static_cast<ptrdiff_t>(m_pos),
        m_data.begin() + static_cast<ptrdiff_t>(m_pos + n));
    m_pos += n;
    return out;
}

Bytes ByteReader::field()
{
    const uint32_t len = be32();
    return raw(len);
}

Bytes ByteReader::rest()
{
    return raw(remaining());
}

void ByteReader::expect_done() const
{
    if (!done())
        throw DecodeError{"trailing bytes after value"};
}

}  // namespace tcpa
