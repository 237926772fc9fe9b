// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/wasm/leb128.hpp>

namespace tcpa::wasm
{
uint64_t read_uleb(Cursor& cur, unsigned bits)
{
    const size_t start = cur.pos;
    const unsigned max_bytes = (bits + 6) / 7;
    uint64_t result = 0;
    for (unsigned i = 0; i < max_bytes; ++i)
    {
        const uint8_t byte = cur.u8();
        result |= static_cast<uint64_t>(byte & 0x7f) << (7 * i);
        if ((byte & 0x80) == 0)
        {
            if (bits < 64 && result >= (uint64_t{1} << bits))
                throw ParseError{ParseError::Kind::TruncatedInput,
                    "integer too large for u" + std::to_string(bits), start};
            // In the final byte only the low bits of the group may be set.
            const unsigned used = 7 * i;
            if (used < bits && bits < used + 7)
            {
                const uint8_t allowed = static_cast<uint8_t>((1u << (bits - used)) - 1);
                if ((byte & ~allowed & 0x7f) != 0)
                    throw ParseError{ParseError::Kind::TruncatedInput,
                        "integer too large for u" + std::to_string(bits), start};
            }
            return result;
        }
    }
    throw ParseError{
        ParseError::Kind::TruncatedInput, "integer representation too long", start};
}

int64_t read_sleb(Cursor& cur, unsigned bits)
{
    const size_t start = cur.pos;
    const unsigned max_bytes = (bits + 6) / 7;
    uint64_t result = 0;
    for (unsigned i = 0; i < max_bytes; ++i)
    {
        const uint8_t byte = cur.u8();
        result |= static_cast<uint64_t>(byte & 0x7f) << (7 * i);
        if ((byte & 0x80) == 0)
        {
            const unsigned shift = 7 * (i + 1);
            if (shift < 64 && (byte & 0x40) != 0)
                result |= ~uint64_t{0} << shift;
            const auto value = static_cast<int64_t>(result);
            if (bits < 64)
            {
                const int64_t lo = -(int64_t{1} << (bits - 1));
                const int64_t hi = (int64_t{1} << (bits - 1)) - 1;
                if (value < lo || value > hi)
                    throw ParseError{ParseError::Kind::TruncatedInput,
                        "integer too large for s" + std::to_string(bits), start};
            }
            return value;
        }
    }
    throw ParseError{
        ParseError::Kind::TruncatedInput, "integer representation too long", start};
}

void write_uleb(Bytes& out, uint64_t value)
{
    do
    {
        uint8_t byte = value & 0x7f;
        value >>= 7;
        if (value != 0)
            byte |= 0x80;
        out.push_back(byte);
    } while (value != 0);
}

void write_sleb(Bytes& out, int64_t value)
{
    while (true)
    {
        const uint8_t byte = value & 0x7f;
        value >>= 7;
        const bool sign = (byte & 0x40) != 0;
        if ((value == 0 && !sign) || (value == -1 && sign))
        {
            out.push_back(byte);
            return;
        }
        out.push_back(byte | 0x80);
    }
}

}  // namespace tcpa::wasm
