// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/bytes.hpp>
#include <tcpa/wasm/errors.hpp>

#include <cstdint>

namespace tcpa::wasm
{
/// Byte cursor over an input buffer. Reads throw ParseError{TruncatedInput}
/// past the end; `offset` is useful for error reporting.
struct Cursor
{
    BytesView data;
    size_t pos = 0;

    bool done() const noexcept { return pos >= data.size(); }
    size_t remaining() const noexcept { return data.size() - pos; }

    uint8_t u8()
    {
        if (pos >= data.size())
            throw ParseError{ParseError::Kind::TruncatedInput, "unexpected end of input", pos};
        return data[pos++];
    }

    uint8_t peek() const
    {
        if (pos >= data.size())
            throw ParseError{ParseError::Kind::TruncatedInput, "unexpected end of input", pos};
        return data[pos];
    }

    BytesView raw(size_t n)
    {
        if (remaining() < n)
            throw ParseError{ParseError::Kind::TruncatedInput, "unexpected end of input", pos};
        const auto out = data.subspan(pos, n);
        pos += n;
        return out;
    }
};

/// Unsigned LEB128, at most `bits` significant bits. Non-minimal encodings
/// are accepted; values that do not fit are TruncatedInput-class errors.
uint64_t read_uleb(Cursor& cur, unsigned bits);

/// Signed LEB128 restricted to `bits`-bit two's complement range.
int64_t read_sleb(Cursor& cur, unsigned bits);

inline uint32_t read_u32(Cursor& cur)
{
    return static_cast<uint32_t>(read_uleb(cur, 32));
}

/// Minimal (canonical) encodings.
void write_uleb(Bytes& out, uint64_t value);
void write_sleb(Bytes& out, int64_t value);

}  // namespace tcpa::wasm
