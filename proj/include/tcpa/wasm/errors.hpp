// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tcpa::wasm
{
/// Raised while decoding or validating a binary module.
struct ParseError : std::runtime_error
{
    enum class Kind
    {
        BadMagic,
        UnsupportedSection,
        UnsupportedOpcode,
        TruncatedInput,
        ValidationFailure,
        MalformedNesting,
    };

    ParseError(Kind k, const std::string& msg, size_t offset_ = 0)
      : std::runtime_error{msg}, kind{k}, offset{offset_}
    {}

    Kind kind;
    /// Byte offset in the input where the problem was detected, when known.
    size_t offset;
};

/// Raised by the text assembler; positions are 1-based.
struct AsmError : std::runtime_error
{
    enum class Kind
    {
        SyntaxError,
        UnsupportedConstruct,
    };

    AsmError(Kind k, const std::string& msg, uint32_t line_, uint32_t col_)
      : std::runtime_error{msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)},
        kind{k},
        line{line_},
        col{col_}
    {}

    Kind kind;
    uint32_t line;
    uint32_t col;
};

}  // namespace tcpa::wasm
