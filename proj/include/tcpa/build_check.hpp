// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "tcpa/bytes.hpp"
#include "tcpa/wasm/source_map.hpp"

#include <string_view>

// Builder execution and the executable-equality outcome eo.
//
// The isolated computation rebuilds the decrypted source with the agreed
// builder configuration and syntactically compares the result against the
// executable the consumer submitted. v1 ships exactly one builder, the
// reference assembler; richer equivalence checkers can slot in behind
// compare_executables without changing the protocol.

namespace tcpa::build_check
{
struct BuildFailed : std::runtime_error
{
    BuildFailed(const std::string& msg, uint32_t line_, uint32_t col_)
      : std::runtime_error{msg}, line{line_}, col{col_}
    {}

    uint32_t line;
    uint32_t col;
};

/// The b_config parameter image. Its serialization is byte-for-byte what
/// feeds the measurement, so two parties agreeing on a BuilderConfig agree
/// on the bytes.
struct BuilderConfig
{
    enum class Kind : uint8_t
    {
        reference_assembler = 0,
    };

    Kind kind = Kind::reference_assembler;
    bool deterministic = true;

    bool operator==(const BuilderConfig&) const = default;

    /// One line per field: "builder reference_assembler\ndeterministic 1\n".
    Bytes serialize() const;
    static BuilderConfig deserialize(BytesView bytes);
};

struct BuildResult
{
    Bytes executable;
    wasm::SourceMap map;
};

/// Runs the builder on source text. Deterministic: identical sources give
/// identical bytes. Throws BuildFailed with the offending position.
BuildResult build_executable(const BuilderConfig& b, std::string_view source);

/// The executable-equality outcome: byte-for-byte comparison.
bool compare_executables(BytesView e, BytesView e_prime);

}  // namespace tcpa::build_check
