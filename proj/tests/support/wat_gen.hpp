// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

// Seeded random generator of text-subset programs, used to drive the
// parser-fidelity and oracle-equivalence suites.
namespace watgen
{
enum class Profile
{
    /// Entry "f" with 1-2 i32 parameters masked to 8 bits each, bounded
    /// loops, constant addresses: exhaustively enumerable by the concrete
    /// interpreter, so symbolic verdicts can be checked against brute force.
    oracle,
    /// Broad construct coverage (i64, br_table, tables, globals, floats in
    /// locals) for encode/parse roundtrips; not meant to be executed.
    fidelity,
};

struct Generated
{
    std::string source;
    int entry_params = 0;  // oracle profile: arity of export "f"
};

Generated generate(uint64_t seed, Profile profile);

}  // namespace watgen
