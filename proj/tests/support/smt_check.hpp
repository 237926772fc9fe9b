// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

// Independent decision procedure for the restricted SMT-LIB scripts the
// solver exports. Parses the script text from scratch (no sharing with the
// production expression types) and evaluates the asserts under SMT-LIB
// fixed-size bitvector semantics. Division is total here (bvudiv by zero
// yields all-ones, bvurem by zero yields the dividend) exactly as the
// SMT-LIB theory defines, so any trap handling must already be encoded
// in the script itself.
//
// Deciding satisfiability by enumeration is exact only when the script
// constrains every variable occurrence to a small domain; the test corpus
// masks each occurrence to 8 bits, so sweeping 0..255 per variable decides
// the script. Callers pass the per-variable domain bound.

#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace smtcheck
{

enum class Verdict
{
    sat,
    unsat,
};

struct Decision
{
    Verdict verdict = Verdict::unsat;
    std::map<std::string, uint64_t> model;  // populated when sat
};

// Throws std::runtime_error on any construct outside the exported grammar.
Decision decide_script(const std::string& script, uint64_t domain_per_var);

}  // namespace smtcheck
