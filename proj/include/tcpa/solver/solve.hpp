// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/solver/expr.hpp>

#include <vector>

namespace tcpa::solver
{
/// One recorded branch decision: the tested expression (always a 32-bit
/// term, as produced by branch conditions and synthesized guards) and the
/// truth it took on this path.
struct Conjunct
{
    ExprRef expr;
    bool expect_nonzero = true;
};

/// Conjuncts in branch-decision order along one path.
struct PathCondition
{
    std::vector<Conjunct> conjuncts;

    void require_nonzero(ExprRef e) { conjuncts.push_back({std::move(e), true}); }
    void require_zero(ExprRef e) { conjuncts.push_back({std::move(e), false}); }
};

struct SatResult
{
    enum class Status
    {
        sat,
        unsat,
        unknown,
    };
    enum class UnknownReason
    {
        budget,
        unsupported,
    };

    Status status = Status::unknown;
    /// Total assignment for every variable occurring in the condition;
    /// meaningful when status == sat.
    std::map<std::string, uint64_t> model;
    UnknownReason reason = UnknownReason::budget;

    bool sat() const noexcept { return status == Status::sat; }
    bool unsat() const noexcept { return status == Status::unsat; }
};

const char* sat_status_name(SatResult::Status s) noexcept;

struct CheckBudget
{
    uint32_t max_millis = 1000;
    uint64_t max_enumeration = 65536;
};

/// Sound decision procedure: constant/interval/known-bits propagation,
/// then exhaustive enumeration over the bits that can influence the
/// condition when that domain fits the enumeration budget, then
/// deterministic heuristic model search (algebraic inversion, harvested
/// constants, small-value sweep). sat always carries a verified model;
/// unsat is only reported when a sound argument exists; everything else
/// is unknown.
SatResult check_sat(const PathCondition& pc, CheckBudget budget = {});

}  // namespace tcpa::solver
