// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/solver/solve.hpp>

#include <string>

namespace tcpa::solver
{
/// Renders a path condition as an SMT-LIB v2 script (logic QF_BV) whose
/// verdict under any conforming solver matches check_sat semantics.
///
/// Printing order is fixed: the set-logic line, declarations sorted by
/// variable name, one assert per conjunct in path order, then
/// (check-sat). Constants print as #x literals (lowercase, full width).
/// Comparisons and eqz print as (ite ... #x00000001 #x00000000) to
/// mirror their i32 {0,1} semantics; shift amounts are masked with
/// width-1 to match the wrapping shift-count semantics.
std::string export_smtlib(const PathCondition& pc);

/// Renders one expression in the same dialect (exposed for tooling).
std::string smtlib_expr(const ExprRef& e);

}  // namespace tcpa::solver
