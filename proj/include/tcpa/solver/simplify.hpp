// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/solver/expr.hpp>

namespace tcpa::solver
{
/// Semantics-preserving rewriting: constant folding under wraparound
/// semantics, algebraic identities (x+0, x^0, x&x, ...), comparison
/// folding, and canonicalization of multiplications by powers of two into
/// shifts. Division and remainder fold only when the concrete operands
/// cannot trap. The result is a fixed point: simplify(simplify(e)) is
/// structurally equal to simplify(e).
ExprRef simplify(const ExprRef& e);

}  // namespace tcpa::solver
