// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace tcpa::solver
{
/// Bitvector expressions over 32- and 64-bit terms, mirroring the integer
/// instruction subset. Comparisons and eqz produce 32-bit {0,1} values.
/// Nodes are immutable and shared; expressions form acyclic DAGs.

enum class UnOp : uint8_t
{
    eqz,
};

enum class BinOp : uint8_t
{
    add,
    sub,
    mul,
    div_s,
    div_u,
    rem_s,
    rem_u,
    and_,
    or_,
    xor_,
    shl,
    shr_s,
    shr_u,
    eq,
    ne,
    lt_s,
    lt_u,
    gt_s,
    gt_u,
    le_s,
    le_u,
    ge_s,
    ge_u,
};

constexpr bool is_comparison(BinOp op) noexcept
{
    return op >= BinOp::eq;
}

const char* bin_op_name(BinOp op) noexcept;

struct Expr;
using ExprRef = std::shared_ptr<const Expr>;

struct Expr
{
    enum class Kind : uint8_t
    {
        constant,
        variable,
        unary,
        binary,
    };

    Kind kind = Kind::constant;
    /// 32 or 64. For comparisons and eqz this is the result width (32),
    /// while the operand width lives in the children.
    uint8_t width = 32;
    uint64_t value = 0;  // constant payload, truncated to width
    std::string name;    // variable payload
    UnOp un = UnOp::eqz;
    BinOp bin = BinOp::add;
    ExprRef a;
    ExprRef b;
};

constexpr uint64_t width_mask(uint8_t width) noexcept
{
    return width == 64 ? ~uint64_t{0} : 0xFFFFFFFFull;
}

/// Constructors enforce the width discipline: binary operand widths must
/// agree; shifts share the operand width; variable names must be plain
/// identifiers ([A-Za-z_][A-Za-z0-9_.]*) so they print as SMT-LIB symbols.
/// Violations throw std::logic_error: they indicate a bug in the caller,
/// not a data-dependent condition.
ExprRef mk_const(uint8_t width, uint64_t value);
ExprRef mk_var(std::string name, uint8_t width);
ExprRef mk_unary(UnOp op, ExprRef a);
ExprRef mk_binary(BinOp op, ExprRef a, ExprRef b);

bool is_const(const ExprRef& e, uint64_t value) noexcept;

/// Structural equality (constants by value, variables by name, operators
/// recursively). Shared subtrees compare by pointer first.
bool expr_equal(const ExprRef& x, const ExprRef& y) noexcept;

/// Debug rendering as an s-expression, e.g. "(add x (const 7))".
std::string to_string(const ExprRef& e);

/// Collects free variables into name -> width.
void collect_vars(const ExprRef& e, std::map<std::string, uint8_t>& out);

/// Evaluates under an assignment with semantics identical to the concrete
/// interpreter: wraparound arithmetic, shift counts mod width, truncating
/// signed division. Returns nullopt where the interpreter would trap
/// (division by zero, INT_MIN / -1). Unbound variables evaluate to 0.
std::optional<uint64_t> eval_expr(const ExprRef& e,
    const std::map<std::string, uint64_t>& env);

}  // namespace tcpa::solver
