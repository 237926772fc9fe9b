// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/solver/simplify.hpp>

#include <bit>

namespace tcpa::solver
{
namespace
{
bool is_any_const(const ExprRef& e, uint64_t& out)
{
    if (e->kind != Expr::Kind::constant)
        return false;
    out = e->value;
    return true;
}

/// Folds a binary op over concrete operands via the shared evaluator;
/// trapping combinations (div by zero, INT_MIN/-1) stay unfolded.
ExprRef try_fold(BinOp op, const ExprRef& a, const ExprRef& b)
{
    const ExprRef node = mk_binary(op, a, b);
    const auto v = eval_expr(node, {});
    if (!v)
        return nullptr;
    return mk_const(node->width, *v);
}

ExprRef simplify_binary(BinOp op, ExprRef a, ExprRef b)
{
    const uint8_t w = a->width;
    uint64_t ca = 0, cb = 0;
    const bool a_const = is_any_const(a, ca);
    const bool b_const = is_any_const(b, cb);

    if (a_const && b_const)
        if (ExprRef folded = try_fold(op, a, b))
            return folded;

    const uint64_t ones = width_mask(w);
    const bool same = expr_equal(a, b);

    switch (op)
    {
    case BinOp::add:
        if (b_const && cb == 0)
            return a;
        if (a_const && ca == 0)
            return b;
        break;
    case BinOp::sub:
        if (b_const && cb == 0)
            return a;
        if (same)
            return mk_const(w, 0);
        break;
    case BinOp::mul:
        if (b_const && cb == 1)
            return a;
        if (a_const && ca == 1)
            return b;
        if ((b_const && cb == 0) || (a_const && ca == 0))
            return mk_const(w, 0);
        // Powers of two become shifts so bit-level reasoning sees them.
        if (b_const && std::has_single_bit(cb))
            return mk_binary(BinOp::shl, a,
                mk_const(w, static_cast<uint64_t>(std::countr_zero(cb))));
        if (a_const && std::has_single_bit(ca))
            return mk_binary(BinOp::shl, b,
                mk_const(w, static_cast<uint64_t>(std::countr_zero(ca))));
        break;
    case BinOp::div_u:
    case BinOp::div_s:
        if (b_const && cb == 1)
            return a;
        break;
    case BinOp::rem_u:
        if (b_const && cb == 1)
            return mk_const(w, 0);
        break;
    case BinOp::rem_s:
        if (b_const && (cb == 1 || cb == ones))  // x rem ±1 == 0
            return mk_const(w, 0);
        break;
    case BinOp::and_:
        if ((b_const && cb == 0) || (a_const && ca == 0))
            return mk_const(w, 0);
        if (b_const && cb == ones)
            return a;
        if (a_const && ca == ones)
            return b;
        if (same)
            return a;
        break;
    case BinOp::or_:
        if (b_const && cb == 0)
            return a;
        if (a_const && ca == 0)
            return b;
        if ((b_const && cb == ones) || (a_const && ca == ones))
            return mk_const(w, ones);
        if (same)
            return a;
        break;
    case BinOp::xor_:
        if (b_const && cb == 0)
            return a;
        if (a_const && ca == 0)
            return b;
        if (same)
            return mk_const(w, 0);
        break;
    case BinOp::shl:
    case BinOp::shr_u:
    case BinOp::shr_s:
        if (b_const && (cb & (w - 1)) == 0)
            return a;
        if (a_const && ca == 0)
            return mk_const(w, 0);
        break;
    case BinOp::eq:
    case BinOp::le_u:
    case BinOp::le_s:
    case BinOp::ge_u:
    case BinOp::ge_s:
        if (same)
            return mk_const(32, 1);
        break;
    case BinOp::ne:
    case BinOp::lt_u:
    case BinOp::lt_s:
    case BinOp::gt_u:
    case BinOp::gt_s:
        if (same)
            return mk_const(32, 0);
        break;
    }
    return mk_binary(op, std::move(a), std::move(b));
}
}  // namespace

ExprRef simplify(const ExprRef& e)
{
    if (!e)
        return e;
    switch (e->kind)
    {
    case Expr::Kind::constant:
    case Expr::Kind::variable:
        return e;
    case Expr::Kind::unary:
    {
        const ExprRef a = simplify(e->a);
        if (a->kind == Expr::Kind::constant)
            return mk_const(32, a->value == 0 ? 1 : 0);
        if (a.get() == e->a.get())
            return e;
        return mk_unary(e->un, a);
    }
    case Expr::Kind::binary:
    {
        ExprRef a = simplify(e->a);
        ExprRef b = simplify(e->b);
        ExprRef r = simplify_binary(e->bin, std::move(a), std::move(b));
        // A rewrite may expose another redex at this node (e.g. mul by a
        // power of two turning into a shift by zero); re-run on change.
        if (!expr_equal(r, e))
            return simplify(r);
        return e;
    }
    }
    return e;
}

}  // namespace tcpa::solver
