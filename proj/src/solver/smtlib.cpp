// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/solver/smtlib.hpp>

#include <map>

namespace tcpa::solver
{
namespace
{
std::string hex_lit(uint64_t v, uint8_t width)
{
    static const char* digits = "0123456789abcdef";
    const int n = width / 4;
    std::string s(static_cast<size_t>(n) + 2, '0');
    s[0] = '#';
    s[1] = 'x';
    for (int i = 0; i < n; ++i)
        s[2 + (n - 1 - i)] = digits[(v >> (4 * i)) & 0xF];
    return s;
}

std::string zero_lit(uint8_t width)
{
    return hex_lit(0, width);
}

const char* bv_fn(BinOp op)
{
    switch (op)
    {
    case BinOp::add: return "bvadd";
    case BinOp::sub: return "bvsub";
    case BinOp::mul: return "bvmul";
    case BinOp::div_s: return "bvsdiv";
    case BinOp::div_u: return "bvudiv";
    case BinOp::rem_s: return "bvsrem";
    case BinOp::rem_u: return "bvurem";
    case BinOp::and_: return "bvand";
    case BinOp::or_: return "bvor";
    case BinOp::xor_: return "bvxor";
    case BinOp::shl: return "bvshl";
    case BinOp::shr_s: return "bvashr";
    case BinOp::shr_u: return "bvlshr";
    default: return nullptr;
    }
}

const char* bv_pred(BinOp op)
{
    switch (op)
    {
    case BinOp::eq: return "=";
    case BinOp::ne: return "distinct";
    case BinOp::lt_s: return "bvslt";
    case BinOp::lt_u: return "bvult";
    case BinOp::gt_s: return "bvsgt";
    case BinOp::gt_u: return "bvugt";
    case BinOp::le_s: return "bvsle";
    case BinOp::le_u: return "bvule";
    case BinOp::ge_s: return "bvsge";
    case BinOp::ge_u: return "bvuge";
    default: return nullptr;
    }
}
}  // namespace

std::string smtlib_expr(const ExprRef& e)
{
    switch (e->kind)
    {
    case Expr::Kind::constant:
        return hex_lit(e->value, e->width);
    case Expr::Kind::variable:
        return e->name;
    case Expr::Kind::unary:
        return "(ite (= " + smtlib_expr(e->a) + " " + zero_lit(e->a->width) +
               ") #x00000001 #x00000000)";
    case Expr::Kind::binary:
        break;
    }

    const std::string a = smtlib_expr(e->a);
    const std::string b = smtlib_expr(e->b);
    if (const char* pred = bv_pred(e->bin))
        return "(ite (" + std::string{pred} + " " + a + " " + b +
               ") #x00000001 #x00000000)";

    const uint8_t w = e->a->width;
    if (e->bin == BinOp::shl || e->bin == BinOp::shr_s || e->bin == BinOp::shr_u)
    {
        // Wrap the count to match mod-width shift semantics.
        const std::string masked = "(bvand " + b + " " + hex_lit(w - 1, w) + ")";
        return "(" + std::string{bv_fn(e->bin)} + " " + a + " " + masked + ")";
    }
    return "(" + std::string{bv_fn(e->bin)} + " " + a + " " + b + ")";
}

namespace
{
/// Division and remainder are total in SMT-LIB but trap under the
/// interpreter's semantics. Each division node contributes guard terms
/// so a script model is exactly an assignment the interpreter accepts:
/// nonzero divisors, and no INT_MIN / -1 for signed division.
void collect_trap_guards(const ExprRef& e, std::vector<std::string>& out)
{
    if (e->kind == Expr::Kind::unary)
    {
        collect_trap_guards(e->a, out);
        return;
    }
    if (e->kind != Expr::Kind::binary)
        return;
    collect_trap_guards(e->a, out);
    collect_trap_guards(e->b, out);

    const uint8_t w = e->a->width;
    switch (e->bin)
    {
    case BinOp::div_u:
    case BinOp::rem_u:
    case BinOp::rem_s:
        out.push_back("(distinct " + smtlib_expr(e->b) + " " + zero_lit(w) + ")");
        break;
    case BinOp::div_s:
        out.push_back("(distinct " + smtlib_expr(e->b) + " " + zero_lit(w) + ")");
        out.push_back("(not (and (= " + smtlib_expr(e->a) + " " +
                      hex_lit(uint64_t{1} << (w - 1), w) + ") (= " + smtlib_expr(e->b) +
                      " " + hex_lit(width_mask(w), w) + ")))");
        break;
    default:
        break;
    }
}
}  // namespace

std::string export_smtlib(const PathCondition& pc)
{
    std::map<std::string, uint8_t> vars;
    for (const Conjunct& cj : pc.conjuncts)
        collect_vars(cj.expr, vars);

    std::string out = "(set-logic QF_BV)\n";
    for (const auto& [name, width] : vars)
        out += "(declare-const " + name + " (_ BitVec " + std::to_string(width) + "))\n";
    for (const Conjunct& cj : pc.conjuncts)
    {
        const std::string zero = zero_lit(cj.expr->width);
        const std::string truth = cj.expect_nonzero
            ? "(distinct " + smtlib_expr(cj.expr) + " " + zero + ")"
            : "(= " + smtlib_expr(cj.expr) + " " + zero + ")";
        std::vector<std::string> guards;
        collect_trap_guards(cj.expr, guards);
        if (guards.empty())
        {
            out += "(assert " + truth + ")\n";
            continue;
        }
        out += "(assert (and";
        for (const std::string& g : guards)
            out += " " + g;
        out += " " + truth + "))\n";
    }
    out += "(check-sat)\n";
    return out;
}

}  // namespace tcpa::solver
