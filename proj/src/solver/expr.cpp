// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/solver/expr.hpp>

#include <stdexcept>

namespace tcpa::solver
{
namespace
{
uint64_t sext(uint64_t v, uint8_t width)
{
    if (width == 64)
        return v;
    const uint64_t sign = uint64_t{1} << (width - 1);
    return (v ^ sign) - sign;
}

bool valid_width(uint8_t w)
{
    return w == 32 || w == 64;
}

bool valid_var_name(const std::string& s)
{
    if (s.empty())
        return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (const char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
            return false;
    return true;
}
}  // namespace

const char* bin_op_name(BinOp op) noexcept
{
    switch (op)
    {
    case BinOp::add: return "add";
    case BinOp::sub: return "sub";
    case BinOp::mul: return "mul";
    case BinOp::div_s: return "div_s";
    case BinOp::div_u: return "div_u";
    case BinOp::rem_s: return "rem_s";
    case BinOp::rem_u: return "rem_u";
    case BinOp::and_: return "and";
    case BinOp::or_: return "or";
    case BinOp::xor_: return "xor";
    case BinOp::shl: return "shl";
    case BinOp::shr_s: return "shr_s";
    case BinOp::shr_u: return "shr_u";
    case BinOp::eq: return "eq";
    case BinOp::ne: return "ne";
    case BinOp::lt_s: return "lt_s";
    case BinOp::lt_u: return "lt_u";
    case BinOp::gt_s: return "gt_s";
    case BinOp::gt_u: return "gt_u";
    case BinOp::le_s: return "le_s";
    case BinOp::le_u: return "le_u";
    case BinOp::ge_s: return "ge_s";
    case BinOp::ge_u: return "ge_u";
    }
    return "?";
}

ExprRef mk_const(uint8_t width, uint64_t value)
{
    if (!valid_width(width))
        throw std::logic_error{"mk_const: width must be 32 or 64"};
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::constant;
    e->width = width;
    e->value = value & width_mask(width);
    return e;
}

ExprRef mk_var(std::string name, uint8_t width)
{
    if (!valid_width(width))
        throw std::logic_error{"mk_var: width must be 32 or 64"};
    if (!valid_var_name(name))
        throw std::logic_error{"mk_var: invalid variable name '" + name + "'"};
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::variable;
    e->width = width;
    e->name = std::move(name);
    return e;
}

ExprRef mk_unary(UnOp op, ExprRef a)
{
    if (!a)
        throw std::logic_error{"mk_unary: null operand"};
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::unary;
    e->width = 32;  // eqz yields an i32 boolean
    e->un = op;
    e->a = std::move(a);
    return e;
}

ExprRef mk_binary(BinOp op, ExprRef a, ExprRef b)
{
    if (!a || !b)
        throw std::logic_error{"mk_binary: null operand"};
    if (a->width != b->width)
        throw std::logic_error{std::string{"mk_binary: operand width mismatch for "} +
                               bin_op_name(op)};
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::binary;
    e->width = is_comparison(op) ? 32 : a->width;
    e->bin = op;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

bool is_const(const ExprRef& e, uint64_t value) noexcept
{
    return e && e->kind == Expr::Kind::constant && e->value == (value & width_mask(e->width));
}

bool expr_equal(const ExprRef& x, const ExprRef& y) noexcept
{
    if (x.get() == y.get())
        return true;
    if (!x || !y || x->kind != y->kind || x->width != y->width)
        return false;
    switch (x->kind)
    {
    case Expr::Kind::constant:
        return x->value == y->value;
    case Expr::Kind::variable:
        return x->name == y->name;
    case Expr::Kind::unary:
        return x->un == y->un && expr_equal(x->a, y->a);
    case Expr::Kind::binary:
        return x->bin == y->bin && expr_equal(x->a, y->a) && expr_equal(x->b, y->b);
    }
    return false;
}

std::string to_string(const ExprRef& e)
{
    if (!e)
        return "<null>";
    switch (e->kind)
    {
    case Expr::Kind::constant:
        return "(const" + std::string{e->width == 64 ? "64 " : " "} +
               std::to_string(e->value) + ")";
    case Expr::Kind::variable:
        return e->name;
    case Expr::Kind::unary:
        return "(eqz " + to_string(e->a) + ")";
    case Expr::Kind::binary:
        return "(" + std::string{bin_op_name(e->bin)} + " " + to_string(e->a) + " " +
               to_string(e->b) + ")";
    }
    return "?";
}

void collect_vars(const ExprRef& e, std::map<std::string, uint8_t>& out)
{
    if (!e)
        return;
    switch (e->kind)
    {
    case Expr::Kind::constant:
        return;
    case Expr::Kind::variable:
        out.emplace(e->name, e->width);
        return;
    case Expr::Kind::unary:
        collect_vars(e->a, out);
        return;
    case Expr::Kind::binary:
        collect_vars(e->a, out);
        collect_vars(e->b, out);
        return;
    }
}

std::optional<uint64_t> eval_expr(const ExprRef& e,
    const std::map<std::string, uint64_t>& env)
{
    if (!e)
        return std::nullopt;
    switch (e->kind)
    {
    case Expr::Kind::constant:
        return e->value;
    case Expr::Kind::variable:
    {
        const auto it = env.find(e->name);
        return (it == env.end() ? 0 : it->second) & width_mask(e->width);
    }
    case Expr::Kind::unary:
    {
        const auto a = eval_expr(e->a, env);
        if (!a)
            return std::nullopt;
        return *a == 0 ? 1 : 0;
    }
    case Expr::Kind::binary:
        break;
    }

    const auto av = eval_expr(e->a, env);
    const auto bv = eval_expr(e->b, env);
    if (!av || !bv)
        return std::nullopt;
    const uint8_t w = e->a->width;
    const uint64_t mask = width_mask(w);
    const uint64_t a = *av & mask;
    const uint64_t b = *bv & mask;
    const int64_t sa = static_cast<int64_t>(sext(a, w));
    const int64_t sb = static_cast<int64_t>(sext(b, w));
    const uint64_t int_min = uint64_t{1} << (w - 1);
    const uint32_t shift = static_cast<uint32_t>(b) & (w - 1);

    switch (e->bin)
    {
    case BinOp::add: return (a + b) & mask;
    case BinOp::sub: return (a - b) & mask;
    case BinOp::mul: return (a * b) & mask;
    case BinOp::div_u:
        if (b == 0)
            return std::nullopt;
        return a / b;
    case BinOp::rem_u:
        if (b == 0)
            return std::nullopt;
        return a % b;
    case BinOp::div_s:
        if (b == 0 || (a == int_min && sb == -1))
            return std::nullopt;
        return static_cast<uint64_t>(sa / sb) & mask;
    case BinOp::rem_s:
        if (b == 0)
            return std::nullopt;
        if (sb == -1)
            return 0;  // INT_MIN rem -1 included
        return static_cast<uint64_t>(sa % sb) & mask;
    case BinOp::and_: return a & b;
    case BinOp::or_: return a | b;
    case BinOp::xor_: return a ^ b;
    case BinOp::shl: return (a << shift) & mask;
    case BinOp::shr_u: return a >> shift;
    case BinOp::shr_s: return static_cast<uint64_t>(sa >> shift) & mask;
    case BinOp::eq: return a == b ? 1 : 0;
    case BinOp::ne: return a != b ? 1 : 0;
    case BinOp::lt_s: return sa < sb ? 1 : 0;
    case BinOp::lt_u: return a < b ? 1 : 0;
    case BinOp::gt_s: return sa > sb ? 1 : 0;
    case BinOp::gt_u: return a > b ? 1 : 0;
    case BinOp::le_s: return sa <= sb ? 1 : 0;
    case BinOp::le_u: return a <= b ? 1 : 0;
    case BinOp::ge_s: return sa >= sb ? 1 : 0;
    case BinOp::ge_u: return a >= b ? 1 : 0;
    }
    return std::nullopt;
}

}  // namespace tcpa::solver
