// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "expr_eval.hpp"

namespace oracle
{
using tcpa::solver::BinOp;
using tcpa::solver::Expr;
using tcpa::solver::ExprRef;

namespace
{
// 32-bit semantics, value in the low half.
std::optional<uint64_t> apply32(BinOp op, uint32_t a, uint32_t b)
{
    const int32_t sa = static_cast<int32_t>(a);
    const int32_t sb = static_cast<int32_t>(b);
    const uint32_t sh = b % 32;
    switch (op)
    {
    case BinOp::add: return uint32_t(a + b);
    case BinOp::sub: return uint32_t(a - b);
    case BinOp::mul: return uint32_t(a * b);
    case BinOp::div_u:
        if (b == 0)
            return std::nullopt;
        return a / b;
    case BinOp::rem_u:
        if (b == 0)
            return std::nullopt;
        return a % b;
    case BinOp::div_s:
        if (b == 0)
            return std::nullopt;
        if (sa == INT32_MIN && sb == -1)
            return std::nullopt;
        return uint32_t(sa / sb);
    case BinOp::rem_s:
        if (b == 0)
            return std::nullopt;
        if (sb == -1)
            return 0;
        return uint32_t(sa % sb);
    case BinOp::and_: return a & b;
    case BinOp::or_: return a | b;
    case BinOp::xor_: return a ^ b;
    case BinOp::shl: return uint32_t(a << sh);
    case BinOp::shr_u: return a >> sh;
    case BinOp::shr_s: return uint32_t(sa >> sh);
    case BinOp::eq: return a == b;
    case BinOp::ne: return a != b;
    case BinOp::lt_s: return sa < sb;
    case BinOp::lt_u: return a < b;
    case BinOp::gt_s: return sa > sb;
    case BinOp::gt_u: return a > b;
    case BinOp::le_s: return sa <= sb;
    case BinOp::le_u: return a <= b;
    case BinOp::ge_s: return sa >= sb;
    case BinOp::ge_u: return a >= b;
    }
    return std::nullopt;
}

std::optional<uint64_t> apply64(BinOp op, uint64_t a, uint64_t b)
{
    const int64_t sa = static_cast<int64_t>(a);
    const int64_t sb = static_cast<int64_t>(b);
    const uint32_t sh = static_cast<uint32_t>(b % 64);
    switch (op)
    {
    case BinOp::add: return a + b;
    case BinOp::sub: return a - b;
    case BinOp::mul: return a * b;
    case BinOp::div_u:
        if (b == 0)
            return std::nullopt;
        return a / b;
    case BinOp::rem_u:
        if (b == 0)
            return std::nullopt;
        return a % b;
    case BinOp::div_s:
        if (b == 0)
            return std::nullopt;
        if (sa == INT64_MIN && sb == -1)
            return std::nullopt;
        return uint64_t(sa / sb);
    case BinOp::rem_s:
        if (b == 0)
            return std::nullopt;
        if (sb == -1)
            return 0;
        return uint64_t(sa % sb);
    case BinOp::and_: return a & b;
    case BinOp::or_: return a | b;
    case BinOp::xor_: return a ^ b;
    case BinOp::shl: return a << sh;
    case BinOp::shr_u: return a >> sh;
    case BinOp::shr_s: return uint64_t(sa >> sh);
    case BinOp::eq: return a == b;
    case BinOp::ne: return a != b;
    case BinOp::lt_s: return sa < sb;
    case BinOp::lt_u: return a < b;
    case BinOp::gt_s: return sa > sb;
    case BinOp::gt_u: return a > b;
    case BinOp::le_s: return sa <= sb;
    case BinOp::le_u: return a <= b;
    case BinOp::ge_s: return sa >= sb;
    case BinOp::ge_u: return a >= b;
    }
    return std::nullopt;
}
}  // namespace

std::optional<uint64_t> eval(const ExprRef& e, const std::map<std::string, uint64_t>& env)
{
    switch (e->kind)
    {
    case Expr::Kind::constant:
        return e->value;
    case Expr::Kind::variable:
    {
        const auto it = env.find(e->name);
        const uint64_t raw = it == env.end() ? 0 : it->second;
        return e->width == 32 ? (raw & 0xFFFFFFFFull) : raw;
    }
    case Expr::Kind::unary:
    {
        const auto a = eval(e->a, env);
        if (!a)
            return std::nullopt;
        return *a == 0 ? 1 : 0;
    }
    case Expr::Kind::binary:
    {
        const auto a = eval(e->a, env);
        const auto b = eval(e->b, env);
        if (!a || !b)
            return std::nullopt;
        if (e->a->width == 32)
            return apply32(e->bin, static_cast<uint32_t>(*a), static_cast<uint32_t>(*b));
        return apply64(e->bin, *a, *b);
    }
    }
    return std::nullopt;
}

}  // namespace oracle
