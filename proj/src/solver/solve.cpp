// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/solver/simplify.hpp>
#include <tcpa/solver/solve.hpp>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <set>

namespace tcpa::solver
{
namespace
{
using Clock = std::chrono::steady_clock;

uint64_t smear_down(uint64_t m)
{
    if (m == 0)
        return 0;
    return ~uint64_t{0} >> (64 - std::bit_width(m));
}

int64_t sext(uint64_t v, uint8_t w)
{
    if (w == 64)
        return static_cast<int64_t>(v);
    const uint64_t sign = uint64_t{1} << (w - 1);
    return static_cast<int64_t>(((v & width_mask(w)) ^ sign) - sign);
}

// ---------------------------------------------------------------------
// Interval / known-bits abstract values. The value set of a node is
// always a subset of [lo, hi] intersected with the bit constraints:
// no bit outside `possible` is ever 1, every bit in `guaranteed` is.
// ---------------------------------------------------------------------

struct Range
{
    uint8_t width = 32;
    uint64_t lo = 0;
    uint64_t hi = 0;
    uint64_t possible = 0;
    uint64_t guaranteed = 0;

    static Range full(uint8_t w)
    {
        return {w, 0, width_mask(w), width_mask(w), 0};
    }
    static Range constant(uint8_t w, uint64_t v)
    {
        v &= width_mask(w);
        return {w, v, v, v, v};
    }
    static Range boolean() { return {32, 0, 1, 1, 0}; }

    bool empty() const { return lo > hi || (guaranteed & ~possible) != 0; }
    bool singleton() const { return lo == hi; }
    bool excludes_zero() const { return lo > 0 || guaranteed != 0; }
    bool is_zero() const { return hi == 0; }

    Range normalized() const
    {
        Range r = *this;
        r.possible &= smear_down(r.hi);
        r.lo = std::max(r.lo, r.guaranteed);
        r.hi = std::min(r.hi, r.possible);
        return r;
    }
};

/// Signed bounds when the unsigned interval stays within one sign region.
std::optional<std::pair<int64_t, int64_t>> signed_bounds(const Range& r)
{
    const uint64_t half = uint64_t{1} << (r.width - 1);
    if (r.hi < half || r.lo >= half)
        return std::make_pair(sext(r.lo, r.width), sext(r.hi, r.width));
    return std::nullopt;
}

Range bool_range(std::optional<bool> decided)
{
    if (!decided)
        return Range::boolean();
    return Range::constant(32, *decided ? 1 : 0);
}

using VarRanges = std::map<std::string, Range>;

Range analyze(const ExprRef& e, const VarRanges& vars);

Range analyze_compare(BinOp op, const Range& a, const Range& b)
{
    std::optional<bool> decided;
    const bool bits_disjoint = (a.guaranteed & ~b.possible) || (b.guaranteed & ~a.possible);
    switch (op)
    {
    case BinOp::eq:
        if (a.hi < b.lo || b.hi < a.lo || bits_disjoint)
            decided = false;
        else if (a.singleton() && b.singleton() && a.lo == b.lo)
            decided = true;
        break;
    case BinOp::ne:
        if (a.hi < b.lo || b.hi < a.lo || bits_disjoint)
            decided = true;
        else if (a.singleton() && b.singleton() && a.lo == b.lo)
            decided = false;
        break;
    case BinOp::lt_u:
        if (a.hi < b.lo)
            decided = true;
        else if (a.lo >= b.hi)
            decided = false;
        break;
    case BinOp::le_u:
        if (a.hi <= b.lo)
            decided = true;
        else if (a.lo > b.hi)
            decided = false;
        break;
    case BinOp::gt_u:
        if (a.lo > b.hi)
            decided = true;
        else if (a.hi <= b.lo)
            decided = false;
        break;
    case BinOp::ge_u:
        if (a.lo >= b.hi)
            decided = true;
        else if (a.hi < b.lo)
            decided = false;
        break;
    case BinOp::lt_s:
    case BinOp::le_s:
    case BinOp::gt_s:
    case BinOp::ge_s:
    {
        const auto sa = signed_bounds(a);
        const auto sb = signed_bounds(b);
        if (sa && sb)
        {
            if (op == BinOp::lt_s)
            {
                if (sa->second < sb->first)
                    decided = true;
                else if (sa->first >= sb->second)
                    decided = false;
            }
            else if (op == BinOp::le_s)
            {
                if (sa->second <= sb->first)
                    decided = true;
                else if (sa->first > sb->second)
                    decided = false;
            }
            else if (op == BinOp::gt_s)
            {
                if (sa->first > sb->second)
                    decided = true;
                else if (sa->second <= sb->first)
                    decided = false;
            }
            else
            {
                if (sa->first >= sb->second)
                    decided = true;
                else if (sa->second < sb->first)
                    decided = false;
            }
        }
        break;
    }
    default:
        break;
    }
    return bool_range(decided);
}

Range analyze(const ExprRef& e, const VarRanges& vars)
{
    switch (e->kind)
    {
    case Expr::Kind::constant:
        return Range::constant(e->width, e->value);
    case Expr::Kind::variable:
    {
        const auto it = vars.find(e->name);
        return it != vars.end() ? it->second : Range::full(e->width);
    }
    case Expr::Kind::unary:
    {
        const Range a = analyze(e->a, vars);
        if (a.excludes_zero())
            return Range::constant(32, 0);
        if (a.is_zero())
            return Range::constant(32, 1);
        return Range::boolean();
    }
    case Expr::Kind::binary:
        break;
    }

    const Range a = analyze(e->a, vars);
    const Range b = analyze(e->b, vars);
    const uint8_t w = e->a->width;
    const uint64_t mask = width_mask(w);

    if (is_comparison(e->bin))
        return analyze_compare(e->bin, a, b);

    Range r = Range::full(w);
    switch (e->bin)
    {
    case BinOp::add:
        if (a.hi <= mask - b.hi)
            r = {w, a.lo + b.lo, a.hi + b.hi, smear_down(a.hi + b.hi), 0};
        break;
    case BinOp::sub:
        if (a.lo >= b.hi)
            r = {w, a.lo - b.hi, a.hi - b.lo, smear_down(a.hi), 0};
        break;
    case BinOp::mul:
        if (b.hi == 0 || a.hi <= mask / b.hi)
            r = {w, a.lo * b.lo, a.hi * b.hi, smear_down(a.hi * b.hi), 0};
        break;
    case BinOp::div_u:
    {
        const uint64_t hi = a.hi / std::max<uint64_t>(b.lo, 1);
        const uint64_t lo = b.hi == 0 ? 0 : a.lo / b.hi;
        r = {w, lo, hi, smear_down(hi), 0};
        break;
    }
    case BinOp::rem_u:
    {
        const uint64_t hi = std::min(a.hi, b.hi == 0 ? 0 : b.hi - 1);
        r = {w, 0, hi, smear_down(hi), 0};
        break;
    }
    case BinOp::div_s:
    case BinOp::rem_s:
        break;  // full
    case BinOp::and_:
    {
        const uint64_t poss = a.possible & b.possible;
        const uint64_t guar = a.guaranteed & b.guaranteed;
        r = {w, guar, std::min({a.hi, b.hi, poss}), poss, guar};
        break;
    }
    case BinOp::or_:
    {
        const uint64_t poss = a.possible | b.possible;
        const uint64_t guar = a.guaranteed | b.guaranteed;
        r = {w, std::max({a.lo, b.lo, guar}), poss, poss, guar};
        break;
    }
    case BinOp::xor_:
    {
        const uint64_t poss = a.possible | b.possible;
        const uint64_t guar = (a.guaranteed & ~b.possible) | (b.guaranteed & ~a.possible);
        r = {w, guar, poss, poss, guar};
        break;
    }
    case BinOp::shl:
        if (b.singleton())
        {
            const uint32_t k = static_cast<uint32_t>(b.lo) & (w - 1);
            if (a.hi <= (mask >> k))
                r = {w, a.lo << k, a.hi << k, (a.possible << k) & mask,
                    (a.guaranteed << k) & mask};
            else
                r = {w, 0, mask, (a.possible << k) & mask, (a.guaranteed << k) & mask};
        }
        break;
    case BinOp::shr_u:
        if (b.singleton())
        {
            const uint32_t k = static_cast<uint32_t>(b.lo) & (w - 1);
            r = {w, a.lo >> k, a.hi >> k, a.possible >> k, a.guaranteed >> k};
        }
        break;
    case BinOp::shr_s:
        if (b.singleton())
        {
            const uint32_t k = static_cast<uint32_t>(b.lo) & (w - 1);
            const uint64_t sign = uint64_t{1} << (w - 1);
            if (!(a.possible & sign))  // never negative
                r = {w, a.lo >> k, a.hi >> k, a.possible >> k, a.guaranteed >> k};
        }
        break;
    default:
        break;
    }
    r = r.normalized();
    if (r.empty())
        return Range::full(w);  // conservative; emptiness here means imprecision
    return r;
}

// ---------------------------------------------------------------------
// Interval refinement: conjuncts of the shapes var, eqz(var) and
// cmp(var, const) tighten the variable's interval. Returns false when a
// variable's interval becomes empty (the condition is unsatisfiable).
// ---------------------------------------------------------------------

BinOp negate_cmp(BinOp op)
{
    switch (op)
    {
    case BinOp::eq: return BinOp::ne;
    case BinOp::ne: return BinOp::eq;
    case BinOp::lt_u: return BinOp::ge_u;
    case BinOp::ge_u: return BinOp::lt_u;
    case BinOp::gt_u: return BinOp::le_u;
    case BinOp::le_u: return BinOp::gt_u;
    case BinOp::lt_s: return BinOp::ge_s;
    case BinOp::ge_s: return BinOp::lt_s;
    case BinOp::gt_s: return BinOp::le_s;
    case BinOp::le_s: return BinOp::gt_s;
    default: return op;
    }
}

BinOp swap_cmp(BinOp op)
{
    switch (op)
    {
    case BinOp::lt_u: return BinOp::gt_u;
    case BinOp::gt_u: return BinOp::lt_u;
    case BinOp::le_u: return BinOp::ge_u;
    case BinOp::ge_u: return BinOp::le_u;
    case BinOp::lt_s: return BinOp::gt_s;
    case BinOp::gt_s: return BinOp::lt_s;
    case BinOp::le_s: return BinOp::ge_s;
    case BinOp::ge_s: return BinOp::le_s;
    default: return op;  // eq, ne symmetric
    }
}

bool intersect(Range& r, uint64_t lo, uint64_t hi)
{
    r.lo = std::max(r.lo, lo);
    r.hi = std::min(r.hi, hi);
    return !r.empty();
}

/// Applies "var <op> c is true" to the variable's interval.
bool refine_cmp(Range& r, BinOp op, uint64_t c)
{
    const uint8_t w = r.width;
    const uint64_t mask = width_mask(w);
    const uint64_t half = uint64_t{1} << (w - 1);
    c &= mask;
    switch (op)
    {
    case BinOp::eq:
        return intersect(r, c, c);
    case BinOp::ne:
        if (r.lo == c && r.lo < mask)
            r.lo++;
        if (r.hi == c && r.hi > 0)
            r.hi--;
        return !r.empty() && !(r.singleton() && r.lo == c);
    case BinOp::lt_u:
        return c != 0 && intersect(r, 0, c - 1);
    case BinOp::le_u:
        return intersect(r, 0, c);
    case BinOp::gt_u:
        return c != mask && intersect(r, c + 1, mask);
    case BinOp::ge_u:
        return intersect(r, c, mask);
    case BinOp::lt_s:
        // Contiguous unsigned solution sets only.
        if (c == 0)
            return intersect(r, half, mask);
        if (c >= half)  // negative bound: [half, c-1]
            return intersect(r, half, c - 1);
        return true;  // wrapping set; leave unrefined
    case BinOp::le_s:
        if (c == mask)  // <= -1: all negatives
            return intersect(r, half, mask);
        if (c >= half)
            return intersect(r, half, c);
        return true;
    case BinOp::gt_s:
        if (c == mask)  // > -1: all non-negatives
            return intersect(r, 0, half - 1);
        if (c < half)
            return intersect(r, c + 1, half - 1);
        return true;
    case BinOp::ge_s:
        if (c == 0)
            return intersect(r, 0, half - 1);
        if (c < half)
            return intersect(r, c, half - 1);
        return true;
    default:
        return true;
    }
}

/// One refinement application of a conjunct; false means contradiction.
bool refine_from(const Conjunct& cj, VarRanges& vars)
{
    const ExprRef& e = cj.expr;
    bool truth = cj.expect_nonzero;
    const Expr* node = e.get();

    // eqz flips the expected truth of its operand's zero-ness.
    const ExprRef* target = &e;
    if (node->kind == Expr::Kind::unary)
    {
        target = &node->a;
        truth = !truth;
        node = target->get();
        // nested eqz(eqz(x)) handled by one more hop
        if (node->kind == Expr::Kind::unary)
        {
            target = &node->a;
            truth = !truth;
            node = target->get();
        }
    }

    if (node->kind == Expr::Kind::variable)
    {
        auto it = vars.find(node->name);
        if (it == vars.end())
            return true;
        Range& r = it->second;
        if (truth)  // var != 0
            return refine_cmp(r, BinOp::ne, 0);
        return intersect(r, 0, 0);
    }

    if (node->kind == Expr::Kind::binary && is_comparison(node->bin))
    {
        BinOp op = node->bin;
        const Expr* lhs = node->a.get();
        const Expr* rhs = node->b.get();
        if (lhs->kind == Expr::Kind::constant && rhs->kind == Expr::Kind::variable)
        {
            std::swap(lhs, rhs);
            op = swap_cmp(op);
        }
        if (lhs->kind == Expr::Kind::variable && rhs->kind == Expr::Kind::constant)
        {
            if (!truth)
                op = negate_cmp(op);
            auto it = vars.find(lhs->name);
            if (it == vars.end())
                return true;
            return refine_cmp(it->second, op, rhs->value);
        }
    }
    return true;
}

// ---------------------------------------------------------------------
// Demanded bits: which bits of each variable can influence a conjunct's
// value or trap behavior.
// ---------------------------------------------------------------------

void demand_bits(const ExprRef& e, uint64_t need, std::map<std::string, uint64_t>& out)
{
    need &= width_mask(e->width);
    if (need == 0 && e->kind != Expr::Kind::binary)
        return;
    switch (e->kind)
    {
    case Expr::Kind::constant:
        return;
    case Expr::Kind::variable:
        out[e->name] |= need;
        return;
    case Expr::Kind::unary:
        demand_bits(e->a, width_mask(e->a->width), out);
        return;
    case Expr::Kind::binary:
        break;
    }

    const ExprRef& a = e->a;
    const ExprRef& b = e->b;
    const uint64_t full = width_mask(a->width);
    if (is_comparison(e->bin))
    {
        demand_bits(a, full, out);
        demand_bits(b, full, out);
        return;
    }

    switch (e->bin)
    {
    case BinOp::add:
    case BinOp::sub:
    case BinOp::mul:
    {
        const uint64_t low = smear_down(need);
        demand_bits(a, low, out);
        demand_bits(b, low, out);
        return;
    }
    case BinOp::and_:
        if (b->kind == Expr::Kind::constant)
        {
            demand_bits(a, need & b->value, out);
            return;
        }
        if (a->kind == Expr::Kind::constant)
        {
            demand_bits(b, need & a->value, out);
            return;
        }
        demand_bits(a, need, out);
        demand_bits(b, need, out);
        return;
    case BinOp::or_:
        if (b->kind == Expr::Kind::constant)
        {
            demand_bits(a, need & ~b->value, out);
            return;
        }
        if (a->kind == Expr::Kind::constant)
        {
            demand_bits(b, need & ~a->value, out);
            return;
        }
        demand_bits(a, need, out);
        demand_bits(b, need, out);
        return;
    case BinOp::xor_:
        demand_bits(a, need, out);
        demand_bits(b, need, out);
        return;
    case BinOp::shl:
        if (b->kind == Expr::Kind::constant)
        {
            const uint32_t k = static_cast<uint32_t>(b->value) & (a->width - 1);
            demand_bits(a, need >> k, out);
            return;
        }
        break;
    case BinOp::shr_u:
        if (b->kind == Expr::Kind::constant)
        {
            const uint32_t k = static_cast<uint32_t>(b->value) & (a->width - 1);
            demand_bits(a, (need << k) & full, out);
            return;
        }
        break;
    case BinOp::shr_s:
        if (b->kind == Expr::Kind::constant)
        {
            const uint32_t k = static_cast<uint32_t>(b->value) & (a->width - 1);
            const uint64_t sign = uint64_t{1} << (a->width - 1);
            demand_bits(a, ((need << k) | sign) & full, out);
            return;
        }
        break;
    default:
        break;
    }
    // Division, remainder and variable-count shifts: value and trap
    // behavior can depend on every bit of both operands.
    demand_bits(a, full, out);
    demand_bits(b, full, out);
}

// ---------------------------------------------------------------------
// Enumeration machinery
// ---------------------------------------------------------------------

struct EnumVar
{
    std::string name;
    uint8_t width = 32;
    uint64_t mask = 0;  // demanded bits
    int bits = 0;
};

uint64_t scatter(uint64_t value, uint64_t mask)
{
    uint64_t out = 0;
    while (mask)
    {
        const uint64_t bit = mask & (~mask + 1);
        if (value & 1)
            out |= bit;
        value >>= 1;
        mask &= mask - 1;
    }
    return out;
}

struct Search
{
    const std::vector<Conjunct>& conjuncts;
    const std::map<std::string, uint8_t>& var_widths;
    Clock::time_point deadline;
    uint64_t evals_left;
    bool timed_out = false;

    bool spend()
    {
        if (evals_left == 0)
            return false;
        --evals_left;
        if ((evals_left & 1023) == 0 && Clock::now() > deadline)
        {
            timed_out = true;
            return false;
        }
        return true;
    }

    bool satisfies(const std::map<std::string, uint64_t>& env) const
    {
        for (const Conjunct& cj : conjuncts)
        {
            const auto v = eval_expr(cj.expr, env);
            if (!v || (*v != 0) != cj.expect_nonzero)
                return false;
        }
        return true;
    }

    std::map<std::string, uint64_t> full_model(
        const std::map<std::string, uint64_t>& env) const
    {
        std::map<std::string, uint64_t> m;
        for (const auto& [name, width] : var_widths)
        {
            const auto it = env.find(name);
            m[name] = it == env.end() ? 0 : it->second & width_mask(width);
        }
        return m;
    }
};

uint64_t modular_inverse(uint64_t c, uint8_t w)
{
    // Newton iteration; c must be odd.
    uint64_t x = c;
    for (int i = 0; i < 6; ++i)
        x *= 2 - c * x;
    return x & width_mask(w);
}

/// Walks an invertible chain E(v) == target down to a variable, producing
/// the unique candidate value for v, if the chain stays invertible.
void invert_chain(const ExprRef& e, uint64_t target,
    std::map<std::string, std::set<uint64_t>>& candidates)
{
    const uint8_t w = e->width;
    const uint64_t mask = width_mask(w);
    target &= mask;
    if (e->kind == Expr::Kind::variable)
    {
        candidates[e->name].insert(target);
        return;
    }
    if (e->kind != Expr::Kind::binary)
        return;
    const ExprRef& a = e->a;
    const ExprRef& b = e->b;
    const bool bc = b->kind == Expr::Kind::constant;
    const bool ac = a->kind == Expr::Kind::constant;
    switch (e->bin)
    {
    case BinOp::add:
        if (bc)
            invert_chain(a, target - b->value, candidates);
        else if (ac)
            invert_chain(b, target - a->value, candidates);
        return;
    case BinOp::sub:
        if (bc)
            invert_chain(a, target + b->value, candidates);
        else if (ac)
            invert_chain(b, a->value - target, candidates);
        return;
    case BinOp::xor_:
        if (bc)
            invert_chain(a, target ^ b->value, candidates);
        else if (ac)
            invert_chain(b, target ^ a->value, candidates);
        return;
    case BinOp::mul:
        if (bc && (b->value & 1))
            invert_chain(a, target * modular_inverse(b->value, w), candidates);
        else if (ac && (a->value & 1))
            invert_chain(b, target * modular_inverse(a->value, w), candidates);
        return;
    case BinOp::shl:
        if (bc)
        {
            const uint32_t k = static_cast<uint32_t>(b->value) & (w - 1);
            if ((target & ((uint64_t{1} << k) - 1)) == 0)
                invert_chain(a, target >> k, candidates);
        }
        return;
    default:
        return;
    }
}

void harvest_constants(const ExprRef& e, uint8_t for_width,
    std::set<uint64_t>& out)
{
    if (e->kind == Expr::Kind::constant)
    {
        const uint64_t mask = width_mask(for_width);
        const uint64_t c = e->value & mask;
        out.insert(c);
        out.insert((c + 1) & mask);
        out.insert((c - 1) & mask);
        out.insert(~c & mask);
        out.insert((0 - c) & mask);
        return;
    }
    if (e->a)
        harvest_constants(e->a, for_width, out);
    if (e->b)
        harvest_constants(e->b, for_width, out);
}
}  // namespace

const char* sat_status_name(SatResult::Status s) noexcept
{
    switch (s)
    {
    case SatResult::Status::sat: return "sat";
    case SatResult::Status::unsat: return "unsat";
    case SatResult::Status::unknown: return "unknown";
    }
    return "?";
}

SatResult check_sat(const PathCondition& pc, CheckBudget budget)
{
    const auto deadline =
        Clock::now() + std::chrono::milliseconds(std::max<uint32_t>(budget.max_millis, 1));

    // Simplify; discharge variable-free conjuncts immediately.
    std::vector<Conjunct> live;
    std::map<std::string, uint8_t> var_widths;
    for (const Conjunct& cj : pc.conjuncts)
    {
        Conjunct s{simplify(cj.expr), cj.expect_nonzero};
        if (!s.expr || s.expr->width != 32)
            return {SatResult::Status::unknown, {}, SatResult::UnknownReason::unsupported};
        std::map<std::string, uint8_t> vars;
        collect_vars(s.expr, vars);
        if (vars.empty())
        {
            const auto v = eval_expr(s.expr, {});
            if (!v || (*v != 0) != s.expect_nonzero)
                return {SatResult::Status::unsat, {}, {}};
            continue;  // trivially satisfied
        }
        var_widths.insert(vars.begin(), vars.end());
        live.push_back(std::move(s));
    }
    if (live.empty())
        return {SatResult::Status::sat, {}, {}};

    // Interval refinement from simple conjunct shapes, then a
    // contradiction sweep with the refined variable ranges.
    VarRanges ranges;
    for (const auto& [name, width] : var_widths)
        ranges.emplace(name, Range::full(width));
    for (int pass = 0; pass < 2; ++pass)
        for (const Conjunct& cj : live)
            if (!refine_from(cj, ranges))
                return {SatResult::Status::unsat, {}, {}};
    for (const Conjunct& cj : live)
    {
        const Range r = analyze(cj.expr, ranges);
        if (cj.expect_nonzero ? r.is_zero() : r.excludes_zero())
            return {SatResult::Status::unsat, {}, {}};
    }

    Search search{live, var_widths, deadline,
        std::max<uint64_t>(budget.max_enumeration, 1), false};

    // Exhaustive enumeration over influencing bits when the quotient
    // domain fits the budget. Bits outside the demanded masks cannot
    // change any conjunct's value or trap behavior, so covering all
    // demanded patterns decides the condition exactly.
    std::map<std::string, uint64_t> demand;
    for (const Conjunct& cj : live)
        demand_bits(cj.expr, width_mask(cj.expr->width), demand);

    std::vector<EnumVar> evars;
    long double domain = 1;
    for (const auto& [name, width] : var_widths)
    {
        const auto it = demand.find(name);
        const uint64_t mask = it == demand.end() ? 0 : it->second & width_mask(width);
        if (mask == 0)
            continue;
        const int bits = std::popcount(mask);
        evars.push_back({name, width, mask, bits});
        domain *= std::exp2(static_cast<long double>(bits));
    }

    if (domain <= static_cast<long double>(search.evals_left))
    {
        const uint64_t total = static_cast<uint64_t>(domain);
        std::map<std::string, uint64_t> env;
        for (uint64_t index = 0; index < total; ++index)
        {
            if (!search.spend())
                return {SatResult::Status::unknown, {}, SatResult::UnknownReason::budget};
            uint64_t rest = index;
            for (const EnumVar& v : evars)
            {
                env[v.name] = scatter(rest & ((uint64_t{1} << v.bits) - 1), v.mask);
                rest >>= v.bits;
            }
            if (search.satisfies(env))
                return {SatResult::Status::sat, search.full_model(env), {}};
        }
        return {SatResult::Status::unsat, {}, {}};
    }

    // Heuristic model search: algebraic inversion of eq-with-constant
    // conjuncts, harvested constants, interval endpoints, then a small
    // joint sweep. Finds models only; exhaustion is not implied.
    std::map<std::string, std::set<uint64_t>> cand;
    for (const Conjunct& cj : live)
    {
        const ExprRef& e = cj.expr;
        if (e->kind == Expr::Kind::binary && e->bin == BinOp::eq)
        {
            if (cj.expect_nonzero)
            {
                if (e->b->kind == Expr::Kind::constant)
                    invert_chain(e->a, e->b->value, cand);
                if (e->a->kind == Expr::Kind::constant)
                    invert_chain(e->b, e->a->value, cand);
            }
        }
        if (e->kind == Expr::Kind::binary && e->bin == BinOp::ne && !cj.expect_nonzero)
        {
            if (e->b->kind == Expr::Kind::constant)
                invert_chain(e->a, e->b->value, cand);
            if (e->a->kind == Expr::Kind::constant)
                invert_chain(e->b, e->a->value, cand);
        }
        if (e->kind == Expr::Kind::unary && cj.expect_nonzero)
            invert_chain(e->a, 0, cand);
        if (!cj.expect_nonzero && e->kind != Expr::Kind::unary)
            invert_chain(e, 0, cand);
    }

    std::vector<std::pair<std::string, std::vector<uint64_t>>> cand_lists;
    for (const auto& [name, width] : var_widths)
    {
        std::set<uint64_t> s = cand.count(name) ? cand[name] : std::set<uint64_t>{};
        std::set<uint64_t> consts;
        for (const Conjunct& cj : live)
            harvest_constants(cj.expr, width, consts);
        s.insert(consts.begin(), consts.end());
        s.insert(0);
        s.insert(1);
        s.insert(width_mask(width));
        const Range& r = ranges.at(name);
        s.insert(r.lo);
        s.insert(r.hi);
        s.insert(r.lo + (r.hi - r.lo) / 2);
        std::vector<uint64_t> list(s.begin(), s.end());
        if (list.size() > 32)
            list.resize(32);
        cand_lists.emplace_back(name, std::move(list));
    }

    const auto try_product = [&](const auto& lists) -> std::optional<SatResult>
    {
        std::vector<size_t> idx(lists.size(), 0);
        std::map<std::string, uint64_t> env;
        while (true)
        {
            if (!search.spend())
                return SatResult{SatResult::Status::unknown, {},
                    SatResult::UnknownReason::budget};
            for (size_t i = 0; i < lists.size(); ++i)
                env[lists[i].first] = lists[i].second[idx[i]];
            if (search.satisfies(env))
                return SatResult{SatResult::Status::sat, search.full_model(env), {}};
            size_t i = 0;
            for (; i < lists.size(); ++i)
            {
                if (++idx[i] < lists[i].second.size())
                    break;
                idx[i] = 0;
            }
            if (i == lists.size())
                return std::nullopt;
        }
    };

    // try_product yields a result only when it found a model or ran out
    // of budget; nullopt means the candidate space was exhausted.
    if (auto r = try_product(cand_lists))
        return *r;

    std::vector<std::pair<std::string, std::vector<uint64_t>>> sweep_lists;
    for (const auto& [name, width] : var_widths)
    {
        (void)width;
        std::vector<uint64_t> vals(256);
        for (uint64_t i = 0; i < 256; ++i)
            vals[i] = i;
        sweep_lists.emplace_back(name, std::move(vals));
    }
    if (auto r = try_product(sweep_lists))
        return *r;

    return {SatResult::Status::unknown, {}, SatResult::UnknownReason::budget};
}

}  // namespace tcpa::solver
