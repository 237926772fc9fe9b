// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smt_check.hpp"

#include <cctype>
#include <memory>
#include <stdexcept>
#include <vector>

namespace smtcheck
{
namespace
{

struct Node
{
    std::string atom;                         // empty for lists
    std::vector<std::unique_ptr<Node>> kids;  // empty for atoms
    bool is_atom() const { return kids.empty() && !atom.empty(); }
};

struct Tokenizer
{
    const std::string& s;
    size_t pos = 0;

    explicit Tokenizer(const std::string& src) : s(src) {}

    void skip_ws()
    {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }

    bool done()
    {
        skip_ws();
        return pos >= s.size();
    }

    std::string next()
    {
        skip_ws();
        if (pos >= s.size())
            throw std::runtime_error("smtcheck: unexpected end of script");
        const char c = s[pos];
        if (c == '(' || c == ')')
        {
            ++pos;
            return std::string(1, c);
        }
        const size_t start = pos;
        while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
               s[pos] != '(' && s[pos] != ')')
            ++pos;
        return s.substr(start, pos - start);
    }
};

std::unique_ptr<Node> parse_form(Tokenizer& tk)
{
    const std::string t = tk.next();
    if (t == ")")
        throw std::runtime_error("smtcheck: unbalanced ')'");
    auto n = std::make_unique<Node>();
    if (t != "(")
    {
        n->atom = t;
        return n;
    }
    for (;;)
    {
        tk.skip_ws();
        if (tk.pos < tk.s.size() && tk.s[tk.pos] == ')')
        {
            ++tk.pos;
            return n;
        }
        n->kids.push_back(parse_form(tk));
    }
}

// A value is either a bitvector of known width or a boolean.
struct Value
{
    bool is_bool = false;
    bool b = false;
    uint8_t width = 0;
    uint64_t bits = 0;
};

uint64_t mask_of(uint8_t w)
{
    return w == 64 ? ~uint64_t{0} : ((uint64_t{1} << w) - 1);
}

int64_t as_signed(uint64_t v, uint8_t w)
{
    const uint64_t sign = uint64_t{1} << (w - 1);
    if (v & sign)
        return static_cast<int64_t>(v | ~mask_of(w));
    return static_cast<int64_t>(v);
}

Value bv(uint8_t w, uint64_t v)
{
    Value out;
    out.width = w;
    out.bits = v & mask_of(w);
    return out;
}

Value boolean(bool v)
{
    Value out;
    out.is_bool = true;
    out.b = v;
    return out;
}

struct Script
{
    std::map<std::string, uint8_t> decls;
    std::vector<std::unique_ptr<Node>> asserts;
};

Value eval(const Node& n, const Script& sc, const std::map<std::string, uint64_t>& env)
{
    if (n.is_atom())
    {
        if (n.atom.size() > 2 && n.atom[0] == '#' && n.atom[1] == 'x')
        {
            const std::string hex = n.atom.substr(2);
            uint64_t v = 0;
            for (char c : hex)
            {
                v <<= 4;
                if (c >= '0' && c <= '9')
                    v |= static_cast<uint64_t>(c - '0');
                else if (c >= 'a' && c <= 'f')
                    v |= static_cast<uint64_t>(c - 'a' + 10);
                else
                    throw std::runtime_error("smtcheck: bad hex literal " + n.atom);
            }
            return bv(static_cast<uint8_t>(hex.size() * 4), v);
        }
        if (n.atom == "true")
            return boolean(true);
        if (n.atom == "false")
            return boolean(false);
        auto it = sc.decls.find(n.atom);
        if (it == sc.decls.end())
            throw std::runtime_error("smtcheck: undeclared symbol " + n.atom);
        auto ev = env.find(n.atom);
        return bv(it->second, ev == env.end() ? 0 : ev->second);
    }
    if (n.kids.empty() || !n.kids[0]->is_atom())
        throw std::runtime_error("smtcheck: malformed application");
    const std::string& op = n.kids[0]->atom;
    const size_t argc = n.kids.size() - 1;

    auto arg = [&](size_t i) { return eval(*n.kids[i + 1], sc, env); };

    if (op == "ite")
    {
        if (argc != 3)
            throw std::runtime_error("smtcheck: ite arity");
        const Value c = arg(0);
        if (!c.is_bool)
            throw std::runtime_error("smtcheck: ite condition not boolean");
        return c.b ? arg(1) : arg(2);
    }
    if (op == "and" || op == "or")
    {
        bool acc = (op == "and");
        for (size_t i = 0; i < argc; ++i)
        {
            const Value v = arg(i);
            if (!v.is_bool)
                throw std::runtime_error("smtcheck: and/or on non-boolean");
            acc = (op == "and") ? (acc && v.b) : (acc || v.b);
        }
        return boolean(acc);
    }
    if (op == "not")
    {
        const Value v = arg(0);
        if (argc != 1 || !v.is_bool)
            throw std::runtime_error("smtcheck: not arity/type");
        return boolean(!v.b);
    }
    if (op == "=" || op == "distinct")
    {
        if (argc != 2)
            throw std::runtime_error("smtcheck: =/distinct arity");
        const Value a = arg(0);
        const Value b = arg(1);
        if (a.is_bool != b.is_bool || (!a.is_bool && a.width != b.width))
            throw std::runtime_error("smtcheck: =/distinct sort mismatch");
        const bool eq = a.is_bool ? (a.b == b.b) : (a.bits == b.bits);
        return boolean(op == "=" ? eq : !eq);
    }

    // Remaining ops are binary over equal-width bitvectors.
    if (argc != 2)
        throw std::runtime_error("smtcheck: arity for " + op);
    const Value a = arg(0);
    const Value b = arg(1);
    if (a.is_bool || b.is_bool || a.width != b.width)
        throw std::runtime_error("smtcheck: operand sorts for " + op);
    const uint8_t w = a.width;
    const uint64_t m = mask_of(w);
    const int64_t sa = as_signed(a.bits, w);
    const int64_t sb = as_signed(b.bits, w);

    if (op == "bvult") return boolean(a.bits < b.bits);
    if (op == "bvule") return boolean(a.bits <= b.bits);
    if (op == "bvugt") return boolean(a.bits > b.bits);
    if (op == "bvuge") return boolean(a.bits >= b.bits);
    if (op == "bvslt") return boolean(sa < sb);
    if (op == "bvsle") return boolean(sa <= sb);
    if (op == "bvsgt") return boolean(sa > sb);
    if (op == "bvsge") return boolean(sa >= sb);

    if (op == "bvadd") return bv(w, a.bits + b.bits);
    if (op == "bvsub") return bv(w, a.bits - b.bits);
    if (op == "bvmul") return bv(w, a.bits * b.bits);
    if (op == "bvand") return bv(w, a.bits & b.bits);
    if (op == "bvor") return bv(w, a.bits | b.bits);
    if (op == "bvxor") return bv(w, a.bits ^ b.bits);

    if (op == "bvshl")
        return b.bits >= w ? bv(w, 0) : bv(w, a.bits << b.bits);
    if (op == "bvlshr")
        return b.bits >= w ? bv(w, 0) : bv(w, a.bits >> b.bits);
    if (op == "bvashr")
    {
        if (b.bits >= w)
            return bv(w, (a.bits >> (w - 1)) ? m : 0);
        return bv(w, static_cast<uint64_t>(sa >> b.bits));
    }

    // SMT-LIB total division: bvudiv by zero is all-ones, bvurem by zero
    // is the dividend; the signed forms are defined case-wise on top.
    if (op == "bvudiv")
        return bv(w, b.bits == 0 ? m : a.bits / b.bits);
    if (op == "bvurem")
        return bv(w, b.bits == 0 ? a.bits : a.bits % b.bits);
    if (op == "bvsdiv")
    {
        const uint64_t ua = static_cast<uint64_t>(sa < 0 ? -sa : sa) & m;
        const uint64_t ub = static_cast<uint64_t>(sb < 0 ? -sb : sb) & m;
        const uint64_t q = ub == 0 ? m : ua / ub;
        return bv(w, ((sa < 0) != (sb < 0)) ? (~q + 1) : q);
    }
    if (op == "bvsrem")
    {
        const uint64_t ua = static_cast<uint64_t>(sa < 0 ? -sa : sa) & m;
        const uint64_t ub = static_cast<uint64_t>(sb < 0 ? -sb : sb) & m;
        const uint64_t r = ub == 0 ? ua : ua % ub;
        return bv(w, sa < 0 ? (~r + 1) : r);
    }

    throw std::runtime_error("smtcheck: unsupported operator " + op);
}

Script parse_script(const std::string& text)
{
    Tokenizer tk(text);
    Script sc;
    bool saw_logic = false;
    bool saw_check = false;
    while (!tk.done())
    {
        auto form = parse_form(tk);
        if (form->is_atom() || form->kids.empty() || !form->kids[0]->is_atom())
            throw std::runtime_error("smtcheck: stray form at top level");
        const std::string& head = form->kids[0]->atom;
        if (head == "set-logic")
        {
            if (form->kids.size() != 2 || form->kids[1]->atom != "QF_BV")
                throw std::runtime_error("smtcheck: expected (set-logic QF_BV)");
            saw_logic = true;
        }
        else if (head == "declare-const")
        {
            if (form->kids.size() != 3 || !form->kids[1]->is_atom())
                throw std::runtime_error("smtcheck: malformed declare-const");
            const Node& sort = *form->kids[2];
            if (sort.kids.size() != 3 || sort.kids[0]->atom != "_" ||
                sort.kids[1]->atom != "BitVec")
                throw std::runtime_error("smtcheck: unsupported sort");
            const int w = std::stoi(sort.kids[2]->atom);
            if (w != 32 && w != 64)
                throw std::runtime_error("smtcheck: unsupported width");
            sc.decls[form->kids[1]->atom] = static_cast<uint8_t>(w);
        }
        else if (head == "assert")
        {
            if (form->kids.size() != 2)
                throw std::runtime_error("smtcheck: malformed assert");
            sc.asserts.push_back(std::move(form->kids[1]));
        }
        else if (head == "check-sat")
        {
            saw_check = true;
        }
        else
        {
            throw std::runtime_error("smtcheck: unsupported command " + head);
        }
    }
    if (!saw_logic || !saw_check)
        throw std::runtime_error("smtcheck: missing set-logic or check-sat");
    return sc;
}

}  // namespace

Decision decide_script(const std::string& script, uint64_t domain_per_var)
{
    const Script sc = parse_script(script);

    std::vector<std::string> names;
    for (const auto& [name, width] : sc.decls)
        names.push_back(name);

    std::map<std::string, uint64_t> env;
    // Odometer sweep over the per-variable domain.
    std::vector<uint64_t> idx(names.size(), 0);
    for (;;)
    {
        for (size_t i = 0; i < names.size(); ++i)
            env[names[i]] = idx[i];
        bool ok = true;
        for (const auto& a : sc.asserts)
        {
            const Value v = eval(*a, sc, env);
            if (!v.is_bool)
                throw std::runtime_error("smtcheck: assert body not boolean");
            if (!v.b)
            {
                ok = false;
                break;
            }
        }
        if (ok)
        {
            Decision d;
            d.verdict = Verdict::sat;
            d.model = env;
            return d;
        }
        size_t k = 0;
        while (k < idx.size())
        {
            if (++idx[k] < domain_per_var)
                break;
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size())
            break;
    }
    return Decision{};
}

}  // namespace smtcheck
