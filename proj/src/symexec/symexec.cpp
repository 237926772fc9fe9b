// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/symexec/symexec.hpp>

#include <tcpa/solver/simplify.hpp>

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include <sys/resource.h>

namespace tcpa::symexec
{
using solver::BinOp;
using solver::ExprRef;
using solver::UnOp;
using wasm::Opcode;

namespace
{

uint8_t width_of(wasm::ValType t)
{
    return (t == wasm::ValType::i64 || t == wasm::ValType::f64) ? 64 : 32;
}

ExprRef const_of(uint8_t w, uint64_t v)
{
    return solver::mk_const(w, v & solver::width_mask(w));
}

bool is_const_expr(const ExprRef& e)
{
    return e->kind == solver::Expr::Kind::constant;
}

ExprRef simp_binary(BinOp op, const ExprRef& a, const ExprRef& b)
{
    return solver::simplify(solver::mk_binary(op, a, b));
}

/// Opcode classification over the byte ranges of the integer subset.
struct BinClass
{
    BinOp op;
    uint8_t width;
};

std::optional<BinClass> classify_binary(Opcode op)
{
    const auto byte = static_cast<uint8_t>(op);
    static constexpr BinOp CMP[10] = {BinOp::eq, BinOp::ne, BinOp::lt_s, BinOp::lt_u,
        BinOp::gt_s, BinOp::gt_u, BinOp::le_s, BinOp::le_u, BinOp::ge_s, BinOp::ge_u};
    static constexpr BinOp ARITH[13] = {BinOp::add, BinOp::sub, BinOp::mul, BinOp::div_s,
        BinOp::div_u, BinOp::rem_s, BinOp::rem_u, BinOp::and_, BinOp::or_, BinOp::xor_,
        BinOp::shl, BinOp::shr_s, BinOp::shr_u};
    if (byte >= 0x46 && byte <= 0x4F)
        return BinClass{CMP[byte - 0x46], 32};
    if (byte >= 0x51 && byte <= 0x5A)
        return BinClass{CMP[byte - 0x51], 64};
    if (byte >= 0x6A && byte <= 0x76)
        return BinClass{ARITH[byte - 0x6A], 32};
    if (byte >= 0x7C && byte <= 0x88)
        return BinClass{ARITH[byte - 0x7C], 64};
    return std::nullopt;
}

bool is_div_or_rem(BinOp op)
{
    return op == BinOp::div_s || op == BinOp::div_u || op == BinOp::rem_s ||
        op == BinOp::rem_u;
}

Frame& top(Configuration& c)
{
    return c.k_f.back();
}

SymVal pop_val(Configuration& c)
{
    SymVal v = std::move(c.k_o.back());
    c.k_o.pop_back();
    return v;
}

void prune_guards(Frame& f)
{
    std::erase_if(f.guards, [&](const Guard& g) { return g.depth > f.ctrl.size(); });
}

/// Draws the dependency edges for an assignment to `vertex`: data edges
/// from everything the defining computation read, control edges from the
/// live branch guards of the current frame.
void draw_assign(Configuration& c, const std::string& vertex,
    const std::set<std::string>& taint)
{
    c.graph.add_vertex(vertex);
    for (const std::string& t : taint)
        c.graph.add_edge(t, vertex, EdgeKind::data_flow);
    for (const Guard& g : top(c).guards)
        c.graph.add_edge(g.vertex, vertex, EdgeKind::control_flow);
}

uint8_t label_arity(const wasm::Instruction& ins)
{
    return ins.imm0 == 0x40 ? 0 : 1;
}

const wasm::Module& module_of(const Analysis& a)
{
    return a.modules.front();
}

uint64_t mem_size_bytes(const Analysis& a)
{
    const wasm::Module& m = module_of(a);
    return m.memories.empty() ? 0 :
                                uint64_t{m.memories[0].initial_pages} * wasm::PAGE_SIZE;
}

void sync_src(const Analysis& a, Configuration& c)
{
    if (c.status != Configuration::Status::running)
        return;
    const Frame& f = c.k_f.back();
    c.pc = {f.func_index, f.ip};
    const wasm::Function& fn = module_of(a).code_of(f.func_index);
    c.src = {0, 0};
    if (f.ip < fn.body.size())
        if (const auto e = a.src_map.lookup(fn.body[f.ip].byte_offset))
            c.src = {e->line, e->col};
}

/// Appends "expr != 0" unless it is trivially true; returns false when the
/// conjunct is constant false (successor must be dropped).
bool add_nonzero(Configuration& c, const ExprRef& e)
{
    const ExprRef s = solver::simplify(e);
    if (is_const_expr(s))
        return s->value != 0;
    c.path_condition.require_nonzero(s);
    return true;
}

bool add_zero(Configuration& c, const ExprRef& e)
{
    const ExprRef s = solver::simplify(e);
    if (is_const_expr(s))
        return s->value == 0;
    c.path_condition.require_zero(s);
    return true;
}

/// Unwinds the current frame; entry-frame unwinds finish the path.
void leave_frame(const Analysis& a, Configuration& c)
{
    const Frame f = std::move(c.k_f.back());
    c.k_f.pop_back();
    const wasm::Module& m = module_of(a);
    const wasm::FunctionType& ft = m.types[m.code_of(f.func_index).type_index];
    const size_t nres = ft.results.size();
    std::vector<SymVal> results(std::make_move_iterator(c.k_o.end() - nres),
        std::make_move_iterator(c.k_o.end()));
    c.k_o.resize(f.base);
    for (SymVal& v : results)
        c.k_o.push_back(std::move(v));
    if (c.k_f.empty())
    {
        c.status = Configuration::Status::returned;
        c.results = std::move(c.k_o);
        c.k_o.clear();
    }
}

/// Taken branch to relative depth d, mirroring the interpreter: loop
/// targets jump to the loop header (counting one unrolling), other targets
/// jump past the matching end. Depths beyond the label stack return.
void do_branch(const Analysis& a, Configuration& c, uint32_t depth)
{
    Frame& f = top(c);
    if (depth >= f.ctrl.size())
    {
        leave_frame(a, c);
        return;
    }
    const CtrlEntry entry = f.ctrl[f.ctrl.size() - 1 - depth];
    const uint8_t arity = entry.is_loop ? 0 : entry.arity;
    std::vector<SymVal> carried(std::make_move_iterator(c.k_o.end() - arity),
        std::make_move_iterator(c.k_o.end()));
    c.k_o.resize(entry.height);
    for (SymVal& v : carried)
        c.k_o.push_back(std::move(v));
    f.ctrl.resize(f.ctrl.size() - depth - 1);
    prune_guards(f);
    if (entry.is_loop)
    {
        f.ip = entry.instr;
        ++f.unroll[entry.instr];
    }
    else
    {
        const wasm::Function& fn = module_of(a).code_of(f.func_index);
        f.ip = fn.flow.entries[entry.instr].matching_end + 1;
    }
}

/// Pops the arguments and pushes a callee frame. Argument flow draws data
/// edges into the callee's parameter locals; the caller's live guards are
/// inherited for the lifetime of the callee frame.
void enter_function(const Analysis& a, Configuration& c, uint32_t callee,
    const std::optional<std::string>& extra_guard)
{
    const wasm::Module& m = module_of(a);
    const wasm::Function& fn = m.code_of(callee);
    const wasm::FunctionType& ft = m.types[fn.type_index];
    const size_t nparams = ft.params.size();

    std::vector<SymVal> args(nparams);
    for (size_t i = nparams; i-- > 0;)
        args[i] = pop_val(c);
    for (size_t i = 0; i < nparams; ++i)
        draw_assign(c, local_vertex(callee, static_cast<uint32_t>(i)), args[i].taint);

    Frame nf;
    nf.func_index = callee;
    nf.ip = 0;
    nf.base = c.k_o.size();
    nf.locals.reserve(nparams + fn.locals.size());
    for (SymVal& v : args)
        nf.locals.push_back(std::move(v.expr));
    for (const wasm::ValType t : fn.locals)
        nf.locals.push_back(const_of(width_of(t), 0));
    for (const Guard& g : top(c).guards)
        nf.guards.push_back({g.vertex, 0});
    if (extra_guard)
        nf.guards.push_back({*extra_guard, 0});
    c.k_f.push_back(std::move(nf));
}

struct ConcretizeResult
{
    bool ok = false;
    std::vector<uint64_t> values;
    std::string fail_reason;  // "concretize" or "solver"
};

/// Enumerates the feasible values of e under the path condition, up to
/// max_values of them.
ConcretizeResult concretize(const Configuration& c, const ExprRef& e, size_t max_values,
    const solver::CheckBudget& budget)
{
    ConcretizeResult r;
    if (is_const_expr(e))
    {
        r.ok = true;
        r.values.push_back(e->value);
        return r;
    }
    solver::PathCondition pc = c.path_condition;
    for (;;)
    {
        const solver::SatResult s = solver::check_sat(pc, budget);
        if (s.status == solver::SatResult::Status::unknown)
        {
            r.fail_reason = "solver";
            return r;
        }
        if (s.status == solver::SatResult::Status::unsat)
            break;
        const auto v = solver::eval_expr(e, s.model);
        if (!v)
        {
            r.fail_reason = "solver";
            return r;
        }
        r.values.push_back(*v);
        if (r.values.size() > max_values)
        {
            r.fail_reason = "concretize";
            return r;
        }
        pc.require_zero(simp_binary(BinOp::eq, e, const_of(e->width, *v)));
    }
    std::sort(r.values.begin(), r.values.end());
    r.ok = true;
    return r;
}

/// Builds successors for a single instruction. Mirrors the interpreter's
/// transfer function over symbolic state.
class Stepper
{
public:
    Stepper(const Analysis& a, const Configuration& c, const solver::CheckBudget& budget)
      : m_a{a}, m_c{c}, m_budget{budget}, m_m{module_of(a)}
    {}

    std::vector<Configuration> run();

private:
    // Fresh mutable copy of the source configuration with the step counted.
    Configuration base() const
    {
        Configuration n = m_c;
        ++n.steps;
        return n;
    }

    void finish_running(Configuration&& n)
    {
        sync_src(m_a, n);
        m_out.push_back(std::move(n));
    }

    void finish_trap(Configuration&& n, interp::TrapReason reason)
    {
        const Frame& f = n.k_f.back();
        const wasm::Instruction& ins = m_m.code_of(f.func_index).body[f.ip];
        n.status = Configuration::Status::trapped;
        n.trap = TrapSite{reason, f.func_index, f.ip, ins.byte_offset};
        n.pc = {f.func_index, f.ip};
        m_out.push_back(std::move(n));
    }

    void finish_abort(Configuration&& n, const std::string& reason)
    {
        n.status = Configuration::Status::aborted;
        n.abort_reason = reason;
        m_out.push_back(std::move(n));
    }

    void step_assert_import(const wasm::Instruction& ins);
    void step_binary(const wasm::Instruction& ins, BinClass bc);
    void step_branch_if(const wasm::Instruction& ins);
    void step_branch_table(const wasm::Instruction& ins);
    void step_if(const wasm::Instruction& ins);
    void step_select();
    void step_memory(const wasm::Instruction& ins);
    void dispatch_indirect(Configuration&& n, uint32_t table_index, uint32_t type_index,
        const std::optional<std::string>& guard_vertex);

    const Analysis& m_a;
    const Configuration& m_c;
    const solver::CheckBudget& m_budget;
    const wasm::Module& m_m;
    std::vector<Configuration> m_out;
};

void Stepper::step_assert_import(const wasm::Instruction&)
{
    const ExprRef cond_expr = solver::simplify(m_c.k_o.back().expr);
    if (is_const_expr(cond_expr))
    {
        Configuration n = base();
        pop_val(n);
        if (cond_expr->value == 0)
        {
            finish_trap(std::move(n), interp::TrapReason::assert_failed);
        }
        else
        {
            ++top(n).ip;
            finish_running(std::move(n));
        }
        return;
    }
    // Surviving the assertion first, then the failing branch.
    {
        Configuration n = base();
        pop_val(n);
        if (add_nonzero(n, cond_expr))
        {
            ++top(n).ip;
            finish_running(std::move(n));
        }
    }
    {
        Configuration n = base();
        pop_val(n);
        if (add_zero(n, cond_expr))
            finish_trap(std::move(n), interp::TrapReason::assert_failed);
    }
}

void Stepper::step_binary(const wasm::Instruction& ins, BinClass bc)
{
    if (!is_div_or_rem(bc.op))
    {
        Configuration n = base();
        const SymVal b = pop_val(n);
        const SymVal a = pop_val(n);
        SymVal res;
        res.expr = simp_binary(bc.op, a.expr, b.expr);
        res.taint = a.taint;
        res.taint.insert(b.taint.begin(), b.taint.end());
        n.k_o.push_back(std::move(res));
        ++top(n).ip;
        finish_running(std::move(n));
        return;
    }

    // Division family: the continuing successor carries the trap-excluding
    // conjuncts, the trapping successors carry the trap-enabling ones.
    const bool signed_div = bc.op == BinOp::div_s;
    const ExprRef min_const = const_of(bc.width, uint64_t{1} << (bc.width - 1));
    const ExprRef neg_one = const_of(bc.width, solver::width_mask(bc.width));

    {
        Configuration n = base();
        const SymVal b = pop_val(n);
        const SymVal a = pop_val(n);
        bool feasible = add_nonzero(n, b.expr);
        if (feasible && signed_div)
        {
            const ExprRef overflow = simp_binary(BinOp::and_,
                simp_binary(BinOp::eq, a.expr, min_const),
                simp_binary(BinOp::eq, b.expr, neg_one));
            feasible = add_zero(n, overflow);
        }
        if (feasible)
        {
            SymVal res;
            res.expr = simp_binary(bc.op, a.expr, b.expr);
            res.taint = a.taint;
            res.taint.insert(b.taint.begin(), b.taint.end());
            n.k_o.push_back(std::move(res));
            ++top(n).ip;
            finish_running(std::move(n));
        }
    }
    {
        Configuration n = base();
        const SymVal b = pop_val(n);
        pop_val(n);
        if (add_zero(n, b.expr))
            finish_trap(std::move(n), interp::TrapReason::div_by_zero);
    }
    if (signed_div)
    {
        Configuration n = base();
        const SymVal b = pop_val(n);
        const SymVal a = pop_val(n);
        if (add_nonzero(n, simp_binary(BinOp::eq, a.expr, min_const)) &&
            add_nonzero(n, simp_binary(BinOp::eq, b.expr, neg_one)))
            finish_trap(std::move(n), interp::TrapReason::integer_overflow);
    }
    (void)ins;
}

void Stepper::step_if(const wasm::Instruction& ins)
{
    const Frame& f = m_c.k_f.back();
    const auto& fe = m_m.code_of(f.func_index).flow.entries[f.ip];
    const ExprRef cond = solver::simplify(m_c.k_o.back().expr);
    const std::set<std::string> cond_taint = m_c.k_o.back().taint;

    auto enter_then = [&](Configuration&& n, bool guarded) {
        Frame& t = top(n);
        t.ctrl.push_back({t.ip, n.k_o.size(), label_arity(ins), false});
        if (guarded)
            t.guards.push_back({branch_vertex(t.func_index, t.ip),
                static_cast<uint32_t>(t.ctrl.size())});
        ++t.ip;
        finish_running(std::move(n));
    };
    auto enter_else = [&](Configuration&& n, bool guarded) {
        Frame& t = top(n);
        if (fe.else_index != wasm::NO_INDEX)
        {
            t.ctrl.push_back({t.ip, n.k_o.size(), label_arity(ins), false});
            if (guarded)
                t.guards.push_back({branch_vertex(t.func_index, t.ip),
                    static_cast<uint32_t>(t.ctrl.size())});
            t.ip = fe.else_index + 1;
        }
        else
        {
            t.ip = fe.matching_end + 1;
        }
        finish_running(std::move(n));
    };

    if (is_const_expr(cond))
    {
        Configuration n = base();
        pop_val(n);
        if (cond->value != 0)
            enter_then(std::move(n), false);
        else
            enter_else(std::move(n), false);
        return;
    }

    const std::string bv = branch_vertex(f.func_index, f.ip);
    {
        Configuration n = base();
        pop_val(n);
        n.graph.add_vertex(bv);
        for (const std::string& t : cond_taint)
            n.graph.add_edge(t, bv, EdgeKind::data_flow);
        if (add_zero(n, cond))
            enter_else(std::move(n), true);
    }
    {
        Configuration n = base();
        pop_val(n);
        n.graph.add_vertex(bv);
        for (const std::string& t : cond_taint)
            n.graph.add_edge(t, bv, EdgeKind::data_flow);
        if (add_nonzero(n, cond))
            enter_then(std::move(n), true);
    }
}

void Stepper::step_branch_if(const wasm::Instruction& ins)
{
    const Frame& f = m_c.k_f.back();
    const auto depth = static_cast<uint32_t>(ins.imm0);
    const ExprRef cond = solver::simplify(m_c.k_o.back().expr);
    const std::set<std::string> cond_taint = m_c.k_o.back().taint;

    if (is_const_expr(cond))
    {
        Configuration n = base();
        pop_val(n);
        if (cond->value != 0)
            do_branch(m_a, n, depth);
        else
            ++top(n).ip;
        finish_running(std::move(n));
        return;
    }

    const std::string bv = branch_vertex(f.func_index, f.ip);
    const bool target_is_loop =
        depth < f.ctrl.size() && f.ctrl[f.ctrl.size() - 1 - depth].is_loop;

    auto with_vertex = [&](Configuration& n) {
        n.graph.add_vertex(bv);
        for (const std::string& t : cond_taint)
            n.graph.add_edge(t, bv, EdgeKind::data_flow);
    };

    {
        // Not taken: the rest of the target's region is guarded by this
        // decision.
        Configuration n = base();
        pop_val(n);
        with_vertex(n);
        if (add_zero(n, cond))
        {
            Frame& t = top(n);
            const uint32_t guard_depth =
                depth < t.ctrl.size() ? static_cast<uint32_t>(t.ctrl.size()) - depth : 0;
            t.guards.push_back({bv, guard_depth});
            ++t.ip;
            finish_running(std::move(n));
        }
    }
    {
        // Taken: only a loop back edge keeps execution inside the guarded
        // region; branches out of blocks land at a join point.
        Configuration n = base();
        pop_val(n);
        with_vertex(n);
        if (add_nonzero(n, cond))
        {
            do_branch(m_a, n, depth);
            if (target_is_loop && n.status == Configuration::Status::running)
                top(n).guards.push_back(
                    {bv, static_cast<uint32_t>(top(n).ctrl.size()) + 1});
            finish_running(std::move(n));
        }
    }
}

void Stepper::step_branch_table(const wasm::Instruction& ins)
{
    const Frame& f = m_c.k_f.back();
    const ExprRef sel = solver::simplify(m_c.k_o.back().expr);
    const std::set<std::string> sel_taint = m_c.k_o.back().taint;

    auto take = [&](Configuration&& n, uint32_t depth, const std::string* bv) {
        const Frame& t = top(n);
        const bool is_loop =
            depth < t.ctrl.size() && t.ctrl[t.ctrl.size() - 1 - depth].is_loop;
        do_branch(m_a, n, depth);
        if (bv != nullptr && is_loop && n.status == Configuration::Status::running)
            top(n).guards.push_back({*bv, static_cast<uint32_t>(top(n).ctrl.size()) + 1});
        finish_running(std::move(n));
    };

    if (is_const_expr(sel))
    {
        Configuration n = base();
        pop_val(n);
        const uint64_t idx = sel->value;
        const uint32_t depth = idx < ins.table.size() ?
            ins.table[idx] :
            static_cast<uint32_t>(ins.imm0);
        take(std::move(n), depth, nullptr);
        return;
    }

    const std::string bv = branch_vertex(f.func_index, f.ip);
    for (size_t i = 0; i < ins.table.size(); ++i)
    {
        Configuration n = base();
        pop_val(n);
        n.graph.add_vertex(bv);
        for (const std::string& t : sel_taint)
            n.graph.add_edge(t, bv, EdgeKind::data_flow);
        if (add_nonzero(n, simp_binary(BinOp::eq, sel, const_of(sel->width, i))))
            take(std::move(n), ins.table[i], &bv);
    }
    {
        Configuration n = base();
        pop_val(n);
        n.graph.add_vertex(bv);
        for (const std::string& t : sel_taint)
            n.graph.add_edge(t, bv, EdgeKind::data_flow);
        if (add_nonzero(n,
                simp_binary(BinOp::ge_u, sel, const_of(sel->width, ins.table.size()))))
            take(std::move(n), static_cast<uint32_t>(ins.imm0), &bv);
    }
}

void Stepper::step_select()
{
    const size_t depth = m_c.k_o.size();
    const ExprRef cond = solver::simplify(m_c.k_o[depth - 1].expr);

    auto choose = [&](Configuration&& n, bool first) {
        const SymVal cv = pop_val(n);
        SymVal b = pop_val(n);
        SymVal a = pop_val(n);
        SymVal chosen = first ? std::move(a) : std::move(b);
        chosen.taint.insert(cv.taint.begin(), cv.taint.end());
        n.k_o.push_back(std::move(chosen));
        ++top(n).ip;
        finish_running(std::move(n));
    };

    if (is_const_expr(cond))
    {
        choose(base(), cond->value != 0);
        return;
    }
    {
        Configuration n = base();
        if (add_zero(n, cond))
            choose(std::move(n), false);
    }
    {
        Configuration n = base();
        if (add_nonzero(n, cond))
            choose(std::move(n), true);
    }
}

void Stepper::step_memory(const wasm::Instruction& ins)
{
    const bool is_store =
        ins.op == Opcode::i32_store || ins.op == Opcode::i64_store;
    const bool is_64 = ins.op == Opcode::i64_load || ins.op == Opcode::i64_store;
    const unsigned size = is_64 ? 8 : 4;
    const uint8_t w = is_64 ? 64 : 32;
    const uint64_t msize = mem_size_bytes(m_a);

    const SymVal& addr_ref = is_store ? m_c.k_o[m_c.k_o.size() - 2] : m_c.k_o.back();
    const ExprRef addr = solver::simplify(addr_ref.expr);

    // One successor per feasible address value.
    ConcretizeResult cr = concretize(m_c, addr, 4, m_budget);
    if (!cr.ok)
    {
        if (cr.fail_reason.empty())
            return;  // no feasible address: path refuted
        finish_abort(base(), cr.fail_reason);
        return;
    }

    for (const uint64_t av : cr.values)
    {
        Configuration n = base();
        SymVal value;
        if (is_store)
            value = pop_val(n);
        const SymVal addr_val = pop_val(n);
        if (!is_const_expr(addr) &&
            !add_nonzero(n, simp_binary(BinOp::eq, addr, const_of(addr->width, av))))
            continue;

        const uint64_t ea = av + ins.imm1;
        if (ea + size > msize)
        {
            finish_trap(std::move(n), interp::TrapReason::out_of_bounds);
            continue;
        }

        ModuleState& ms = n.module_states.front();
        if (is_store)
        {
            std::set<std::string> taint = value.taint;
            taint.insert(addr_val.taint.begin(), addr_val.taint.end());
            for (unsigned k = 0; k < size; ++k)
            {
                const auto cell_addr = static_cast<uint32_t>(ea + k);
                ms.memory[cell_addr] = solver::simplify(solver::mk_binary(BinOp::and_,
                    solver::mk_binary(
                        BinOp::shr_u, value.expr, const_of(w, 8ull * k)),
                    const_of(w, 0xFF)));
                draw_assign(n, memory_vertex(cell_addr), taint);
            }
            ++top(n).ip;
            finish_running(std::move(n));
            continue;
        }

        // Load: assemble the value from byte cells, little-endian.
        SymVal res;
        res.taint = addr_val.taint;
        ExprRef acc;
        bool mixed = false;
        for (unsigned k = 0; k < size; ++k)
        {
            const auto cell_addr = static_cast<uint32_t>(ea + k);
            ExprRef byte;
            auto it = ms.memory.find(cell_addr);
            if (it == ms.memory.end())
                byte = const_of(w, 0);
            else if (it->second->width == w)
                byte = it->second;
            else if (is_const_expr(it->second))
                byte = const_of(w, it->second->value);
            else
            {
                mixed = true;
                break;
            }
            res.taint.insert(memory_vertex(cell_addr));
            const ExprRef term = k == 0 ?
                byte :
                simp_binary(BinOp::shl, byte, const_of(w, 8ull * k));
            acc = acc ? simp_binary(BinOp::or_, acc, term) : term;
        }
        if (mixed)
        {
            // A byte written at one width is being read at another; the
            // expression language has no conversions, so give up honestly.
            finish_abort(std::move(n), "mixed-width");
            continue;
        }
        res.expr = std::move(acc);
        n.k_o.push_back(std::move(res));
        ++top(n).ip;
        finish_running(std::move(n));
    }
}

/// Resolves one concrete table index: bounds, null and type checks first,
/// then either the assert import or a regular frame push.
void Stepper::dispatch_indirect(Configuration&& n, uint32_t table_index,
    uint32_t type_index, const std::optional<std::string>& guard_vertex)
{
    if (table_index >= m_m.table.size())
    {
        finish_trap(std::move(n), interp::TrapReason::indirect_call_out_of_bounds);
        return;
    }
    const uint32_t callee = m_m.table[table_index];
    if (callee == wasm::NO_FUNC)
    {
        finish_trap(std::move(n), interp::TrapReason::indirect_call_null);
        return;
    }
    if (!(m_m.type_of(callee) == m_m.types[type_index]))
    {
        finish_trap(std::move(n), interp::TrapReason::indirect_call_type_mismatch);
        return;
    }
    if (m_m.is_import(callee))
    {
        const ExprRef cond = solver::simplify(n.k_o.back().expr);
        if (is_const_expr(cond))
        {
            pop_val(n);
            if (cond->value == 0)
                finish_trap(std::move(n), interp::TrapReason::assert_failed);
            else
            {
                ++top(n).ip;
                finish_running(std::move(n));
            }
            return;
        }
        {
            Configuration s = n;
            pop_val(s);
            if (add_nonzero(s, cond))
            {
                ++top(s).ip;
                finish_running(std::move(s));
            }
        }
        pop_val(n);
        if (add_zero(n, cond))
            finish_trap(std::move(n), interp::TrapReason::assert_failed);
        return;
    }
    if (n.k_f.size() >= interp::MAX_CALL_DEPTH)
    {
        finish_trap(std::move(n), interp::TrapReason::call_stack_exhausted);
        return;
    }
    ++top(n).ip;
    enter_function(m_a, n, callee, guard_vertex);
    finish_running(std::move(n));
}

std::vector<Configuration> Stepper::run()
{
    const Frame& f = m_c.k_f.back();
    const wasm::Function& fn = m_m.code_of(f.func_index);
    if (f.ip >= fn.body.size())
        throw std::logic_error{"symexec: program counter out of bounds"};
    const wasm::Instruction& ins = fn.body[f.ip];
    if (wasm::opcode_info(static_cast<uint8_t>(ins.op)) == nullptr)
        throw SymexecError{SymexecError::Kind::SubsetViolation,
            "instruction outside the supported subset at function " +
                std::to_string(f.func_index) + ", instruction " + std::to_string(f.ip)};

    switch (ins.op)
    {
    case Opcode::unreachable:
        finish_trap(base(), interp::TrapReason::unreachable);
        break;
    case Opcode::nop:
    {
        Configuration n = base();
        ++top(n).ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::block:
    case Opcode::loop:
    {
        Configuration n = base();
        Frame& t = top(n);
        t.ctrl.push_back(
            {t.ip, n.k_o.size(), label_arity(ins), ins.op == Opcode::loop});
        ++t.ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::if_:
        step_if(ins);
        break;
    case Opcode::else_:
    {
        // The then branch finished: jump to the end, which pops the label.
        Configuration n = base();
        Frame& t = top(n);
        t.ip = m_m.code_of(t.func_index).flow.entries[t.ip].matching_end;
        finish_running(std::move(n));
        break;
    }
    case Opcode::end:
    {
        Configuration n = base();
        Frame& t = top(n);
        if (t.ctrl.empty())
        {
            leave_frame(m_a, n);
        }
        else
        {
            t.ctrl.pop_back();
            prune_guards(t);
            ++t.ip;
        }
        finish_running(std::move(n));
        break;
    }
    case Opcode::br:
    {
        Configuration n = base();
        do_branch(m_a, n, static_cast<uint32_t>(ins.imm0));
        finish_running(std::move(n));
        break;
    }
    case Opcode::br_if:
        step_branch_if(ins);
        break;
    case Opcode::br_table:
        step_branch_table(ins);
        break;
    case Opcode::return_:
    {
        Configuration n = base();
        leave_frame(m_a, n);
        finish_running(std::move(n));
        break;
    }
    case Opcode::call:
    {
        const auto callee = static_cast<uint32_t>(ins.imm0);
        if (m_m.is_import(callee))
        {
            step_assert_import(ins);
            break;
        }
        if (m_c.k_f.size() >= interp::MAX_CALL_DEPTH)
        {
            finish_trap(base(), interp::TrapReason::call_stack_exhausted);
            break;
        }
        Configuration n = base();
        ++top(n).ip;
        enter_function(m_a, n, callee, std::nullopt);
        finish_running(std::move(n));
        break;
    }
    case Opcode::call_indirect:
    {
        const ExprRef sel = solver::simplify(m_c.k_o.back().expr);
        const std::set<std::string> sel_taint = m_c.k_o.back().taint;
        if (is_const_expr(sel))
        {
            Configuration n = base();
            pop_val(n);
            dispatch_indirect(std::move(n), static_cast<uint32_t>(sel->value),
                static_cast<uint32_t>(ins.imm0), std::nullopt);
            break;
        }
        const std::string bv = branch_vertex(f.func_index, f.ip);
        ConcretizeResult cr = concretize(m_c, sel, 4, m_budget);
        if (!cr.ok)
        {
            if (!cr.fail_reason.empty())
                finish_abort(base(), cr.fail_reason);
            break;
        }
        for (const uint64_t v : cr.values)
        {
            Configuration n = base();
            pop_val(n);
            n.graph.add_vertex(bv);
            for (const std::string& t : sel_taint)
                n.graph.add_edge(t, bv, EdgeKind::data_flow);
            if (!add_nonzero(n, simp_binary(BinOp::eq, sel, const_of(sel->width, v))))
                continue;
            dispatch_indirect(std::move(n), static_cast<uint32_t>(v),
                static_cast<uint32_t>(ins.imm0), bv);
        }
        break;
    }
    case Opcode::drop:
    {
        Configuration n = base();
        pop_val(n);
        ++top(n).ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::select:
        step_select();
        break;
    case Opcode::local_get:
    {
        Configuration n = base();
        Frame& t = top(n);
        n.k_o.push_back({t.locals[ins.imm0],
            {local_vertex(t.func_index, static_cast<uint32_t>(ins.imm0))}});
        ++t.ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::local_set:
    case Opcode::local_tee:
    {
        Configuration n = base();
        Frame& t = top(n);
        const SymVal v = ins.op == Opcode::local_set ? pop_val(n) : n.k_o.back();
        t.locals[ins.imm0] = v.expr;
        draw_assign(n, local_vertex(t.func_index, static_cast<uint32_t>(ins.imm0)),
            v.taint);
        ++t.ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::global_get:
    {
        Configuration n = base();
        n.k_o.push_back({n.module_states.front().globals[ins.imm0],
            {global_vertex(static_cast<uint32_t>(ins.imm0))}});
        ++top(n).ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::global_set:
    {
        Configuration n = base();
        const SymVal v = pop_val(n);
        n.module_states.front().globals[ins.imm0] = v.expr;
        draw_assign(n, global_vertex(static_cast<uint32_t>(ins.imm0)), v.taint);
        ++top(n).ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::i32_load:
    case Opcode::i64_load:
    case Opcode::i32_store:
    case Opcode::i64_store:
        step_memory(ins);
        break;
    case Opcode::i32_const:
    {
        Configuration n = base();
        n.k_o.push_back({const_of(32, ins.imm0), {}});
        ++top(n).ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::i64_const:
    {
        Configuration n = base();
        n.k_o.push_back({const_of(64, ins.imm0), {}});
        ++top(n).ip;
        finish_running(std::move(n));
        break;
    }
    case Opcode::i32_eqz:
    case Opcode::i64_eqz:
    {
        Configuration n = base();
        SymVal v = pop_val(n);
        v.expr = solver::simplify(solver::mk_unary(UnOp::eqz, v.expr));
        n.k_o.push_back(std::move(v));
        ++top(n).ip;
        finish_running(std::move(n));
        break;
    }
    default:
    {
        const auto bc = classify_binary(ins.op);
        if (!bc)
            throw SymexecError{SymexecError::Kind::SubsetViolation,
                "instruction outside the supported subset at function " +
                    std::to_string(f.func_index) + ", instruction " +
                    std::to_string(f.ip)};
        step_binary(ins, *bc);
        break;
    }
    }
    return std::move(m_out);
}

}  // namespace

Analysis init_analysis(const wasm::Module& m, const wasm::SourceMap& map,
    const PropertySet& props)
{
    for (const Property& p : props.properties)
        if (p.target && m.find_export(*p.target) == nullptr)
            throw SymexecError{SymexecError::Kind::UnknownTarget,
                "property '" + p.id + "' targets missing export '" + *p.target + "'"};
    for (size_t i = 0; i < props.properties.size(); ++i)
        for (size_t j = i + 1; j < props.properties.size(); ++j)
            if (props.properties[i].id == props.properties[j].id)
                throw std::invalid_argument{
                    "duplicate property id '" + props.properties[i].id + "'"};

    Analysis a;
    a.modules.push_back(m);
    a.src_map = map;
    a.spec_version = SPEC_VERSION;
    a.props = props;
    return a;
}

Configuration entry_configuration(const Analysis& a, uint32_t func_index)
{
    const wasm::Module& m = module_of(a);
    const wasm::Function& fn = m.code_of(func_index);
    const wasm::FunctionType& ft = m.types[fn.type_index];

    Configuration c;
    c.k_f = a.call_stack_template;
    c.k_o = a.operand_stack_template;

    Frame f;
    f.func_index = func_index;
    f.ip = 0;
    f.base = 0;
    for (size_t i = 0; i < ft.params.size(); ++i)
        f.locals.push_back(
            solver::mk_var("a" + std::to_string(i), width_of(ft.params[i])));
    for (const wasm::ValType t : fn.locals)
        f.locals.push_back(const_of(width_of(t), 0));
    c.k_f.push_back(std::move(f));

    ModuleState ms;
    for (const wasm::GlobalSpec& g : m.globals)
        ms.globals.push_back(const_of(width_of(g.type), g.init_bits));
    c.module_states.push_back(std::move(ms));

    // Pre-populate the variable vertices so unassigned ones resolve to
    // empty dependency sets rather than unknown-vertex errors.
    for (uint32_t gi = 0; gi < m.globals.size(); ++gi)
        c.graph.add_vertex(global_vertex(gi));
    for (uint32_t fi = 0; fi < m.num_funcs(); ++fi)
    {
        if (m.is_import(fi))
            continue;
        const wasm::Function& g = m.code_of(fi);
        const size_t nlocals = m.types[g.type_index].params.size() + g.locals.size();
        for (uint32_t li = 0; li < nlocals; ++li)
            c.graph.add_vertex(local_vertex(fi, li));
    }

    sync_src(a, c);
    return c;
}

std::vector<Configuration> step(const Analysis& a, const Configuration& c,
    const solver::CheckBudget& budget)
{
    if (c.status != Configuration::Status::running)
        return {};
    return Stepper{a, c, budget}.run();
}

namespace
{

uint64_t peak_rss_bytes()
{
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return static_cast<uint64_t>(ru.ru_maxrss) * 1024;
}

struct Incident
{
    interp::TrapReason reason;
    Witness witness;
};

struct TargetResult
{
    bool clean = true;  // exhaustive and free of unknown paths
    std::vector<Incident> incidents;
};

/// Builds the concrete argument vector for a model, defaulting unbound
/// arguments to zero.
std::vector<interp::Value> witness_args(const wasm::Module& m, uint32_t func,
    const std::map<std::string, uint64_t>& model)
{
    const wasm::FunctionType& ft = m.type_of(func);
    std::vector<interp::Value> args;
    for (size_t i = 0; i < ft.params.size(); ++i)
    {
        auto it = model.find("a" + std::to_string(i));
        const uint64_t bits = it == model.end() ? 0 : it->second;
        args.push_back(ft.params[i] == wasm::ValType::i64 ?
                interp::Value::i64(bits) :
                interp::Value::i32(static_cast<uint32_t>(bits)));
    }
    return args;
}

/// Completes a witness model so it lists every entry argument.
std::map<std::string, uint64_t> total_model(const wasm::Module& m, uint32_t func,
    const std::map<std::string, uint64_t>& model)
{
    std::map<std::string, uint64_t> out;
    const wasm::FunctionType& ft = m.type_of(func);
    for (size_t i = 0; i < ft.params.size(); ++i)
    {
        const std::string name = "a" + std::to_string(i);
        auto it = model.find(name);
        out[name] = it == model.end() ? 0 : it->second;
    }
    return out;
}

TargetResult explore_target(const Analysis& a, const std::string& export_name,
    uint32_t func, const ExploreBounds& bounds, ReportStats& stats)
{
    const wasm::Module& m = module_of(a);
    TargetResult tr;

    // Budgets apply per target; the shared stats accumulate across targets.
    uint64_t finished = 0;

    auto record_unknown = [&](const std::string& reason) {
        ++stats.unknown_paths;
        ++stats.unknown_reasons[reason];
        ++finished;
        tr.clean = false;
    };
    auto record_path = [&] {
        ++stats.paths;
        ++finished;
    };

    if (m.is_import(func))
    {
        // The entry is the assert import itself: it traps exactly when its
        // argument is zero.
        const std::vector<interp::Value> args{interp::Value::i32(0)};
        const interp::TraceResult rr = interp::run_concrete(m, export_name, args, 16);
        if (rr.trapped())
        {
            Incident inc;
            inc.reason = interp::TrapReason::assert_failed;
            inc.witness.model = {{"a0", 0}};
            tr.incidents.push_back(std::move(inc));
        }
        stats.paths += 2;
        return tr;
    }

    const uint64_t replay_fuel = std::max<uint64_t>(bounds.max_depth * 4, 1 << 20);
    std::vector<Configuration> work;
    work.push_back(entry_configuration(a, func));

    while (!work.empty())
    {
        if (finished >= bounds.max_paths)
        {
            tr.clean = false;  // budget hit with work left over
            break;
        }
        Configuration c = std::move(work.back());
        work.pop_back();

        switch (c.status)
        {
        case Configuration::Status::running:
        {
            if (c.steps >= bounds.max_depth)
            {
                record_unknown("depth");
                break;
            }
            std::vector<Configuration> succ = step(a, c, bounds.per_path_solver_budget);
            for (auto it = succ.rbegin(); it != succ.rend(); ++it)
            {
                if (it->status == Configuration::Status::running &&
                    !top(*it).unroll.empty())
                {
                    uint32_t worst = 0;
                    for (const auto& [instr, count] : top(*it).unroll)
                        worst = std::max(worst, count);
                    if (worst > bounds.loop_unroll)
                    {
                        record_unknown("unroll");
                        continue;
                    }
                }
                work.push_back(std::move(*it));
            }
            break;
        }
        case Configuration::Status::returned:
            record_path();
            break;
        case Configuration::Status::aborted:
            record_unknown(c.abort_reason.empty() ? "aborted" : c.abort_reason);
            break;
        case Configuration::Status::trapped:
        {
            const solver::SatResult sat =
                solver::check_sat(c.path_condition, bounds.per_path_solver_budget);
            if (sat.status == solver::SatResult::Status::unsat)
                break;  // refuted trap candidate, not a real path
            if (sat.status == solver::SatResult::Status::unknown)
            {
                record_unknown("solver");
                break;
            }
            const std::map<std::string, uint64_t> model = total_model(m, func, sat.model);
            const std::vector<interp::Value> args = witness_args(m, func, model);
            const interp::TraceResult rr =
                interp::run_concrete(m, export_name, args, replay_fuel);
            if (!rr.trapped() || rr.trap.reason != c.trap->reason ||
                rr.trap.byte_offset != c.trap->byte_offset)
            {
                // The model does not replay; treat the path as unresolved
                // rather than report an unverified witness.
                record_unknown("replay");
                break;
            }
            record_path();
            Incident inc;
            inc.reason = c.trap->reason;
            inc.witness.model = model;
            if (const auto e = a.src_map.lookup(c.trap->byte_offset))
            {
                inc.witness.line = e->line;
                inc.witness.col = e->col;
            }
            tr.incidents.push_back(std::move(inc));
            break;
        }
        }
    }
    return tr;
}

bool incident_matches(const Incident& inc, PropertyKind kind)
{
    if (kind == PropertyKind::assertion_unreachable)
        return inc.reason == interp::TrapReason::assert_failed;
    return true;  // no_trap covers every reason
}

}  // namespace

AnalysisReport explore(const Analysis& a, const ExploreBounds& bounds)
{
    if (bounds.max_paths == 0 || bounds.max_depth == 0 || bounds.loop_unroll == 0)
        throw std::invalid_argument{"explore bounds must be positive"};

    const auto t0 = std::chrono::steady_clock::now();
    const wasm::Module& m = module_of(a);

    // Deterministic target list: property order first, then export order
    // for untargeted properties.
    std::vector<std::string> targets;
    auto add_target = [&](const std::string& name) {
        if (std::find(targets.begin(), targets.end(), name) == targets.end())
            targets.push_back(name);
    };
    bool wants_all = false;
    for (const Property& p : a.props.properties)
    {
        if (p.target)
            add_target(*p.target);
        else
            wants_all = true;
    }
    if (wants_all)
        for (const wasm::Export& e : m.exports)
            add_target(e.name);

    AnalysisReport report;
    std::map<std::string, TargetResult> results;
    for (const std::string& name : targets)
    {
        const wasm::Export* e = m.find_export(name);
        if (e == nullptr)
            throw SymexecError{SymexecError::Kind::UnknownTarget,
                "no export named '" + name + "'"};
        results.emplace(name, explore_target(a, name, e->func_index, bounds, report.stats));
    }

    for (const Property& p : a.props.properties)
    {
        PropertyOutcome po;
        po.id = p.id;
        po.kind = p.kind;

        std::vector<std::string> scope;
        if (p.target)
            scope.push_back(*p.target);
        else
            for (const wasm::Export& e : m.exports)
                if (std::find(scope.begin(), scope.end(), e.name) == scope.end())
                    scope.push_back(e.name);

        bool clean = true;
        const Incident* found = nullptr;
        for (const std::string& name : scope)
        {
            const TargetResult& tr = results.at(name);
            clean = clean && tr.clean;
            if (found == nullptr)
                for (const Incident& inc : tr.incidents)
                    if (incident_matches(inc, p.kind))
                    {
                        found = &inc;
                        break;
                    }
        }
        if (found != nullptr)
        {
            po.outcome = Outcome::violated;
            po.witness = found->witness;
        }
        else
        {
            po.outcome = clean ? Outcome::valid : Outcome::unknown;
        }
        report.property_outcomes.push_back(std::move(po));
    }

    report.stats.time_ms = static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0)
            .count());
    report.stats.peak_memory_bytes = peak_rss_bytes();
    return report;
}

}  // namespace tcpa::symexec
