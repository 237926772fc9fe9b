// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/wasm/module.hpp>

#include <algorithm>
#include <array>
#include <cassert>
#include <set>

namespace tcpa::wasm
{
namespace
{
constexpr std::array<std::pair<uint8_t, OpcodeInfo>, 74> OPCODE_TABLE{{
    {0x00, {"unreachable", ImmKind::none}},
    {0x01, {"nop", ImmKind::none}},
    {0x02, {"block", ImmKind::block_type}},
    {0x03, {"loop", ImmKind::block_type}},
    {0x04, {"if", ImmKind::block_type}},
    {0x05, {"else", ImmKind::none}},
    {0x0B, {"end", ImmKind::none}},
    {0x0C, {"br", ImmKind::label}},
    {0x0D, {"br_if", ImmKind::label}},
    {0x0E, {"br_table", ImmKind::br_table}},
    {0x0F, {"return", ImmKind::none}},
    {0x10, {"call", ImmKind::func_idx}},
    {0x11, {"call_indirect", ImmKind::call_indirect}},
    {0x1A, {"drop", ImmKind::none}},
    {0x1B, {"select", ImmKind::none}},
    {0x20, {"local.get", ImmKind::local_idx}},
    {0x21, {"local.set", ImmKind::local_idx}},
    {0x22, {"local.tee", ImmKind::local_idx}},
    {0x23, {"global.get", ImmKind::global_idx}},
    {0x24, {"global.set", ImmKind::global_idx}},
    {0x28, {"i32.load", ImmKind::mem_arg}},
    {0x29, {"i64.load", ImmKind::mem_arg}},
    {0x36, {"i32.store", ImmKind::mem_arg}},
    {0x37, {"i64.store", ImmKind::mem_arg}},
    {0x41, {"i32.const", ImmKind::const_i32}},
    {0x42, {"i64.const", ImmKind::const_i64}},
    {0x45, {"i32.eqz", ImmKind::none}},
    {0x46, {"i32.eq", ImmKind::none}},
    {0x47, {"i32.ne", ImmKind::none}},
    {0x48, {"i32.lt_s", ImmKind::none}},
    {0x49, {"i32.lt_u", ImmKind::none}},
    {0x4A, {"i32.gt_s", ImmKind::none}},
    {0x4B, {"i32.gt_u", ImmKind::none}},
    {0x4C, {"i32.le_s", ImmKind::none}},
    {0x4D, {"i32.le_u", ImmKind::none}},
    {0x4E, {"i32.ge_s", ImmKind::none}},
    {0x4F, {"i32.ge_u", ImmKind::none}},
    {0x50, {"i64.eqz", ImmKind::none}},
    {0x51, {"i64.eq", ImmKind::none}},
    {0x52, {"i64.ne", ImmKind::none}},
    {0x53, {"i64.lt_s", ImmKind::none}},
    {0x54, {"i64.lt_u", ImmKind::none}},
    {0x55, {"i64.gt_s", ImmKind::none}},
    {0x56, {"i64.gt_u", ImmKind::none}},
    {0x57, {"i64.le_s", ImmKind::none}},
    {0x58, {"i64.le_u", ImmKind::none}},
    {0x59, {"i64.ge_s", ImmKind::none}},
    {0x5A, {"i64.ge_u", ImmKind::none}},
    {0x6A, {"i32.add", ImmKind::none}},
    {0x6B, {"i32.sub", ImmKind::none}},
    {0x6C, {"i32.mul", ImmKind::none}},
    {0x6D, {"i32.div_s", ImmKind::none}},
    {0x6E, {"i32.div_u", ImmKind::none}},
    {0x6F, {"i32.rem_s", ImmKind::none}},
    {0x70, {"i32.rem_u", ImmKind::none}},
    {0x71, {"i32.and", ImmKind::none}},
    {0x72, {"i32.or", ImmKind::none}},
    {0x73, {"i32.xor", ImmKind::none}},
    {0x74, {"i32.shl", ImmKind::none}},
    {0x75, {"i32.shr_s", ImmKind::none}},
    {0x76, {"i32.shr_u", ImmKind::none}},
    {0x7C, {"i64.add", ImmKind::none}},
    {0x7D, {"i64.sub", ImmKind::none}},
    {0x7E, {"i64.mul", ImmKind::none}},
    {0x7F, {"i64.div_s", ImmKind::none}},
    {0x80, {"i64.div_u", ImmKind::none}},
    {0x81, {"i64.rem_s", ImmKind::none}},
    {0x82, {"i64.rem_u", ImmKind::none}},
    {0x83, {"i64.and", ImmKind::none}},
    {0x84, {"i64.or", ImmKind::none}},
    {0x85, {"i64.xor", ImmKind::none}},
    {0x86, {"i64.shl", ImmKind::none}},
    {0x87, {"i64.shr_s", ImmKind::none}},
    {0x88, {"i64.shr_u", ImmKind::none}},
}};

struct OpcodeLookup
{
    std::array<const OpcodeInfo*, 256> map{};

    OpcodeLookup()
    {
        for (const auto& [byte, info] : OPCODE_TABLE)
            map[byte] = &info;
    }
};

const OpcodeLookup g_opcode_lookup;

[[noreturn]] void fail(const std::string& msg)
{
    throw ParseError{ParseError::Kind::ValidationFailure, msg};
}

}  // namespace

const char* val_type_name(ValType t) noexcept
{
    switch (t)
    {
    case ValType::i32:
        return "i32";
    case ValType::i64:
        return "i64";
    case ValType::f32:
        return "f32";
    case ValType::f64:
        return "f64";
    }
    return "?";
}

const OpcodeInfo* opcode_info(uint8_t byte) noexcept
{
    return g_opcode_lookup.map[byte];
}

const char* edge_kind_name(Cfg::EdgeKind k) noexcept
{
    switch (k)
    {
    case Cfg::EdgeKind::fallthrough:
        return "fallthrough";
    case Cfg::EdgeKind::branch_taken:
        return "branch-taken";
    case Cfg::EdgeKind::branch_not_taken:
        return "branch-not-taken";
    case Cfg::EdgeKind::table_case:
        return "table-case";
    }
    return "?";
}

uint32_t Cfg::block_of(uint32_t instr_index) const
{
    auto it = std::upper_bound(blocks.begin(), blocks.end(), instr_index,
        [](uint32_t idx, const Block& b) { return idx < b.first; });
    assert(it != blocks.begin());
    --it;
    assert(instr_index >= it->first && instr_index <= it->last);
    return static_cast<uint32_t>(it - blocks.begin());
}

const FunctionType& Module::type_of(uint32_t func_index) const
{
    if (func_index < imports.size())
        return types[imports[func_index].type_index];
    return types[functions[func_index - imports.size()].type_index];
}

const Function& Module::code_of(uint32_t func_index) const
{
    assert(!is_import(func_index));
    return functions[func_index - imports.size()];
}

Function& Module::code_of(uint32_t func_index)
{
    assert(!is_import(func_index));
    return functions[func_index - imports.size()];
}

const Export* Module::find_export(std::string_view name) const
{
    for (const auto& e : exports)
        if (e.name == name)
            return &e;
    return nullptr;
}

FlowInfo compute_flow(const std::vector<Instruction>& body)
{
    FlowInfo flow;
    flow.entries.resize(body.size());

    struct Open
    {
        uint32_t instr;
        uint32_t else_instr = NO_INDEX;
        bool is_if = false;
    };
    std::vector<Open> stack;
    bool saw_final_end = false;

    for (uint32_t i = 0; i < body.size(); ++i)
    {
        switch (body[i].op)
        {
        case Opcode::block:
        case Opcode::loop:
            stack.push_back({i, NO_INDEX, false});
            break;
        case Opcode::if_:
            stack.push_back({i, NO_INDEX, true});
            break;
        case Opcode::else_:
            if (stack.empty() || !stack.back().is_if || stack.back().else_instr != NO_INDEX)
                throw ParseError{ParseError::Kind::MalformedNesting,
                    "else without matching if at instruction " + std::to_string(i)};
            stack.back().else_instr = i;
            break;
        case Opcode::end:
            if (stack.empty())
            {
                // Function-closing end: must be the last instruction.
                if (i + 1 != body.size())
                    throw ParseError{ParseError::Kind::MalformedNesting,
                        "code after function end at instruction " + std::to_string(i)};
                saw_final_end = true;
                break;
            }
            flow.entries[stack.back().instr].matching_end = i;
            flow.entries[stack.back().instr].else_index = stack.back().else_instr;
            if (stack.back().else_instr != NO_INDEX)
                flow.entries[stack.back().else_instr].matching_end = i;
            stack.pop_back();
            break;
        default:
            break;
        }
    }

    if (!stack.empty())
        throw ParseError{ParseError::Kind::MalformedNesting,
            "unterminated block at instruction " + std::to_string(stack.back().instr)};
    if (!saw_final_end)
        throw ParseError{ParseError::Kind::MalformedNesting, "function body lacks final end"};
    return flow;
}

namespace
{
/// Statically enclosing structures at one point of a body, innermost last.
/// Used to resolve branch depths to instruction targets.
struct CfgBuilder
{
    const std::vector<Instruction>& body;
    const FlowInfo& flow;

    struct Scope
    {
        uint32_t instr;
        bool is_loop;
    };
    std::vector<Scope> scopes;

    /// Instruction a branch of the given depth jumps to.
    uint32_t branch_target(uint32_t at, uint32_t depth) const
    {
        if (depth >= scopes.size())
            throw ParseError{ParseError::Kind::MalformedNesting,
                "branch depth out of range at instruction " + std::to_string(at)};
        const Scope& s = scopes[scopes.size() - 1 - depth];
        if (s.is_loop)
            return s.instr;
        if (s.instr == NO_INDEX)  // function scope: behaves like return
            return static_cast<uint32_t>(body.size()) - 1;
        return flow.entries[s.instr].matching_end + 1;
    }
};

}  // namespace

Cfg build_cfg(const Function& f)
{
    const auto& body = f.body;
    FlowInfo computed;
    const FlowInfo* flow_ptr = &f.flow;
    if (f.flow.entries.size() != body.size())
    {
        computed = compute_flow(body);
        flow_ptr = &computed;
    }
    const FlowInfo& flow = *flow_ptr;
    CfgBuilder ctx{body, flow, {}};

    // Pass 1: find leaders and remember resolved branch targets.
    std::set<uint32_t> leaders{0};
    std::vector<std::vector<uint32_t>> br_targets(body.size());
    ctx.scopes.push_back({NO_INDEX, false});  // function scope

    for (uint32_t i = 0; i < body.size(); ++i)
    {
        const auto& ins = body[i];
        switch (ins.op)
        {
        case Opcode::block:
            ctx.scopes.push_back({i, false});
            break;
        case Opcode::loop:
            ctx.scopes.push_back({i, true});
            leaders.insert(i);  // loop headers form their own block
            if (i + 1 < body.size())
                leaders.insert(i + 1);
            break;
        case Opcode::if_:
        {
            ctx.scopes.push_back({i, false});
            leaders.insert(i + 1);
            const auto& fe = flow.entries[i];
            const uint32_t false_target =
                fe.else_index != NO_INDEX ? fe.else_index + 1 : fe.matching_end + 1;
            br_targets[i] = {false_target};
            leaders.insert(false_target);
            break;
        }
        case Opcode::else_:
        {
            // Jump from the end of the then-branch over the else-branch.
            const uint32_t target = flow.entries[i].matching_end;
            br_targets[i] = {target};
            leaders.insert(target);
            leaders.insert(i + 1);
            break;
        }
        case Opcode::end:
            if (!ctx.scopes.empty() && ctx.scopes.back().instr != NO_INDEX &&
                flow.entries[ctx.scopes.back().instr].matching_end == i)
                ctx.scopes.pop_back();
            break;
        case Opcode::br:
        case Opcode::br_if:
        {
            const uint32_t target = ctx.branch_target(i, static_cast<uint32_t>(ins.imm0));
            br_targets[i] = {target};
            leaders.insert(target);
            leaders.insert(i + 1);
            break;
        }
        case Opcode::br_table:
        {
            std::vector<uint32_t> targets;
            for (const uint32_t depth : ins.table)
                targets.push_back(ctx.branch_target(i, depth));
            targets.push_back(ctx.branch_target(i, static_cast<uint32_t>(ins.imm0)));
            for (const uint32_t t : targets)
                leaders.insert(t);
            br_targets[i] = std::move(targets);
            leaders.insert(i + 1);
            break;
        }
        case Opcode::return_:
        case Opcode::unreachable:
            if (i + 1 < body.size())
                leaders.insert(i + 1);
            break;
        default:
            break;
        }
    }

    // Pass 2: blocks from leaders, then edges from each block terminator.
    Cfg cfg;
    leaders.erase(leaders.upper_bound(static_cast<uint32_t>(body.size()) - 1), leaders.end());
    for (auto it = leaders.begin(); it != leaders.end(); ++it)
    {
        const uint32_t first = *it;
        const auto next = std::next(it);
        const uint32_t last =
            next == leaders.end() ? static_cast<uint32_t>(body.size()) - 1 : *next - 1;
        cfg.blocks.push_back({first, last});
    }

    const auto add_edge = [&](uint32_t from_block, uint32_t to_instr, Cfg::EdgeKind kind) {
        cfg.edges.push_back({from_block, cfg.block_of(to_instr), kind});
    };

    for (uint32_t b = 0; b < cfg.blocks.size(); ++b)
    {
        const uint32_t last = cfg.blocks[b].last;
        const auto& ins = body[last];
        const bool has_next = last + 1 < body.size();
        switch (ins.op)
        {
        case Opcode::if_:
            add_edge(b, br_targets[last][0], Cfg::EdgeKind::branch_taken);
            add_edge(b, last + 1, Cfg::EdgeKind::branch_not_taken);
            break;
        case Opcode::else_:
            add_edge(b, br_targets[last][0], Cfg::EdgeKind::branch_taken);
            break;
        case Opcode::br:
            add_edge(b, br_targets[last][0], Cfg::EdgeKind::branch_taken);
            break;
        case Opcode::br_if:
            add_edge(b, br_targets[last][0], Cfg::EdgeKind::branch_taken);
            add_edge(b, last + 1, Cfg::EdgeKind::branch_not_taken);
            break;
        case Opcode::br_table:
        {
            std::vector<uint32_t> seen;
            for (const uint32_t t : br_targets[last])
            {
                if (std::find(seen.begin(), seen.end(), t) != seen.end())
                    continue;
                seen.push_back(t);
                add_edge(b, t, Cfg::EdgeKind::table_case);
            }
            break;
        }
        case Opcode::return_:
        case Opcode::unreachable:
            break;
        default:
            if (has_next)
                add_edge(b, last + 1, Cfg::EdgeKind::fallthrough);
            break;
        }
    }
    return cfg;
}

namespace
{
/// Stack-shape type checker over one body, in the style of the reference
/// validation algorithm: a value stack of types plus a control stack with
/// per-frame stack heights and an unreachable flag for polymorphism.
class BodyChecker
{
public:
    BodyChecker(const Module& m, const Function& f, uint32_t func_index)
      : m_module{m}, m_func{f}, m_index{func_index}
    {
        const auto& ft = m.types[f.type_index];
        m_locals = ft.params;
        m_locals.insert(m_locals.end(), f.locals.begin(), f.locals.end());
        m_result = ft.results.empty() ? std::nullopt : std::optional{ft.results[0]};
    }

    void run();

private:
    // std::nullopt plays the role of the unknown (polymorphic) type.
    using MaybeType = std::optional<ValType>;

    struct Frame
    {
        Opcode opener;  // call used as a stand-in for the function frame
        MaybeType result;
        size_t height;
        bool is_unreachable = false;
        bool seen_else = false;
    };

    [[noreturn]] void err(uint32_t i, const std::string& msg) const
    {
        fail("function " + std::to_string(m_index) + ", instruction " + std::to_string(i) +
             ": " + msg);
    }

    void push(ValType t) { m_vals.push_back(t); }

    MaybeType pop_any(uint32_t i)
    {
        Frame& f = m_ctrl.back();
        if (m_vals.size() == f.height)
        {
            if (f.is_unreachable)
                return std::nullopt;
            err(i, "stack underflow");
        }
        const MaybeType t = m_vals.back();
        m_vals.pop_back();
        return t;
    }

    void pop(uint32_t i, ValType expect)
    {
        const MaybeType t = pop_any(i);
        if (t && *t != expect)
            err(i, std::string{"expected "} + val_type_name(expect) + ", found " +
                       val_type_name(*t));
    }

    void mark_unreachable()
    {
        m_vals.resize(m_ctrl.back().height);
        m_ctrl.back().is_unreachable = true;
    }

    MaybeType block_result(uint32_t i, uint64_t raw_blocktype)
    {
        switch (raw_blocktype)
        {
        case 0x40:
            return std::nullopt;
        case 0x7F:
            return ValType::i32;
        case 0x7E:
            return ValType::i64;
        default:
            err(i, "unsupported block type");
        }
    }

    /// Types a branch to the given relative depth must provide.
    MaybeType label_result(uint32_t i, uint64_t depth) const
    {
        if (depth >= m_ctrl.size())
            err(i, "branch depth out of range");
        const Frame& f = m_ctrl[m_ctrl.size() - 1 - depth];
        if (f.opener == Opcode::loop)
            return std::nullopt;
        return f.result;
    }

    Frame pop_frame(uint32_t i)
    {
        Frame& f = m_ctrl.back();
        if (f.result)
            pop(i, *f.result);
        if (m_vals.size() != f.height)
            err(i, "values remain on stack at end of block");
        const Frame out = f;
        m_ctrl.pop_back();
        return out;
    }

    const FunctionType& callee_type(uint32_t i, uint64_t func_index) const
    {
        if (func_index >= m_module.num_funcs())
            err(i, "call to unknown function " + std::to_string(func_index));
        return m_module.type_of(static_cast<uint32_t>(func_index));
    }

    void apply_call(uint32_t i, const FunctionType& ft)
    {
        for (auto it = ft.params.rbegin(); it != ft.params.rend(); ++it)
            pop(i, *it);
        for (const ValType r : ft.results)
            push(r);
    }

    const Module& m_module;
    const Function& m_func;
    uint32_t m_index;
    std::vector<ValType> m_locals;
    MaybeType m_result;
    std::vector<MaybeType> m_vals;
    std::vector<Frame> m_ctrl;
};

void BodyChecker::run()
{
    m_ctrl.push_back({Opcode::call, m_result, 0});

    for (uint32_t i = 0; i < m_func.body.size(); ++i)
    {
        const auto& ins = m_func.body[i];
        switch (ins.op)
        {
        case Opcode::unreachable:
            mark_unreachable();
            break;
        case Opcode::nop:
            break;
        case Opcode::block:
        case Opcode::loop:
            m_ctrl.push_back({ins.op, block_result(i, ins.imm0), m_vals.size()});
            break;
        case Opcode::if_:
            pop(i, ValType::i32);
            m_ctrl.push_back({ins.op, block_result(i, ins.imm0), m_vals.size()});
            break;
        case Opcode::else_:
        {
            if (m_ctrl.size() < 2 || m_ctrl.back().opener != Opcode::if_ ||
                m_ctrl.back().seen_else)
                err(i, "else without matching if");
            Frame f = pop_frame(i);
            f.is_unreachable = false;
            f.seen_else = true;
            m_ctrl.push_back(f);
            break;
        }
        case Opcode::end:
        {
            if (m_ctrl.size() == 1)
            {
                if (i + 1 != m_func.body.size())
                    err(i, "code after function end");
                const Frame f = pop_frame(i);
                if (f.result)
                    push(*f.result);
                break;
            }
            if (m_ctrl.back().opener == Opcode::if_ && !m_ctrl.back().seen_else &&
                m_ctrl.back().result)
                err(i, "if with a result type requires an else branch");
            const Frame f = pop_frame(i);
            if (f.result)
                push(*f.result);
            break;
        }
        case Opcode::br:
        {
            const MaybeType r = label_result(i, ins.imm0);
            if (r)
                pop(i, *r);
            mark_unreachable();
            break;
        }
        case Opcode::br_if:
        {
            pop(i, ValType::i32);
            const MaybeType r = label_result(i, ins.imm0);
            if (r)
            {
                pop(i, *r);
                push(*r);
            }
            break;
        }
        case Opcode::br_table:
        {
            pop(i, ValType::i32);
            const MaybeType def = label_result(i, ins.imm0);
            for (const uint32_t depth : ins.table)
            {
                const MaybeType r = label_result(i, depth);
                if (r != def)
                    err(i, "br_table targets have mismatched result types");
            }
            if (def)
                pop(i, *def);
            mark_unreachable();
            break;
        }
        case Opcode::return_:
            if (m_result)
                pop(i, *m_result);
            mark_unreachable();
            break;
        case Opcode::call:
            apply_call(i, callee_type(i, ins.imm0));
            break;
        case Opcode::call_indirect:
        {
            if (!m_module.has_table)
                err(i, "call_indirect requires a table");
            if (ins.imm0 >= m_module.types.size())
                err(i, "call_indirect to unknown type " + std::to_string(ins.imm0));
            pop(i, ValType::i32);
            apply_call(i, m_module.types[ins.imm0]);
            break;
        }
        case Opcode::drop:
            pop_any(i);
            break;
        case Opcode::select:
        {
            pop(i, ValType::i32);
            const MaybeType a = pop_any(i);
            const MaybeType b = pop_any(i);
            if (a && b && *a != *b)
                err(i, "select operands have mismatched types");
            const MaybeType r = a ? a : b;
            m_vals.push_back(r);  // may stay unknown in unreachable code
            break;
        }
        case Opcode::local_get:
        case Opcode::local_set:
        case Opcode::local_tee:
        {
            if (ins.imm0 >= m_locals.size())
                err(i, "local index out of range");
            const ValType t = m_locals[ins.imm0];
            if (ins.op == Opcode::local_get)
                push(t);
            else if (ins.op == Opcode::local_set)
                pop(i, t);
            else
            {
                pop(i, t);
                push(t);
            }
            break;
        }
        case Opcode::global_get:
        case Opcode::global_set:
        {
            if (ins.imm0 >= m_module.globals.size())
                err(i, "global index out of range");
            const GlobalSpec& g = m_module.globals[ins.imm0];
            if (ins.op == Opcode::global_get)
                push(g.type);
            else
            {
                if (!g.is_mutable)
                    err(i, "assignment to immutable global");
                pop(i, g.type);
            }
            break;
        }
        case Opcode::i32_load:
        case Opcode::i64_load:
        case Opcode::i32_store:
        case Opcode::i64_store:
        {
            if (m_module.memories.empty())
                err(i, "memory access without a memory");
            const bool is64 =
                ins.op == Opcode::i64_load || ins.op == Opcode::i64_store;
            const uint32_t natural = is64 ? 3 : 2;
            if (ins.imm0 > natural)
                err(i, "alignment exceeds natural alignment");
            const ValType t = is64 ? ValType::i64 : ValType::i32;
            if (ins.op == Opcode::i32_store || ins.op == Opcode::i64_store)
            {
                pop(i, t);
                pop(i, ValType::i32);
            }
            else
            {
                pop(i, ValType::i32);
                push(t);
            }
            break;
        }
        case Opcode::i32_const:
            push(ValType::i32);
            break;
        case Opcode::i64_const:
            push(ValType::i64);
            break;
        case Opcode::i32_eqz:
            pop(i, ValType::i32);
            push(ValType::i32);
            break;
        case Opcode::i64_eqz:
            pop(i, ValType::i64);
            push(ValType::i32);
            break;
        default:
        {
            // Remaining opcodes are the homogeneous i32/i64 comparisons and
            // binary arithmetic, grouped by opcode byte ranges.
            const auto byte = static_cast<uint8_t>(ins.op);
            if (byte >= 0x46 && byte <= 0x4F)
            {
                pop(i, ValType::i32);
                pop(i, ValType::i32);
                push(ValType::i32);
            }
            else if (byte >= 0x51 && byte <= 0x5A)
            {
                pop(i, ValType::i64);
                pop(i, ValType::i64);
                push(ValType::i32);
            }
            else if (byte >= 0x6A && byte <= 0x76)
            {
                pop(i, ValType::i32);
                pop(i, ValType::i32);
                push(ValType::i32);
            }
            else if (byte >= 0x7C && byte <= 0x88)
            {
                pop(i, ValType::i64);
                pop(i, ValType::i64);
                push(ValType::i64);
            }
            else
            {
                err(i, "opcode outside the supported subset");
            }
            break;
        }
        }
    }

    if (!m_ctrl.empty())
        err(static_cast<uint32_t>(m_func.body.size()) - 1, "unterminated control structure");
    if (m_result && (m_vals.size() != 1))
        err(static_cast<uint32_t>(m_func.body.size()) - 1, "function result missing");
    if (!m_result && !m_vals.empty())
        err(static_cast<uint32_t>(m_func.body.size()) - 1, "unexpected function results");
}

void check_assert_import(const Module& m, const Import& imp)
{
    if (imp.module_name != "env" || imp.field_name != "tcpa_assert")
        fail("unsupported import " + imp.module_name + "." + imp.field_name);
    if (imp.type_index >= m.types.size())
        fail("import type index out of range");
    const FunctionType expected{{ValType::i32}, {}};
    if (!(m.types[imp.type_index] == expected))
        fail("env.tcpa_assert must have type [i32] -> []");
}

}  // namespace

void validate_module(Module& m)
{
    for (const auto& ft : m.types)
    {
        if (ft.results.size() > 1)
            fail("multiple function results are unsupported");
    }

    if (m.imports.size() > 1)
        fail("at most one import is supported");
    for (const auto& imp : m.imports)
        check_assert_import(m, imp);

    for (const auto& f : m.functions)
    {
        if (f.type_index >= m.types.size())
            fail("function type index out of range");
        if (m.types[f.type_index].params.size() + f.locals.size() > MAX_LOCALS)
            fail("too many locals");
    }

    if (m.memories.size() > 1)
        fail("at most one memory is supported");
    for (const auto& mem : m.memories)
    {
        if (mem.initial_pages > MAX_MEMORY_PAGES)
            fail("memory exceeds " + std::to_string(MAX_MEMORY_PAGES) + " pages");
        if (mem.max_pages && *mem.max_pages < mem.initial_pages)
            fail("memory max below initial size");
    }

    if (!m.has_table && !m.table.empty())
        fail("table entries without a table");
    for (const uint32_t entry : m.table)
    {
        if (entry != NO_FUNC && entry >= m.num_funcs())
            fail("table entry out of range");
    }

    for (const auto& g : m.globals)
    {
        if (is_float(g.type))
            fail("float globals are unsupported");
    }

    std::set<std::string> export_names;
    for (const auto& e : m.exports)
    {
        if (!export_names.insert(e.name).second)
            fail("duplicate export name " + e.name);
        if (e.func_index >= m.num_funcs())
            fail("export function index out of range");
    }

    if (m.start)
    {
        if (*m.start >= m.num_funcs())
            fail("start function index out of range");
        const auto& ft = m.type_of(*m.start);
        if (!ft.params.empty() || !ft.results.empty())
            fail("start function must have type [] -> []");
    }

    for (uint32_t i = 0; i < m.functions.size(); ++i)
    {
        Function& f = m.functions[i];
        f.flow = compute_flow(f.body);
        BodyChecker{m, f, static_cast<uint32_t>(m.imports.size()) + i}.run();
        f.cfg = build_cfg(f);
    }
}

uint64_t count_instructions(const Module& m)
{
    uint64_t n = 0;
    for (const auto& f : m.functions)
        n += f.body.size();
    return n;
}

}  // namespace tcpa::wasm
