// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/interp.hpp>

#include <cstring>

namespace tcpa::interp
{
using wasm::Function;
using wasm::FunctionType;
using wasm::Instruction;
using wasm::Opcode;

const char* trap_reason_name(TrapReason r) noexcept
{
    switch (r)
    {
    case TrapReason::unreachable:
        return "Unreachable";
    case TrapReason::div_by_zero:
        return "DivByZero";
    case TrapReason::integer_overflow:
        return "IntegerOverflow";
    case TrapReason::out_of_bounds:
        return "OutOfBounds";
    case TrapReason::assert_failed:
        return "AssertFailed";
    case TrapReason::indirect_call_out_of_bounds:
        return "IndirectCallOutOfBounds";
    case TrapReason::indirect_call_null:
        return "IndirectCallNull";
    case TrapReason::indirect_call_type_mismatch:
        return "IndirectCallTypeMismatch";
    case TrapReason::call_stack_exhausted:
        return "CallStackExhausted";
    }
    return "?";
}

Instance::Instance(const Module& m) : m_module{m}
{
    if (!m.memories.empty())
        m_memory.assign(size_t{m.memories[0].initial_pages} * wasm::PAGE_SIZE, 0);
    for (const auto& g : m.globals)
        m_globals.push_back({g.type, g.type == ValType::i32 ?
                                         uint64_t{static_cast<uint32_t>(g.init_bits)} :
                                         g.init_bits});
}

namespace
{
struct CtrlEntry
{
    uint32_t instr;  // index of the block/loop/if instruction
    size_t height;   // operand stack height at entry
    uint8_t arity;   // values carried by a branch out of this label
    bool is_loop;
};

struct Frame
{
    uint32_t func_index;
    const Function* fn;
    std::vector<Value> locals;
    std::vector<CtrlEntry> ctrl;
    size_t base;  // operand stack height at function entry
    uint32_t ip = 0;
};

Value typed_zero(ValType t)
{
    return {t, 0};
}

class Executor
{
public:
    Executor(const Module& m, std::vector<uint8_t>& memory, std::vector<Value>& globals,
        uint64_t fuel)
      : m_module{m}, m_memory{memory}, m_globals{globals}, m_fuel{fuel}
    {}

    TraceResult run(uint32_t func_index, std::span<const Value> args);

private:
    TraceResult trap_result(TrapReason reason)
    {
        const Frame& f = m_frames.back();
        const Instruction& ins = f.fn->body[f.ip];
        TraceResult r;
        r.status = TraceResult::Status::trapped;
        r.trap = {reason, f.func_index, f.ip, ins.byte_offset};
        r.instructions_executed = m_executed;
        return r;
    }

    uint8_t label_arity(const Instruction& ins) const
    {
        return ins.imm0 == 0x40 ? 0 : 1;
    }

    void push(Value v) { m_stack.push_back(v); }
    Value pop()
    {
        const Value v = m_stack.back();
        m_stack.pop_back();
        return v;
    }

    /// Enters a function: pops the arguments, pushes a frame. The caller
    /// checks the depth limit.
    void enter(uint32_t func_index)
    {
        const Function& fn = m_module.code_of(func_index);
        const FunctionType& ft = m_module.types[fn.type_index];
        Frame frame;
        frame.func_index = func_index;
        frame.fn = &fn;
        frame.locals.resize(ft.params.size() + fn.locals.size());
        for (size_t i = ft.params.size(); i-- > 0;)
            frame.locals[i] = pop();
        for (size_t i = 0; i < fn.locals.size(); ++i)
            frame.locals[ft.params.size() + i] = typed_zero(fn.locals[i]);
        frame.base = m_stack.size();
        m_frames.push_back(std::move(frame));
    }

    /// Unwinds the current frame, leaving the results on the stack.
    void leave()
    {
        const Frame& f = m_frames.back();
        const FunctionType& ft = m_module.types[f.fn->type_index];
        const size_t nres = ft.results.size();
        std::vector<Value> results(m_stack.end() - nres, m_stack.end());
        m_stack.resize(f.base);
        for (const Value& v : results)
            push(v);
        m_frames.pop_back();
    }

    /// Taken branch to relative depth d within the current frame; a depth
    /// equal to the label stack size returns from the function.
    /// Returns true when the branch returned from the outermost frame.
    bool branch(uint32_t depth)
    {
        Frame& f = m_frames.back();
        if (depth >= f.ctrl.size())
        {
            leave();
            return m_frames.empty();
        }
        const CtrlEntry entry = f.ctrl[f.ctrl.size() - 1 - depth];
        const uint8_t arity = entry.is_loop ? 0 : entry.arity;
        std::vector<Value> carried(m_stack.end() - arity, m_stack.end());
        m_stack.resize(entry.height);
        for (const Value& v : carried)
            push(v);
        f.ctrl.resize(f.ctrl.size() - depth - 1);
        f.ip = entry.is_loop ? entry.instr : f.fn->flow.entries[entry.instr].matching_end + 1;
        return false;
    }

    /// Handles a call to env.tcpa_assert. Returns false on assertion failure.
    bool call_import(uint32_t)
    {
        const Value cond = pop();
        return cond.as_u32() != 0;
    }

    const Module& m_module;
    std::vector<uint8_t>& m_memory;
    std::vector<Value>& m_globals;
    std::vector<Value> m_stack;
    std::vector<Frame> m_frames;
    uint64_t m_fuel;
    uint64_t m_executed = 0;
};

TraceResult Executor::run(uint32_t func_index, std::span<const Value> args)
{
    for (const Value& v : args)
        push(v);

    if (m_module.is_import(func_index))
    {
        // Direct invocation of the assert import.
        ++m_executed;
        const Value cond = pop();
        TraceResult r;
        r.instructions_executed = m_executed;
        if (cond.as_u32() == 0)
        {
            r.status = TraceResult::Status::trapped;
            r.trap = {TrapReason::assert_failed, func_index, 0, wasm::NO_INDEX};
        }
        return r;
    }

    enter(func_index);

    while (!m_frames.empty())
    {
        Frame& f = m_frames.back();
        const Instruction& ins = f.fn->body[f.ip];

        if (m_fuel == 0)
        {
            TraceResult r;
            r.status = TraceResult::Status::out_of_fuel;
            r.instructions_executed = m_executed;
            return r;
        }
        --m_fuel;
        ++m_executed;

        switch (ins.op)
        {
        case Opcode::unreachable:
            return trap_result(TrapReason::unreachable);
        case Opcode::nop:
            break;
        case Opcode::block:
            f.ctrl.push_back({f.ip, m_stack.size(), label_arity(ins), false});
            break;
        case Opcode::loop:
            f.ctrl.push_back({f.ip, m_stack.size(), label_arity(ins), true});
            break;
        case Opcode::if_:
        {
            const Value cond = pop();
            const auto& fe = f.fn->flow.entries[f.ip];
            if (cond.as_u32() != 0)
            {
                f.ctrl.push_back({f.ip, m_stack.size(), label_arity(ins), false});
            }
            else if (fe.else_index != wasm::NO_INDEX)
            {
                f.ctrl.push_back({f.ip, m_stack.size(), label_arity(ins), false});
                f.ip = fe.else_index;  // ++ below lands on the first else-branch instr
            }
            else
            {
                f.ip = fe.matching_end;  // ++ lands after the end; no label pushed
            }
            break;
        }
        case Opcode::else_:
            // Then-branch finished: jump to the matching end, which pops.
            f.ip = f.fn->flow.entries[f.ip].matching_end;
            continue;
        case Opcode::end:
            if (f.ctrl.empty())
            {
                leave();
                continue;
            }
            f.ctrl.pop_back();
            break;
        case Opcode::br:
            if (branch(static_cast<uint32_t>(ins.imm0)))
                goto done;
            continue;
        case Opcode::br_if:
        {
            const Value cond = pop();
            if (cond.as_u32() != 0)
            {
                if (branch(static_cast<uint32_t>(ins.imm0)))
                    goto done;
                continue;
            }
            break;
        }
        case Opcode::br_table:
        {
            const uint32_t idx = pop().as_u32();
            const uint32_t depth = idx < ins.table.size() ?
                                       ins.table[idx] :
                                       static_cast<uint32_t>(ins.imm0);
            if (branch(depth))
                goto done;
            continue;
        }
        case Opcode::return_:
            leave();
            continue;
        case Opcode::call:
        {
            const auto callee = static_cast<uint32_t>(ins.imm0);
            if (m_module.is_import(callee))
            {
                if (!call_import(callee))
                    return trap_result(TrapReason::assert_failed);
                break;
            }
            if (m_frames.size() >= MAX_CALL_DEPTH)
                return trap_result(TrapReason::call_stack_exhausted);
            f.ip += 1;
            enter(callee);
            continue;
        }
        case Opcode::call_indirect:
        {
            const uint32_t idx = pop().as_u32();
            if (idx >= m_module.table.size())
                return trap_result(TrapReason::indirect_call_out_of_bounds);
            const uint32_t callee = m_module.table[idx];
            if (callee == wasm::NO_FUNC)
                return trap_result(TrapReason::indirect_call_null);
            if (!(m_module.type_of(callee) == m_module.types[ins.imm0]))
                return trap_result(TrapReason::indirect_call_type_mismatch);
            if (m_module.is_import(callee))
            {
                if (!call_import(callee))
                    return trap_result(TrapReason::assert_failed);
                break;
            }
            if (m_frames.size() >= MAX_CALL_DEPTH)
                return trap_result(TrapReason::call_stack_exhausted);
            f.ip += 1;
            enter(callee);
            continue;
        }
        case Opcode::drop:
            pop();
            break;
        case Opcode::select:
        {
            const Value cond = pop();
            const Value b = pop();
            const Value a = pop();
            push(cond.as_u32() != 0 ? a : b);
            break;
        }
        case Opcode::local_get:
            push(f.locals[ins.imm0]);
            break;
        case Opcode::local_set:
            f.locals[ins.imm0] = pop();
            break;
        case Opcode::local_tee:
            f.locals[ins.imm0] = m_stack.back();
            break;
        case Opcode::global_get:
            push(m_globals[ins.imm0]);
            break;
        case Opcode::global_set:
            m_globals[ins.imm0] = pop();
            break;
        case Opcode::i32_load:
        case Opcode::i64_load:
        {
            const uint64_t addr = pop().as_u32();
            const uint64_t size = ins.op == Opcode::i64_load ? 8 : 4;
            const uint64_t ea = addr + ins.imm1;
            if (ea + size > m_memory.size())
                return trap_result(TrapReason::out_of_bounds);
            uint64_t bits = 0;
            std::memcpy(&bits, m_memory.data() + ea, size);
            push(ins.op == Opcode::i64_load ? Value::i64(bits) :
                                              Value::i32(static_cast<uint32_t>(bits)));
            break;
        }
        case Opcode::i32_store:
        case Opcode::i64_store:
        {
            const Value v = pop();
            const uint64_t addr = pop().as_u32();
            const uint64_t size = ins.op == Opcode::i64_store ? 8 : 4;
            const uint64_t ea = addr + ins.imm1;
            if (ea + size > m_memory.size())
                return trap_result(TrapReason::out_of_bounds);
            std::memcpy(m_memory.data() + ea, &v.bits, size);
            break;
        }
        case Opcode::i32_const:
            push(Value::i32(static_cast<uint32_t>(ins.imm0)));
            break;
        case Opcode::i64_const:
            push(Value::i64(ins.imm0));
            break;
        case Opcode::i32_eqz:
            push(Value::i32(pop().as_u32() == 0 ? 1 : 0));
            break;
        case Opcode::i64_eqz:
            push(Value::i32(pop().bits == 0 ? 1 : 0));
            break;
        default:
        {
            const auto byte = static_cast<uint8_t>(ins.op);
            if (byte >= 0x46 && byte <= 0x4F)  // i32 comparisons
            {
                const uint32_t b = pop().as_u32();
                const uint32_t a = pop().as_u32();
                const auto sa = static_cast<int32_t>(a);
                const auto sb = static_cast<int32_t>(b);
                bool r = false;
                switch (ins.op)
                {
                case Opcode::i32_eq:
                    r = a == b;
                    break;
                case Opcode::i32_ne:
                    r = a != b;
                    break;
                case Opcode::i32_lt_s:
                    r = sa < sb;
                    break;
                case Opcode::i32_lt_u:
                    r = a < b;
                    break;
                case Opcode::i32_gt_s:
                    r = sa > sb;
                    break;
                case Opcode::i32_gt_u:
                    r = a > b;
                    break;
                case Opcode::i32_le_s:
                    r = sa <= sb;
                    break;
                case Opcode::i32_le_u:
                    r = a <= b;
                    break;
                case Opcode::i32_ge_s:
                    r = sa >= sb;
                    break;
                case Opcode::i32_ge_u:
                    r = a >= b;
                    break;
                default:
                    break;
                }
                push(Value::i32(r ? 1 : 0));
            }
            else if (byte >= 0x51 && byte <= 0x5A)  // i64 comparisons
            {
                const uint64_t b = pop().bits;
                const uint64_t a = pop().bits;
                const auto sa = static_cast<int64_t>(a);
                const auto sb = static_cast<int64_t>(b);
                bool r = false;
                switch (ins.op)
                {
                case Opcode::i64_eq:
                    r = a == b;
                    break;
                case Opcode::i64_ne:
                    r = a != b;
                    break;
                case Opcode::i64_lt_s:
                    r = sa < sb;
                    break;
                case Opcode::i64_lt_u:
                    r = a < b;
                    break;
                case Opcode::i64_gt_s:
                    r = sa > sb;
                    break;
                case Opcode::i64_gt_u:
                    r = a > b;
                    break;
                case Opcode::i64_le_s:
                    r = sa <= sb;
                    break;
                case Opcode::i64_le_u:
                    r = a <= b;
                    break;
                case Opcode::i64_ge_s:
                    r = sa >= sb;
                    break;
                case Opcode::i64_ge_u:
                    r = a >= b;
                    break;
                default:
                    break;
                }
                push(Value::i32(r ? 1 : 0));
            }
            else if (byte >= 0x6A && byte <= 0x76)  // i32 arithmetic
            {
                const uint32_t b = pop().as_u32();
                const uint32_t a = pop().as_u32();
                uint32_t r = 0;
                switch (ins.op)
                {
                case Opcode::i32_add:
                    r = a + b;
                    break;
                case Opcode::i32_sub:
                    r = a - b;
                    break;
                case Opcode::i32_mul:
                    r = a * b;
                    break;
                case Opcode::i32_div_s:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    if (a == 0x80000000u && b == 0xFFFFFFFFu)
                        return trap_result(TrapReason::integer_overflow);
                    r = static_cast<uint32_t>(
                        static_cast<int32_t>(a) / static_cast<int32_t>(b));
                    break;
                case Opcode::i32_div_u:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    r = a / b;
                    break;
                case Opcode::i32_rem_s:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    if (a == 0x80000000u && b == 0xFFFFFFFFu)
                        r = 0;
                    else
                        r = static_cast<uint32_t>(
                            static_cast<int32_t>(a) % static_cast<int32_t>(b));
                    break;
                case Opcode::i32_rem_u:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    r = a % b;
                    break;
                case Opcode::i32_and:
                    r = a & b;
                    break;
                case Opcode::i32_or:
                    r = a | b;
                    break;
                case Opcode::i32_xor:
                    r = a ^ b;
                    break;
                case Opcode::i32_shl:
                    r = a << (b & 31);
                    break;
                case Opcode::i32_shr_s:
                    r = static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31));
                    break;
                case Opcode::i32_shr_u:
                    r = a >> (b & 31);
                    break;
                default:
                    break;
                }
                push(Value::i32(r));
            }
            else  // i64 arithmetic, 0x7C..0x88
            {
                const uint64_t b = pop().bits;
                const uint64_t a = pop().bits;
                uint64_t r = 0;
                switch (ins.op)
                {
                case Opcode::i64_add:
                    r = a + b;
                    break;
                case Opcode::i64_sub:
                    r = a - b;
                    break;
                case Opcode::i64_mul:
                    r = a * b;
                    break;
                case Opcode::i64_div_s:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    if (a == 0x8000000000000000ull && b == ~uint64_t{0})
                        return trap_result(TrapReason::integer_overflow);
                    r = static_cast<uint64_t>(
                        static_cast<int64_t>(a) / static_cast<int64_t>(b));
                    break;
                case Opcode::i64_div_u:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    r = a / b;
                    break;
                case Opcode::i64_rem_s:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    if (a == 0x8000000000000000ull && b == ~uint64_t{0})
                        r = 0;
                    else
                        r = static_cast<uint64_t>(
                            static_cast<int64_t>(a) % static_cast<int64_t>(b));
                    break;
                case Opcode::i64_rem_u:
                    if (b == 0)
                        return trap_result(TrapReason::div_by_zero);
                    r = a % b;
                    break;
                case Opcode::i64_and:
                    r = a & b;
                    break;
                case Opcode::i64_or:
                    r = a | b;
                    break;
                case Opcode::i64_xor:
                    r = a ^ b;
                    break;
                case Opcode::i64_shl:
                    r = a << (b & 63);
                    break;
                case Opcode::i64_shr_s:
                    r = static_cast<uint64_t>(static_cast<int64_t>(a) >> (b & 63));
                    break;
                case Opcode::i64_shr_u:
                    r = a >> (b & 63);
                    break;
                default:
                    break;
                }
                push(Value::i64(r));
            }
            break;
        }
        }
        ++f.ip;
    }

done:
    TraceResult r;
    r.status = TraceResult::Status::terminated;
    r.values = std::move(m_stack);
    r.instructions_executed = m_executed;
    return r;
}

}  // namespace

TraceResult Instance::invoke(uint32_t func_index, std::span<const Value> args, uint64_t fuel)
{
    Executor ex{m_module, m_memory, m_globals, fuel};
    return ex.run(func_index, args);
}

TraceResult Instance::invoke_export(std::string_view name, std::span<const Value> args,
    uint64_t fuel)
{
    const wasm::Export* e = m_module.find_export(name);
    if (e == nullptr)
        throw ExecError{ExecError::Kind::NoSuchExport,
            "no export named '" + std::string{name} + "'"};
    const FunctionType& ft = m_module.type_of(e->func_index);
    if (ft.params.size() != args.size())
        throw ExecError{ExecError::Kind::ArityMismatch,
            "export '" + std::string{name} + "' takes " + std::to_string(ft.params.size()) +
                " arguments, got " + std::to_string(args.size())};
    for (size_t i = 0; i < args.size(); ++i)
        if (args[i].type != ft.params[i])
            throw ExecError{ExecError::Kind::ArityMismatch,
                "argument " + std::to_string(i) + " of export '" + std::string{name} +
                    "' has the wrong type"};
    return invoke(e->func_index, args, fuel);
}

TraceResult run_concrete(const Module& m, std::string_view entry, std::span<const Value> args,
    uint64_t fuel)
{
    Instance inst{m};
    return inst.invoke_export(entry, args, fuel);
}

}  // namespace tcpa::interp
