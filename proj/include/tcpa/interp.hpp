// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/wasm/module.hpp>

#include <span>

namespace tcpa::interp
{
using wasm::Module;
using wasm::ValType;

struct Value
{
    ValType type = ValType::i32;
    uint64_t bits = 0;  // i32 values are zero-extended

    static Value i32(uint32_t v) { return {ValType::i32, v}; }
    static Value i64(uint64_t v) { return {ValType::i64, v}; }

    uint32_t as_u32() const noexcept { return static_cast<uint32_t>(bits); }
    int32_t as_i32() const noexcept { return static_cast<int32_t>(bits); }
    int64_t as_i64() const noexcept { return static_cast<int64_t>(bits); }

    bool operator==(const Value&) const = default;
};

enum class TrapReason
{
    unreachable,
    div_by_zero,
    integer_overflow,
    out_of_bounds,
    assert_failed,
    indirect_call_out_of_bounds,
    indirect_call_null,
    indirect_call_type_mismatch,
    call_stack_exhausted,
};

/// CamelCase identifier, e.g. "DivByZero".
const char* trap_reason_name(TrapReason r) noexcept;

struct Trap
{
    TrapReason reason = TrapReason::unreachable;
    uint32_t func_index = 0;
    uint32_t instr_index = 0;
    /// Offset of the trapping instruction relative to the code section
    /// payload; NO_INDEX when the module carries no offsets.
    uint32_t byte_offset = wasm::NO_INDEX;

    bool operator==(const Trap&) const = default;
};

struct TraceResult
{
    enum class Status
    {
        terminated,
        trapped,
        out_of_fuel,
    };

    Status status = Status::terminated;
    std::vector<Value> values;  // when terminated
    Trap trap;                  // when trapped
    uint64_t instructions_executed = 0;

    bool terminated() const noexcept { return status == Status::terminated; }
    bool trapped() const noexcept { return status == Status::trapped; }
};

/// Invocation errors (distinct from runtime traps).
struct ExecError : std::runtime_error
{
    enum class Kind
    {
        NoSuchExport,
        ArityMismatch,
    };

    ExecError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

constexpr uint32_t MAX_CALL_DEPTH = 1000;

/// One linear memory + globals instance. State persists across invocations
/// on the same instance; analyses use a fresh instance per run.
class Instance
{
public:
    explicit Instance(const Module& m);

    TraceResult invoke(uint32_t func_index, std::span<const Value> args, uint64_t fuel);
    /// Resolves an export by name and checks argument arity/types.
    TraceResult invoke_export(std::string_view name, std::span<const Value> args,
        uint64_t fuel);

    const std::vector<uint8_t>& memory() const noexcept { return m_memory; }
    const std::vector<Value>& globals() const noexcept { return m_globals; }

private:
    const Module& m_module;
    std::vector<uint8_t> m_memory;
    std::vector<Value> m_globals;
};

/// Fresh-instance convenience wrapper matching the CLI `run` semantics.
TraceResult run_concrete(const Module& m, std::string_view entry,
    std::span<const Value> args, uint64_t fuel);

}  // namespace tcpa::interp
