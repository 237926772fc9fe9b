// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/bytes.hpp>
#include <tcpa/wasm/errors.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tcpa::wasm
{
constexpr uint32_t NO_INDEX = 0xFFFFFFFF;
/// Null entry in the table image.
constexpr uint32_t NO_FUNC = 0xFFFFFFFF;
constexpr uint32_t PAGE_SIZE = 65536;
/// Validation cap on memory size; keeps concrete and symbolic stores
/// comfortably in-process at desk scale.
constexpr uint32_t MAX_MEMORY_PAGES = 256;
constexpr uint32_t MAX_LOCALS = 1024;

enum class ValType : uint8_t
{
    i32 = 0x7F,
    i64 = 0x7E,
    f32 = 0x7D,
    f64 = 0x7C,
};

constexpr bool is_float(ValType t) noexcept
{
    return t == ValType::f32 || t == ValType::f64;
}

const char* val_type_name(ValType t) noexcept;

/// The analyzable instruction subset. Enumerator values are the binary
/// opcode bytes. Float-typed operations are intentionally absent: float
/// values may only flow through locals, drop and select.
enum class Opcode : uint8_t
{
    unreachable = 0x00,
    nop = 0x01,
    block = 0x02,
    loop = 0x03,
    if_ = 0x04,
    else_ = 0x05,
    end = 0x0B,
    br = 0x0C,
    br_if = 0x0D,
    br_table = 0x0E,
    return_ = 0x0F,
    call = 0x10,
    call_indirect = 0x11,
    drop = 0x1A,
    select = 0x1B,
    local_get = 0x20,
    local_set = 0x21,
    local_tee = 0x22,
    global_get = 0x23,
    global_set = 0x24,
    i32_load = 0x28,
    i64_load = 0x29,
    i32_store = 0x36,
    i64_store = 0x37,
    i32_const = 0x41,
    i64_const = 0x42,
    i32_eqz = 0x45,
    i32_eq = 0x46,
    i32_ne = 0x47,
    i32_lt_s = 0x48,
    i32_lt_u = 0x49,
    i32_gt_s = 0x4A,
    i32_gt_u = 0x4B,
    i32_le_s = 0x4C,
    i32_le_u = 0x4D,
    i32_ge_s = 0x4E,
    i32_ge_u = 0x4F,
    i64_eqz = 0x50,
    i64_eq = 0x51,
    i64_ne = 0x52,
    i64_lt_s = 0x53,
    i64_lt_u = 0x54,
    i64_gt_s = 0x55,
    i64_gt_u = 0x56,
    i64_le_s = 0x57,
    i64_le_u = 0x58,
    i64_ge_s = 0x59,
    i64_ge_u = 0x5A,
    i32_add = 0x6A,
    i32_sub = 0x6B,
    i32_mul = 0x6C,
    i32_div_s = 0x6D,
    i32_div_u = 0x6E,
    i32_rem_s = 0x6F,
    i32_rem_u = 0x70,
    i32_and = 0x71,
    i32_or = 0x72,
    i32_xor = 0x73,
    i32_shl = 0x74,
    i32_shr_s = 0x75,
    i32_shr_u = 0x76,
    i64_add = 0x7C,
    i64_sub = 0x7D,
    i64_mul = 0x7E,
    i64_div_s = 0x7F,
    i64_div_u = 0x80,
    i64_rem_s = 0x81,
    i64_rem_u = 0x82,
    i64_and = 0x83,
    i64_or = 0x84,
    i64_xor = 0x85,
    i64_shl = 0x86,
    i64_shr_s = 0x87,
    i64_shr_u = 0x88,
};

/// Immediate layout class of an opcode.
enum class ImmKind : uint8_t
{
    none,
    block_type,     // imm0 = raw blocktype byte (0x40, 0x7F or 0x7E)
    label,          // imm0 = relative depth
    br_table,       // table = targets, imm0 = default depth
    func_idx,       // imm0
    call_indirect,  // imm0 = type index (table index fixed at 0)
    local_idx,      // imm0
    global_idx,     // imm0
    mem_arg,        // imm0 = align (log2), imm1 = offset
    const_i32,      // imm0 = value, zero-extended 32-bit pattern
    const_i64,      // imm0 = value bit pattern
};

struct OpcodeInfo
{
    const char* name;
    ImmKind imm;
};

/// nullptr for bytes outside the subset.
const OpcodeInfo* opcode_info(uint8_t byte) noexcept;
inline const OpcodeInfo& opcode_info(Opcode op) noexcept
{
    return *opcode_info(static_cast<uint8_t>(op));
}

struct Instruction
{
    Opcode op;
    uint64_t imm0 = 0;
    uint64_t imm1 = 0;
    std::vector<uint32_t> table;  // br_table targets, excluding the default
    /// Offset of the opcode byte relative to the start of the code section
    /// payload. Not part of structural equality; it records where the
    /// instruction sits in a particular encoding.
    uint32_t byte_offset = NO_INDEX;

    friend bool operator==(const Instruction& a, const Instruction& b)
    {
        return a.op == b.op && a.imm0 == b.imm0 && a.imm1 == b.imm1 && a.table == b.table;
    }
};

struct FunctionType
{
    std::vector<ValType> params;
    std::vector<ValType> results;  // at most one

    bool operator==(const FunctionType&) const = default;
};

struct Import
{
    std::string module_name;
    std::string field_name;
    uint32_t type_index = 0;

    bool operator==(const Import&) const = default;
};

struct Export
{
    std::string name;
    uint32_t func_index = 0;  // into the combined import+function index space

    bool operator==(const Export&) const = default;
};

struct MemorySpec
{
    uint32_t initial_pages = 0;
    std::optional<uint32_t> max_pages;

    bool operator==(const MemorySpec&) const = default;
};

struct GlobalSpec
{
    ValType type = ValType::i32;
    bool is_mutable = false;
    uint64_t init_bits = 0;

    bool operator==(const GlobalSpec&) const = default;
};

/// Control-flow graph of one function body. Blocks are contiguous
/// instruction ranges; block 0 contains instruction 0 and is the entry.
struct Cfg
{
    enum class EdgeKind : uint8_t
    {
        fallthrough,
        branch_taken,
        branch_not_taken,
        table_case,
    };

    struct Block
    {
        uint32_t first = 0;
        uint32_t last = 0;  // inclusive

        bool operator==(const Block&) const = default;
    };

    struct Edge
    {
        uint32_t from = 0;
        uint32_t to = 0;
        EdgeKind kind = EdgeKind::fallthrough;

        bool operator==(const Edge&) const = default;
    };

    std::vector<Block> blocks;  // ordered by first instruction
    std::vector<Edge> edges;    // ordered by (from, appearance)

    bool operator==(const Cfg&) const = default;

    /// Index of the block whose range covers the instruction.
    uint32_t block_of(uint32_t instr_index) const;
};

const char* edge_kind_name(Cfg::EdgeKind k) noexcept;

/// Structural facts resolved from the nesting of block/loop/if/else/end,
/// one entry per instruction. Meaningful fields:
///   block/loop/if/else: matching_end
///   if:                 else_index (NO_INDEX when absent)
struct FlowInfo
{
    struct Entry
    {
        uint32_t matching_end = NO_INDEX;
        uint32_t else_index = NO_INDEX;
    };
    std::vector<Entry> entries;
};

struct Function
{
    uint32_t type_index = 0;
    std::vector<ValType> locals;  // excluding parameters
    std::vector<Instruction> body;

    // Derived by validate_module(); excluded from structural equality.
    FlowInfo flow;
    Cfg cfg;

    friend bool operator==(const Function& a, const Function& b)
    {
        return a.type_index == b.type_index && a.locals == b.locals && a.body == b.body;
    }
};

struct Module
{
    std::vector<FunctionType> types;
    std::vector<Import> imports;  // at most env.tcpa_assert
    std::vector<Function> functions;
    std::vector<uint32_t> table;  // function indices, NO_FUNC for null entries
    bool has_table = false;
    std::vector<MemorySpec> memories;  // zero or one
    std::vector<GlobalSpec> globals;
    std::vector<Export> exports;
    std::optional<uint32_t> start;

    bool operator==(const Module& o) const
    {
        return types == o.types && imports == o.imports && functions == o.functions &&
               table == o.table && has_table == o.has_table && memories == o.memories &&
               globals == o.globals && exports == o.exports && start == o.start;
    }

    uint32_t num_funcs() const noexcept
    {
        return static_cast<uint32_t>(imports.size() + functions.size());
    }
    bool is_import(uint32_t func_index) const noexcept { return func_index < imports.size(); }
    /// Type of a function in the combined index space.
    const FunctionType& type_of(uint32_t func_index) const;
    /// Defined (non-import) function; func_index must not be an import.
    const Function& code_of(uint32_t func_index) const;
    Function& code_of(uint32_t func_index);
    const Export* find_export(std::string_view name) const;
};

/// Matching end/else resolution for one body. Throws MalformedNesting on
/// unbalanced structure.
FlowInfo compute_flow(const std::vector<Instruction>& body);

/// Basic blocks and edges for one function body.
Cfg build_cfg(const Function& f);

/// Full structural and type validation; fills per-function flow and cfg.
void validate_module(Module& m);

/// Total instruction count over all defined function bodies, block
/// delimiters included.
uint64_t count_instructions(const Module& m);

}  // namespace tcpa::wasm
