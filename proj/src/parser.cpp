// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/wasm/leb128.hpp>
#include <tcpa/wasm/parser.hpp>

#include <array>

namespace tcpa::wasm
{
namespace
{
constexpr std::array<uint8_t, 4> WASM_MAGIC{0x00, 0x61, 0x73, 0x6D};
constexpr std::array<uint8_t, 4> WASM_VERSION{0x01, 0x00, 0x00, 0x00};

enum Section : uint8_t
{
    SEC_TYPE = 1,
    SEC_IMPORT = 2,
    SEC_FUNCTION = 3,
    SEC_TABLE = 4,
    SEC_MEMORY = 5,
    SEC_GLOBAL = 6,
    SEC_EXPORT = 7,
    SEC_START = 8,
    SEC_ELEMENT = 9,
    SEC_CODE = 10,
};

[[noreturn]] void fail(ParseError::Kind kind, const std::string& msg, size_t offset)
{
    throw ParseError{kind, msg, offset};
}

ValType parse_valtype(Cursor& cur)
{
    const size_t at = cur.pos;
    const uint8_t byte = cur.u8();
    switch (byte)
    {
    case 0x7F:
        return ValType::i32;
    case 0x7E:
        return ValType::i64;
    case 0x7D:
        return ValType::f32;
    case 0x7C:
        return ValType::f64;
    default:
        fail(ParseError::Kind::ValidationFailure, "invalid value type", at);
    }
}

std::string parse_name(Cursor& cur)
{
    const uint32_t len = read_u32(cur);
    const auto raw = cur.raw(len);
    return std::string{reinterpret_cast<const char*>(raw.data()), raw.size()};
}

std::pair<uint32_t, std::optional<uint32_t>> parse_limits(Cursor& cur)
{
    const size_t at = cur.pos;
    const uint8_t flags = cur.u8();
    if (flags > 1)
        fail(ParseError::Kind::ValidationFailure, "invalid limits flags", at);
    const uint32_t initial = read_u32(cur);
    std::optional<uint32_t> max;
    if (flags == 1)
        max = read_u32(cur);
    return {initial, max};
}

/// Constant expression of the form `t.const <v> end`, used by globals and
/// element segment offsets.
std::pair<ValType, uint64_t> parse_const_expr(Cursor& cur)
{
    const size_t at = cur.pos;
    const uint8_t op = cur.u8();
    ValType type;
    uint64_t bits;
    if (op == 0x41)
    {
        type = ValType::i32;
        bits = static_cast<uint32_t>(read_sleb(cur, 32));
    }
    else if (op == 0x42)
    {
        type = ValType::i64;
        bits = static_cast<uint64_t>(read_sleb(cur, 64));
    }
    else
    {
        const auto* info = opcode_info(op);
        const std::string what = info ? info->name : "0x" + to_hex(Bytes{op});
        fail(ParseError::Kind::UnsupportedOpcode,
            "unsupported opcode in constant expression: " + what, at);
    }
    const size_t end_at = cur.pos;
    if (cur.u8() != 0x0B)
        fail(ParseError::Kind::ValidationFailure, "constant expression not terminated", end_at);
    return {type, bits};
}

std::vector<Instruction> parse_body(Cursor& cur, size_t code_payload_start)
{
    std::vector<Instruction> body;
    size_t depth = 1;  // implicit function frame
    while (depth > 0)
    {
        const size_t at = cur.pos;
        const uint8_t byte = cur.u8();
        const OpcodeInfo* info = opcode_info(byte);
        if (info == nullptr)
            fail(ParseError::Kind::UnsupportedOpcode,
                "unsupported opcode 0x" + to_hex(Bytes{byte}), at);

        Instruction ins;
        ins.op = static_cast<Opcode>(byte);
        ins.byte_offset = static_cast<uint32_t>(at - code_payload_start);
        switch (info->imm)
        {
        case ImmKind::none:
            break;
        case ImmKind::block_type:
        {
            const size_t bt_at = cur.pos;
            const uint8_t bt = cur.u8();
            if (bt != 0x40 && bt != 0x7F && bt != 0x7E)
                fail(bt == 0x7D || bt == 0x7C ? ParseError::Kind::UnsupportedOpcode :
                                                ParseError::Kind::ValidationFailure,
                    "unsupported block type", bt_at);
            ins.imm0 = bt;
            break;
        }
        case ImmKind::label:
        case ImmKind::func_idx:
        case ImmKind::local_idx:
        case ImmKind::global_idx:
            ins.imm0 = read_u32(cur);
            break;
        case ImmKind::br_table:
        {
            const uint32_t count = read_u32(cur);
            ins.table.reserve(count);
            for (uint32_t k = 0; k < count; ++k)
                ins.table.push_back(read_u32(cur));
            ins.imm0 = read_u32(cur);
            break;
        }
        case ImmKind::call_indirect:
        {
            ins.imm0 = read_u32(cur);
            const size_t tbl_at = cur.pos;
            if (cur.u8() != 0)
                fail(ParseError::Kind::ValidationFailure,
                    "call_indirect table index must be 0", tbl_at);
            break;
        }
        case ImmKind::mem_arg:
            ins.imm0 = read_u32(cur);  // align
            ins.imm1 = read_u32(cur);  // offset
            break;
        case ImmKind::const_i32:
            ins.imm0 = static_cast<uint32_t>(read_sleb(cur, 32));
            break;
        case ImmKind::const_i64:
            ins.imm0 = static_cast<uint64_t>(read_sleb(cur, 64));
            break;
        }

        if (ins.op == Opcode::block || ins.op == Opcode::loop || ins.op == Opcode::if_)
            ++depth;
        else if (ins.op == Opcode::end)
            --depth;
        body.push_back(std::move(ins));
    }
    return body;
}

}  // namespace

Module parse_module(BytesView input)
{
    Cursor cur{input};

    if (cur.remaining() < 4 || !std::equal(WASM_MAGIC.begin(), WASM_MAGIC.end(), input.begin()))
        fail(ParseError::Kind::BadMagic, "not a wasm binary (bad magic)", 0);
    cur.pos = 4;
    {
        const auto ver = cur.raw(4);
        if (!std::equal(WASM_VERSION.begin(), WASM_VERSION.end(), ver.begin()))
            fail(ParseError::Kind::BadMagic, "unsupported wasm version", 4);
    }

    Module m;
    std::vector<uint32_t> func_type_indices;
    struct ElemSegment
    {
        uint32_t offset;
        std::vector<uint32_t> funcs;
    };
    std::vector<ElemSegment> elems;
    std::optional<uint32_t> declared_table_size;
    std::optional<uint32_t> table_max;
    bool seen_code = false;

    int last_section = 0;
    while (!cur.done())
    {
        const size_t sec_at = cur.pos;
        const uint8_t id = cur.u8();
        const uint32_t size = read_u32(cur);
        if (id < SEC_TYPE || id > SEC_CODE)
            fail(ParseError::Kind::UnsupportedSection,
                "unsupported section id " + std::to_string(id), sec_at);
        if (id <= last_section)
            fail(ParseError::Kind::ValidationFailure,
                "section id " + std::to_string(id) + " out of order", sec_at);
        last_section = id;

        const size_t payload_start = cur.pos;
        if (cur.remaining() < size)
            fail(ParseError::Kind::TruncatedInput, "section extends past end of input", sec_at);
        Cursor sec{cur.raw(size), 0};

        switch (id)
        {
        case SEC_TYPE:
        {
            const uint32_t count = read_u32(sec);
            for (uint32_t i = 0; i < count; ++i)
            {
                const size_t at = payload_start + sec.pos;
                if (sec.u8() != 0x60)
                    fail(ParseError::Kind::ValidationFailure, "invalid function type tag", at);
                FunctionType ft;
                const uint32_t nparams = read_u32(sec);
                for (uint32_t p = 0; p < nparams; ++p)
                    ft.params.push_back(parse_valtype(sec));
                const uint32_t nresults = read_u32(sec);
                for (uint32_t r = 0; r < nresults; ++r)
                    ft.results.push_back(parse_valtype(sec));
                m.types.push_back(std::move(ft));
            }
            break;
        }
        case SEC_IMPORT:
        {
            const uint32_t count = read_u32(sec);
            for (uint32_t i = 0; i < count; ++i)
            {
                Import imp;
                imp.module_name = parse_name(sec);
                imp.field_name = parse_name(sec);
                const size_t at = payload_start + sec.pos;
                const uint8_t kind = sec.u8();
                if (kind != 0)
                    fail(ParseError::Kind::ValidationFailure,
                        "only function imports are supported", at);
                imp.type_index = read_u32(sec);
                m.imports.push_back(std::move(imp));
            }
            break;
        }
        case SEC_FUNCTION:
        {
            const uint32_t count = read_u32(sec);
            for (uint32_t i = 0; i < count; ++i)
                func_type_indices.push_back(read_u32(sec));
            break;
        }
        case SEC_TABLE:
        {
            const uint32_t count = read_u32(sec);
            if (count > 1)
                fail(ParseError::Kind::ValidationFailure, "at most one table is supported",
                    payload_start);
            if (count == 1)
            {
                const size_t at = payload_start + sec.pos;
                if (sec.u8() != 0x70)
                    fail(ParseError::Kind::ValidationFailure, "table must be funcref", at);
                const auto [initial, max] = parse_limits(sec);
                declared_table_size = initial;
                table_max = max;
                m.has_table = true;
            }
            break;
        }
        case SEC_MEMORY:
        {
            const uint32_t count = read_u32(sec);
            for (uint32_t i = 0; i < count; ++i)
            {
                const auto [initial, max] = parse_limits(sec);
                m.memories.push_back({initial, max});
            }
            break;
        }
        case SEC_GLOBAL:
        {
            const uint32_t count = read_u32(sec);
            for (uint32_t i = 0; i < count; ++i)
            {
                GlobalSpec g;
                g.type = parse_valtype(sec);
                const size_t at = payload_start + sec.pos;
                const uint8_t mut = sec.u8();
                if (mut > 1)
                    fail(ParseError::Kind::ValidationFailure, "invalid mutability flag", at);
                g.is_mutable = mut == 1;
                const auto [init_type, bits] = parse_const_expr(sec);
                if (init_type != g.type)
                    fail(ParseError::Kind::ValidationFailure,
                        "global initializer type mismatch", at);
                g.init_bits = bits;
                m.globals.push_back(g);
            }
            break;
        }
        case SEC_EXPORT:
        {
            const uint32_t count = read_u32(sec);
            for (uint32_t i = 0; i < count; ++i)
            {
                Export e;
                e.name = parse_name(sec);
                const size_t at = payload_start + sec.pos;
                const uint8_t kind = sec.u8();
                if (kind != 0)
                    fail(ParseError::Kind::ValidationFailure,
                        "only function exports are supported", at);
                e.func_index = read_u32(sec);
                m.exports.push_back(std::move(e));
            }
            break;
        }
        case SEC_START:
            m.start = read_u32(sec);
            break;
        case SEC_ELEMENT:
        {
            const uint32_t count = read_u32(sec);
            for (uint32_t i = 0; i < count; ++i)
            {
                const size_t at = payload_start + sec.pos;
                const uint32_t flags = read_u32(sec);
                if (flags != 0)
                    fail(ParseError::Kind::ValidationFailure,
                        "only active table-0 element segments are supported", at);
                const auto [offset_type, offset_bits] = parse_const_expr(sec);
                if (offset_type != ValType::i32)
                    fail(ParseError::Kind::ValidationFailure,
                        "element offset must be i32", at);
                ElemSegment seg;
                seg.offset = static_cast<uint32_t>(offset_bits);
                const uint32_t nfuncs = read_u32(sec);
                for (uint32_t k = 0; k < nfuncs; ++k)
                    seg.funcs.push_back(read_u32(sec));
                elems.push_back(std::move(seg));
            }
            break;
        }
        case SEC_CODE:
        {
            seen_code = true;
            const uint32_t count = read_u32(sec);
            if (count != func_type_indices.size())
                fail(ParseError::Kind::ValidationFailure,
                    "code entry count does not match function section", payload_start);
            for (uint32_t i = 0; i < count; ++i)
            {
                const uint32_t body_size = read_u32(sec);
                const size_t body_start = sec.pos;
                if (sec.remaining() < body_size)
                    fail(ParseError::Kind::TruncatedInput, "function body extends past section",
                        payload_start + body_start);

                Function f;
                f.type_index = func_type_indices[i];
                const uint32_t local_groups = read_u32(sec);
                for (uint32_t g = 0; g < local_groups; ++g)
                {
                    const uint32_t n = read_u32(sec);
                    const ValType t = parse_valtype(sec);
                    if (f.locals.size() + n > MAX_LOCALS)
                        fail(ParseError::Kind::ValidationFailure, "too many locals",
                            payload_start + sec.pos);
                    f.locals.insert(f.locals.end(), n, t);
                }
                f.body = parse_body(sec, 0);
                if (sec.pos != body_start + body_size)
                    fail(ParseError::Kind::ValidationFailure, "function body size mismatch",
                        payload_start + body_start);
                m.functions.push_back(std::move(f));
            }
            break;
        }
        default:
            break;
        }

        if (!sec.done())
            fail(ParseError::Kind::ValidationFailure, "section size mismatch", sec_at);
    }

    if (!func_type_indices.empty() && !seen_code)
        fail(ParseError::Kind::TruncatedInput, "missing code section", input.size());

    // Materialize the table image from the declared size and segments.
    if (m.has_table)
    {
        uint64_t size = declared_table_size.value_or(0);
        if (table_max && *table_max < size)
            fail(ParseError::Kind::ValidationFailure, "table max below initial size", 0);
        for (const auto& seg : elems)
        {
            const uint64_t end = uint64_t{seg.offset} + seg.funcs.size();
            if (end > size)
                fail(ParseError::Kind::ValidationFailure, "element segment out of bounds", 0);
        }
        if (size > 65536)
            fail(ParseError::Kind::ValidationFailure, "table too large", 0);
        m.table.assign(static_cast<size_t>(size), NO_FUNC);
        for (const auto& seg : elems)
            for (size_t k = 0; k < seg.funcs.size(); ++k)
                m.table[seg.offset + k] = seg.funcs[k];
    }
    else if (!elems.empty())
    {
        fail(ParseError::Kind::ValidationFailure, "element segment without table", 0);
    }

    validate_module(m);
    return m;
}

}  // namespace tcpa::wasm
