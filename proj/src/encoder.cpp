// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/wasm/encoder.hpp>
#include <tcpa/wasm/leb128.hpp>

namespace tcpa::wasm
{
namespace
{
void write_name(Bytes& out, const std::string& name)
{
    write_uleb(out, name.size());
    out.insert(out.end(), name.begin(), name.end());
}

void write_section(Bytes& out, uint8_t id, const Bytes& payload)
{
    out.push_back(id);
    write_uleb(out, payload.size());
    out.insert(out.end(), payload.begin(), payload.end());
}

void write_instruction(Bytes& out, const Instruction& ins)
{
    out.push_back(static_cast<uint8_t>(ins.op));
    switch (opcode_info(ins.op).imm)
    {
    case ImmKind::none:
        break;
    case ImmKind::block_type:
        out.push_back(static_cast<uint8_t>(ins.imm0));
        break;
    case ImmKind::label:
    case ImmKind::func_idx:
    case ImmKind::local_idx:
    case ImmKind::global_idx:
        write_uleb(out, ins.imm0);
        break;
    case ImmKind::br_table:
        write_uleb(out, ins.table.size());
        for (const uint32_t t : ins.table)
            write_uleb(out, t);
        write_uleb(out, ins.imm0);
        break;
    case ImmKind::call_indirect:
        write_uleb(out, ins.imm0);
        out.push_back(0);
        break;
    case ImmKind::mem_arg:
        write_uleb(out, ins.imm0);
        write_uleb(out, ins.imm1);
        break;
    case ImmKind::const_i32:
        write_sleb(out, static_cast<int32_t>(static_cast<uint32_t>(ins.imm0)));
        break;
    case ImmKind::const_i64:
        write_sleb(out, static_cast<int64_t>(ins.imm0));
        break;
    }
}

}  // namespace

Bytes encode_module(const Module& m, std::vector<std::vector<uint32_t>>* instr_offsets)
{
    Bytes out{0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};

    if (!m.types.empty())
    {
        Bytes sec;
        write_uleb(sec, m.types.size());
        for (const auto& ft : m.types)
        {
            sec.push_back(0x60);
            write_uleb(sec, ft.params.size());
            for (const ValType t : ft.params)
                sec.push_back(static_cast<uint8_t>(t));
            write_uleb(sec, ft.results.size());
            for (const ValType t : ft.results)
                sec.push_back(static_cast<uint8_t>(t));
        }
        write_section(out, 1, sec);
    }

    if (!m.imports.empty())
    {
        Bytes sec;
        write_uleb(sec, m.imports.size());
        for (const auto& imp : m.imports)
        {
            write_name(sec, imp.module_name);
            write_name(sec, imp.field_name);
            sec.push_back(0x00);
            write_uleb(sec, imp.type_index);
        }
        write_section(out, 2, sec);
    }

    if (!m.functions.empty())
    {
        Bytes sec;
        write_uleb(sec, m.functions.size());
        for (const auto& f : m.functions)
            write_uleb(sec, f.type_index);
        write_section(out, 3, sec);
    }

    if (m.has_table)
    {
        Bytes sec;
        write_uleb(sec, 1);
        sec.push_back(0x70);
        sec.push_back(0x00);  // limits: no max
        write_uleb(sec, m.table.size());
        write_section(out, 4, sec);
    }

    if (!m.memories.empty())
    {
        Bytes sec;
        write_uleb(sec, m.memories.size());
        for (const auto& mem : m.memories)
        {
            sec.push_back(mem.max_pages ? 0x01 : 0x00);
            write_uleb(sec, mem.initial_pages);
            if (mem.max_pages)
                write_uleb(sec, *mem.max_pages);
        }
        write_section(out, 5, sec);
    }

    if (!m.globals.empty())
    {
        Bytes sec;
        write_uleb(sec, m.globals.size());
        for (const auto& g : m.globals)
        {
            sec.push_back(static_cast<uint8_t>(g.type));
            sec.push_back(g.is_mutable ? 0x01 : 0x00);
            if (g.type == ValType::i32)
            {
                sec.push_back(0x41);
                write_sleb(sec, static_cast<int32_t>(static_cast<uint32_t>(g.init_bits)));
            }
            else
            {
                sec.push_back(0x42);
                write_sleb(sec, static_cast<int64_t>(g.init_bits));
            }
            sec.push_back(0x0B);
        }
        write_section(out, 6, sec);
    }

    if (!m.exports.empty())
    {
        Bytes sec;
        write_uleb(sec, m.exports.size());
        for (const auto& e : m.exports)
        {
            write_name(sec, e.name);
            sec.push_back(0x00);
            write_uleb(sec, e.func_index);
        }
        write_section(out, 7, sec);
    }

    if (m.start)
    {
        Bytes sec;
        write_uleb(sec, *m.start);
        write_section(out, 8, sec);
    }

    // Element segments reconstructed as maximal runs of non-null entries.
    {
        struct Run
        {
            uint32_t offset;
            std::vector<uint32_t> funcs;
        };
        std::vector<Run> runs;
        for (uint32_t i = 0; i < m.table.size(); ++i)
        {
            if (m.table[i] == NO_FUNC)
                continue;
            if (!runs.empty() && runs.back().offset + runs.back().funcs.size() == i)
                runs.back().funcs.push_back(m.table[i]);
            else
                runs.push_back({i, {m.table[i]}});
        }
        if (!runs.empty())
        {
            Bytes sec;
            write_uleb(sec, runs.size());
            for (const auto& run : runs)
            {
                write_uleb(sec, 0);  // flags: active, table 0
                sec.push_back(0x41);
                write_sleb(sec, static_cast<int32_t>(run.offset));
                sec.push_back(0x0B);
                write_uleb(sec, run.funcs.size());
                for (const uint32_t fidx : run.funcs)
                    write_uleb(sec, fidx);
            }
            write_section(out, 9, sec);
        }
    }

    if (!m.functions.empty())
    {
        if (instr_offsets)
        {
            instr_offsets->clear();
            instr_offsets->resize(m.functions.size());
        }
        Bytes sec;
        write_uleb(sec, m.functions.size());
        for (size_t fi = 0; fi < m.functions.size(); ++fi)
        {
            const Function& f = m.functions[fi];
            Bytes body;
            // Locals compressed into runs of equal types.
            {
                std::vector<std::pair<uint32_t, ValType>> runs;
                for (const ValType t : f.locals)
                {
                    if (!runs.empty() && runs.back().second == t)
                        ++runs.back().first;
                    else
                        runs.push_back({1, t});
                }
                write_uleb(body, runs.size());
                for (const auto& [n, t] : runs)
                {
                    write_uleb(body, n);
                    body.push_back(static_cast<uint8_t>(t));
                }
            }
            std::vector<uint32_t> offsets;
            offsets.reserve(f.body.size());
            for (const auto& ins : f.body)
            {
                offsets.push_back(static_cast<uint32_t>(body.size()));
                write_instruction(body, ins);
            }

            // Instruction offsets are relative to the code section payload:
            // shift by the body size field and everything emitted so far.
            Bytes size_field;
            write_uleb(size_field, body.size());
            const auto base = static_cast<uint32_t>(sec.size() + size_field.size());
            if (instr_offsets)
            {
                for (uint32_t& off : offsets)
                    off += base;
                (*instr_offsets)[fi] = std::move(offsets);
            }
            sec.insert(sec.end(), size_field.begin(), size_field.end());
            sec.insert(sec.end(), body.begin(), body.end());
        }
        write_section(out, 10, sec);
    }

    return out;
}

}  // namespace tcpa::wasm
