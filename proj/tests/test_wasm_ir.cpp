// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/wasm/assembler.hpp>
#include <tcpa/wasm/encoder.hpp>
#include <tcpa/wasm/leb128.hpp>
#include <tcpa/wasm/parser.hpp>

#include "support/oracle_disasm.hpp"
#include "support/wat_gen.hpp"

#include <doctest.h>

#include <set>

using namespace tcpa;
using namespace tcpa::wasm;

namespace
{
Module assemble_and_parse(std::string_view source)
{
    const AssembledModule am = assemble_text(source);
    return parse_module(am.bytes);
}

const char* const CONST7 = R"((module
  (func (export "seven") (result i32)
    i32.const 7
  )
))";

}  // namespace

TEST_CASE("leb128 roundtrips and accepts non-minimal forms")
{
    for (const uint64_t v : {uint64_t{0}, uint64_t{1}, uint64_t{127}, uint64_t{128},
             uint64_t{624485}, uint64_t{0xFFFFFFFF}, ~uint64_t{0}})
    {
        Bytes b;
        write_uleb(b, v);
        Cursor cur{b};
        CHECK(read_uleb(cur, 64) == v);
        CHECK(cur.done());
    }
    for (const int64_t v : {int64_t{0}, int64_t{-1}, int64_t{63}, int64_t{-64}, int64_t{64},
             int64_t{-123456}, int64_t{2147483647}, int64_t{-2147483648},
             int64_t{9223372036854775807ll}})
    {
        Bytes b;
        write_sleb(b, v);
        Cursor cur{b};
        CHECK(read_sleb(cur, 64) == v);
        CHECK(cur.done());
    }

    // Non-minimal zero: 0x80 0x00.
    {
        const Bytes b{0x80, 0x00};
        Cursor cur{b};
        CHECK(read_uleb(cur, 32) == 0);
    }
    // Too wide for u32.
    {
        const Bytes b{0x80, 0x80, 0x80, 0x80, 0x10};
        Cursor cur{b};
        CHECK_THROWS_AS((void)read_uleb(cur, 32), ParseError);
    }
    // Truncated stream.
    {
        const Bytes b{0x80};
        Cursor cur{b};
        CHECK_THROWS_AS((void)read_uleb(cur, 32), ParseError);
    }
}

TEST_CASE("header-only module parses to all-empty sections")
{
    const Bytes header{0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};
    const Module m = parse_module(header);
    CHECK(m.types.empty());
    CHECK(m.functions.empty());
    CHECK(m.imports.empty());
    CHECK(m.exports.empty());
    CHECK(m.memories.empty());
    CHECK(m.globals.empty());
    CHECK_FALSE(m.has_table);
    CHECK_FALSE(m.start.has_value());
    CHECK(count_instructions(m) == 0);
}

TEST_CASE("corrupted magic is rejected")
{
    const Bytes bad{0x00, 0x61, 0x73, 0x6E, 0x01, 0x00, 0x00, 0x00};
    try
    {
        parse_module(bad);
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(e.kind == ParseError::Kind::BadMagic);
    }

    const Bytes bad_version{0x00, 0x61, 0x73, 0x6D, 0x02, 0x00, 0x00, 0x00};
    CHECK_THROWS_AS((void)parse_module(bad_version), ParseError);
}

TEST_CASE("constant-7 function decodes to two instructions")
{
    const AssembledModule am = assemble_text(CONST7);
    const Module m = parse_module(am.bytes);
    REQUIRE(m.functions.size() == 1);
    REQUIRE(m.functions[0].body.size() == 2);
    CHECK(m.functions[0].body[0].op == Opcode::i32_const);
    CHECK(m.functions[0].body[0].imm0 == 7);
    CHECK(m.functions[0].body[1].op == Opcode::end);
    CHECK(count_instructions(m) == 2);
    CHECK(oracle::count_instructions(am.bytes) == 2);
}

TEST_CASE("count is additive over identical functions")
{
    const Module one = assemble_and_parse(R"((module
      (func (export "f") (result i32) i32.const 1 i32.const 2 i32.add)
    ))");
    const Module two = assemble_and_parse(R"((module
      (func (export "f") (result i32) i32.const 1 i32.const 2 i32.add)
      (func (export "g") (result i32) i32.const 1 i32.const 2 i32.add)
    ))");
    CHECK(count_instructions(two) == 2 * count_instructions(one));
}

TEST_CASE("unsupported opcodes and sections are named errors")
{
    // f32.add (0x92) inside a body.
    Bytes body{0x02, 0x40, 0x0B, 0x92, 0x0B};  // block/end then f32.add end
    // Build a minimal module by hand: type () -> (), one function.
    Bytes mod{0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};
    // type section: 1 entry () -> ()
    const Bytes type_sec{0x01, 0x04, 0x01, 0x60, 0x00, 0x00};
    mod.insert(mod.end(), type_sec.begin(), type_sec.end());
    // function section
    const Bytes func_sec{0x03, 0x02, 0x01, 0x00};
    mod.insert(mod.end(), func_sec.begin(), func_sec.end());
    // code section: 1 body, locals=0
    Bytes code{0x00};  // local group count
    code.insert(code.end(), body.begin(), body.end());
    Bytes code_sec{0x0A};
    code_sec.push_back(static_cast<uint8_t>(code.size() + 2));
    code_sec.push_back(0x01);
    code_sec.push_back(static_cast<uint8_t>(code.size()));
    code_sec.insert(code_sec.end(), code.begin(), code.end());
    mod.insert(mod.end(), code_sec.begin(), code_sec.end());

    try
    {
        parse_module(mod);
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(e.kind == ParseError::Kind::UnsupportedOpcode);
        CHECK(std::string{e.what()}.find("0x92") != std::string::npos);
    }

    // Data section (id 11) is outside the subset.
    Bytes with_data{0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00, 0x0B, 0x01, 0x00};
    try
    {
        parse_module(with_data);
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(e.kind == ParseError::Kind::UnsupportedSection);
    }

    // Truncated section payload.
    const Bytes truncated{0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00, 0x01, 0x7F};
    try
    {
        parse_module(truncated);
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(e.kind == ParseError::Kind::TruncatedInput);
    }
}

TEST_CASE("import restricted to env.tcpa_assert")
{
    CHECK_NOTHROW(assemble_and_parse(R"((module
      (import "env" "tcpa_assert" (func $assert (param i32)))
      (func (export "f") i32.const 1 call $assert)
    ))"));

    CHECK_THROWS_AS(assemble_text(R"((module
      (import "env" "other" (func (param i32)))
    ))"),
        AsmError);
}

TEST_CASE("straight-line body yields one block and no edges")
{
    const Module m = assemble_and_parse(CONST7);
    const Cfg& cfg = m.functions[0].cfg;
    CHECK(cfg.blocks.size() == 1);
    CHECK(cfg.edges.empty());
    CHECK(cfg.blocks[0].first == 0);
    CHECK(cfg.blocks[0].last == 1);
}

TEST_CASE("if/else with merge yields four blocks and four edges")
{
    const Module m = assemble_and_parse(R"((module
      (func (export "f") (param $x i32) (result i32) (local $r i32)
        local.get $x
        if
          i32.const 1
          local.set $r
        else
          i32.const 2
          local.set $r
        end
        local.get $r
      )
    ))");
    const Cfg& cfg = m.functions[0].cfg;
    CHECK(cfg.blocks.size() == 4);
    CHECK(cfg.edges.size() == 4);

    // Entry branches to both arms; both arms jump to the merge block.
    const uint32_t entry = 0;
    std::multiset<Cfg::EdgeKind> entry_kinds;
    std::set<uint32_t> entry_targets;
    uint32_t merge_hits = 0;
    for (const auto& e : cfg.edges)
    {
        if (e.from == entry)
        {
            entry_kinds.insert(e.kind);
            entry_targets.insert(e.to);
        }
        if (e.to == 3)
            ++merge_hits;
    }
    CHECK(entry_targets == std::set<uint32_t>{1, 2});
    CHECK(entry_kinds.count(Cfg::EdgeKind::branch_taken) == 1);
    CHECK(entry_kinds.count(Cfg::EdgeKind::branch_not_taken) == 1);
    CHECK(merge_hits == 2);
}

TEST_CASE("loop back-edge goes from body block to loop header")
{
    const Module m = assemble_and_parse(R"((module
      (func (export "f") (param $x i32)
        loop $top
          local.get $x
          i32.const 1
          i32.sub
          local.tee $x
          br_if $top
        end
      )
    ))");
    const Cfg& cfg = m.functions[0].cfg;
    // Header block holds the loop instruction.
    const uint32_t header = cfg.block_of(0);
    CHECK(m.functions[0].body[cfg.blocks[header].first].op == Opcode::loop);
    bool back_edge = false;
    for (const auto& e : cfg.edges)
        if (e.to == header && e.from != header && e.from > header)
            back_edge = e.kind == Cfg::EdgeKind::branch_taken;
    CHECK(back_edge);

    // Blocks partition the body.
    uint32_t next = 0;
    for (const auto& b : cfg.blocks)
    {
        CHECK(b.first == next);
        next = b.last + 1;
    }
    CHECK(next == m.functions[0].body.size());
}

TEST_CASE("br_table emits deduplicated table-case edges")
{
    const Module m = assemble_and_parse(R"((module
      (func (export "f") (param $x i32) (result i32)
        block $a
          block $b
            local.get $x
            br_table $a $b $a
          end
          i32.const 10
          return
        end
        i32.const 20
      )
    ))");
    const Cfg& cfg = m.functions[0].cfg;
    uint32_t table_edges = 0;
    std::set<uint32_t> targets;
    for (const auto& e : cfg.edges)
        if (e.kind == Cfg::EdgeKind::table_case)
        {
            ++table_edges;
            targets.insert(e.to);
        }
    CHECK(table_edges == 2);  // $a and $b, duplicates collapsed
    CHECK(targets.size() == 2);
}

TEST_CASE("malformed nesting is reported")
{
    std::vector<Instruction> body;
    body.push_back({Opcode::block, 0x40, 0, {}, NO_INDEX});
    body.push_back({Opcode::end, 0, 0, {}, NO_INDEX});
    // Missing function-final end.
    CHECK_THROWS_AS((void)compute_flow(body), ParseError);

    try
    {
        std::vector<Instruction> unbalanced;
        unbalanced.push_back({Opcode::block, 0x40, 0, {}, NO_INDEX});
        unbalanced.push_back({Opcode::end, 0, 0, {}, NO_INDEX});
        unbalanced.push_back({Opcode::end, 0, 0, {}, NO_INDEX});
        unbalanced.push_back({Opcode::end, 0, 0, {}, NO_INDEX});
        compute_flow(unbalanced);
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(e.kind == ParseError::Kind::MalformedNesting);
    }
}

TEST_CASE("assembler determinism and empty module")
{
    CHECK(assemble_text(CONST7).bytes == assemble_text(CONST7).bytes);

    const AssembledModule empty = assemble_text("(module)");
    CHECK(empty.bytes == Bytes{0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00});
    CHECK(empty.map.entries().empty());
}

TEST_CASE("assembler reports undefined names with positions")
{
    try
    {
        assemble_text("(module\n  (func (export \"f\")\n    local.get $missing\n  )\n)");
        FAIL("expected AsmError");
    }
    catch (const AsmError& e)
    {
        CHECK(e.kind == AsmError::Kind::SyntaxError);
        CHECK(e.line == 3);
        CHECK(std::string{e.what()}.find("$missing") != std::string::npos);
    }

    try
    {
        assemble_text("(module\n  (func\n    br $nope\n  )\n)");
        FAIL("expected AsmError");
    }
    catch (const AsmError& e)
    {
        CHECK(e.kind == AsmError::Kind::SyntaxError);
        CHECK(e.line == 3);
    }

    try
    {
        assemble_text("(module (func (export \"f\") call $ghost))");
        FAIL("expected AsmError");
    }
    catch (const AsmError& e)
    {
        CHECK(e.kind == AsmError::Kind::SyntaxError);
    }
}

TEST_CASE("assembler rejects unsupported constructs")
{
    try
    {
        assemble_text("(module (func (export \"f\") (result f32)\n    f32.const 1.5\n  ))");
        FAIL("expected AsmError");
    }
    catch (const AsmError& e)
    {
        CHECK(e.kind == AsmError::Kind::UnsupportedConstruct);
    }

    CHECK_THROWS_AS(assemble_text("(module (data (i32.const 0) \"x\"))"), AsmError);
    CHECK_THROWS_AS(assemble_text("(module (func (i32.add (i32.const 1) (i32.const 2))))"),
        AsmError);
}

TEST_CASE("source maps are total, invertible and serializable")
{
    const AssembledModule am = assemble_text(R"((module
  (func (export "f") (param $x i32) (result i32)
    local.get $x
    i32.const 2
    i32.mul
  )
))");
    const Module m = parse_module(am.bytes);

    size_t instrs = 0;
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (const auto& f : m.functions)
        for (const auto& ins : f.body)
        {
            ++instrs;
            const auto entry = am.map.lookup(ins.byte_offset);
            REQUIRE(entry.has_value());
            CHECK(seen.insert({entry->line, entry->col}).second);
            const auto back = am.map.reverse_lookup(entry->line, entry->col);
            REQUIRE(back.has_value());
            CHECK(back->offset == ins.byte_offset);
        }
    CHECK(am.map.entries().size() == instrs);

    const SourceMap reparsed = SourceMap::deserialize(am.map.serialize());
    CHECK(reparsed == am.map);

    CHECK_THROWS_AS((void)SourceMap::deserialize("0\t1\t1\n0\t2\t2\n"), DecodeError);
    CHECK_THROWS_AS((void)SourceMap::deserialize("0\t1\t1\n4\t1\t1\n"), DecodeError);
}

TEST_CASE("tables, globals, memory and start roundtrip")
{
    const char* const src = R"((module
      (import "env" "tcpa_assert" (func $assert (param i32)))
      (memory 1 2)
      (global $g (mut i32) (i32.const 41))
      (global $h i64 (i64.const -7))
      (table (elem $f $f $g0))
      (func $g0 (result i32) i32.const 3)
      (func $f (export "f") (param $x i32) (result i32)
        local.get $x
        i32.const 1
        call_indirect (param i32) (result i32)
      )
      (func $init global.get $g drop)
      (start $init)
    ))";
    const AssembledModule am = assemble_text(src);
    const Module m = parse_module(am.bytes);

    CHECK(m.imports.size() == 1);
    CHECK(m.imports[0].module_name == "env");
    CHECK(m.memories.size() == 1);
    CHECK(m.memories[0].max_pages == 2);
    REQUIRE(m.globals.size() == 2);
    CHECK(m.globals[0].is_mutable);
    CHECK(m.globals[0].init_bits == 41);
    CHECK(m.globals[1].type == ValType::i64);
    CHECK(static_cast<int64_t>(m.globals[1].init_bits) == -7);
    REQUIRE(m.table.size() == 3);
    CHECK(m.table[0] == m.table[1]);
    CHECK(m.start.has_value());

    const Bytes again = encode_module(m);
    CHECK(again == am.bytes);
    CHECK(parse_module(again) == m);
}

TEST_CASE("validation failures carry the violated rule")
{
    // Type error: i64 where i32 expected.
    CHECK_THROWS_AS(assemble_text(R"((module
      (func (export "f") (result i32) i64.const 1)
    ))"),
        AsmError);

    // Unbalanced stack.
    CHECK_THROWS_AS(assemble_text(R"((module
      (func (export "f") i32.const 1)
    ))"),
        AsmError);

    // Branch depth out of range.
    CHECK_THROWS_AS(assemble_text(R"((module
      (func (export "f") br 4)
    ))"),
        AsmError);

    // Memory access without memory.
    CHECK_THROWS_AS(assemble_text(R"((module
      (func (export "f") i32.const 0 i32.load drop)
    ))"),
        AsmError);

    // Duplicate export names.
    CHECK_THROWS_AS(assemble_text(R"((module
      (func (export "f") )
      (func (export "f") )
    ))"),
        AsmError);

    // if with a result requires else.
    CHECK_THROWS_AS(assemble_text(R"((module
      (func (export "f") (result i32)
        i32.const 1
        if (result i32)
          i32.const 2
        end
      )
    ))"),
        AsmError);
}

TEST_CASE("generated corpus: roundtrip equality and oracle counts")
{
    int checked = 0;
    for (uint64_t seed = 1; seed <= 120; ++seed)
    {
        const auto profile =
            seed % 3 == 0 ? watgen::Profile::fidelity : watgen::Profile::oracle;
        const watgen::Generated g = watgen::generate(seed, profile);
        CAPTURE(seed);
        CAPTURE(g.source);

        AssembledModule am;
        REQUIRE_NOTHROW(am = assemble_text(g.source));
        Module m;
        REQUIRE_NOTHROW(m = parse_module(am.bytes));

        // Canonical re-serialization is a fixed point.
        const Bytes re = encode_module(m);
        CHECK(re == am.bytes);
        const Module m2 = parse_module(re);
        CHECK(m2 == m);

        // Instruction counts agree with the independent disassembler.
        CHECK(count_instructions(m) == oracle::count_instructions(am.bytes));

        // Assembling identical source twice is byte-identical.
        CHECK(assemble_text(g.source).bytes == am.bytes);
        ++checked;
    }
    CHECK(checked == 120);
}

TEST_CASE("non-minimal leb encodings parse but re-encode minimally")
{
    // Hand-encode const-7 with a padded LEB for the constant.
    Bytes mod{0x00, 0x61, 0x73, 0x6D, 0x01, 0x00, 0x00, 0x00};
    const Bytes type_sec{0x01, 0x05, 0x01, 0x60, 0x00, 0x01, 0x7F};
    mod.insert(mod.end(), type_sec.begin(), type_sec.end());
    const Bytes func_sec{0x03, 0x02, 0x01, 0x00};
    mod.insert(mod.end(), func_sec.begin(), func_sec.end());
    // body: i32.const 7 (padded: 0x87 0x80 0x00), end
    const Bytes code_sec{0x0A, 0x08, 0x01, 0x06, 0x00, 0x41, 0x87, 0x80, 0x00, 0x0B};
    mod.insert(mod.end(), code_sec.begin(), code_sec.end());

    const Module m = parse_module(mod);
    REQUIRE(m.functions.size() == 1);
    CHECK(m.functions[0].body[0].imm0 == 7);

    const Bytes canonical = encode_module(m);
    CHECK(canonical.size() < mod.size());
    CHECK(parse_module(canonical) == m);
}
