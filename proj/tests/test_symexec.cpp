// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/interp.hpp>
#include <tcpa/solver/solve.hpp>
#include <tcpa/symexec/symexec.hpp>
#include <tcpa/wasm/assembler.hpp>
#include <tcpa/wasm/parser.hpp>

#include "support/wat_gen.hpp"

#include <doctest.h>

#include <array>

using namespace tcpa;
using namespace tcpa::symexec;

namespace
{
constexpr uint64_t FUEL = 1 << 22;

Analysis analyze(std::string_view source, PropertySet props)
{
    const wasm::AssembledModule am = wasm::assemble_text(source);
    return init_analysis(wasm::parse_module(am.bytes), am.map, std::move(props));
}

PropertySet standard_props()
{
    PropertySet ps;
    ps.properties.push_back({"assert-ok", PropertyKind::assertion_unreachable, "f"});
    ps.properties.push_back({"trap-free", PropertyKind::no_trap, "f"});
    return ps;
}

const PropertyOutcome& outcome_of(const AnalysisReport& r, const std::string& id)
{
    for (const PropertyOutcome& po : r.property_outcomes)
        if (po.id == id)
            return po;
    FAIL("no outcome for property ", id);
    static PropertyOutcome dummy;
    return dummy;
}

/// Steps a configuration along a branch-free suffix until it leaves the
/// running state, requiring a single successor at each step.
Configuration run_linear(const Analysis& a, Configuration c)
{
    while (c.status == Configuration::Status::running)
    {
        std::vector<Configuration> succ = step(a, c);
        REQUIRE(succ.size() == 1);
        c = std::move(succ.front());
    }
    return c;
}

std::vector<interp::Value> args_from_model(const wasm::Module& m, uint32_t func,
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

}  // namespace

TEST_CASE("constant true assertion is valid")
{
    const Analysis a = analyze(R"((module
      (import "env" "tcpa_assert" (func $assert (param i32)))
      (func (export "f")
        i32.const 1
        call $assert
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    CHECK(outcome_of(r, "assert-ok").outcome == Outcome::valid);
    CHECK(outcome_of(r, "trap-free").outcome == Outcome::valid);
    CHECK(r.stats.paths == 1);
    CHECK(r.stats.unknown_paths == 0);
    CHECK_FALSE(r.eo);
}

TEST_CASE("violated assertion carries a replaying witness")
{
    const Analysis a = analyze(R"((module
      (import "env" "tcpa_assert" (func $assert (param i32)))
      (func (export "f") (param $x i32)
        local.get $x
        i32.const 5
        i32.gt_s
        if
          i32.const 0
          call $assert
        end
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    const PropertyOutcome& po = outcome_of(r, "assert-ok");
    REQUIRE(po.outcome == Outcome::violated);
    REQUIRE(po.witness.has_value());

    const auto x = static_cast<int32_t>(po.witness->model.at("a0"));
    CHECK(x > 5);
    CHECK(po.witness->line > 0);

    const wasm::Module& m = a.modules.front();
    const interp::TraceResult rr = interp::run_concrete(m, "f",
        args_from_model(m, m.find_export("f")->func_index, po.witness->model), FUEL);
    REQUIRE(rr.trapped());
    CHECK(rr.trap.reason == interp::TrapReason::assert_failed);

    CHECK(outcome_of(r, "trap-free").outcome == Outcome::violated);
}

TEST_CASE("symbolic br_if splits into disjoint fall-through and taken successors")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32)
        block $B
          local.get $x
          br_if $B
        end
      )
    ))",
        standard_props());
    Configuration c = entry_configuration(a, a.modules.front().find_export("f")->func_index);

    // block, then local.get: single successors.
    for (int i = 0; i < 2; ++i)
    {
        std::vector<Configuration> s = step(a, c);
        REQUIRE(s.size() == 1);
        c = std::move(s.front());
    }
    REQUIRE(c.pc.instr == 2);  // at br_if

    std::vector<Configuration> s = step(a, c);
    REQUIRE(s.size() == 2);

    // Fall-through first (condition zero), taken second.
    REQUIRE(s[0].path_condition.conjuncts.size() == 1);
    CHECK_FALSE(s[0].path_condition.conjuncts[0].expect_nonzero);
    CHECK(s[0].pc.instr == 3);
    REQUIRE(s[1].path_condition.conjuncts.size() == 1);
    CHECK(s[1].path_condition.conjuncts[0].expect_nonzero);
    CHECK(s[1].pc.instr == 4);

    // The same decision term in both, and the conjunction is infeasible.
    solver::PathCondition joint;
    joint.conjuncts = s[0].path_condition.conjuncts;
    joint.conjuncts.push_back(s[1].path_condition.conjuncts[0]);
    CHECK(solver::check_sat(joint).unsat());

    // Both record the decision vertex fed by the condition's sources.
    const std::string bv = branch_vertex(0, 2);
    for (const Configuration& n : s)
    {
        REQUIRE(n.graph.has_vertex(bv));
        CHECK(n.graph.edges().contains({local_vertex(0, 0), bv, EdgeKind::data_flow}));
    }
}

TEST_CASE("constant branch condition yields a single successor without conjuncts")
{
    const Analysis a = analyze(R"((module
      (func (export "f")
        block $B
          i32.const 0
          br_if $B
        end
      )
    ))",
        standard_props());
    Configuration c = entry_configuration(a, 0);
    for (int i = 0; i < 2; ++i)
        c = std::move(step(a, c).front());

    std::vector<Configuration> s = step(a, c);
    REQUIRE(s.size() == 1);
    CHECK(s[0].path_condition.conjuncts.empty());
    CHECK(s[0].pc.instr == 3);
    CHECK_FALSE(s[0].graph.has_vertex(branch_vertex(0, 2)));
}

TEST_CASE("stepping a constant pushes it onto the operand stack")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (result i32)
        i32.const 7
      )
    ))",
        standard_props());
    Configuration c = entry_configuration(a, 0);
    std::vector<Configuration> s = step(a, c);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].k_o.size() == 1);
    const solver::ExprRef e = s[0].k_o[0].expr;
    CHECK(e->kind == solver::Expr::Kind::constant);
    CHECK(e->value == 7);
    CHECK(e->width == 32);
    CHECK(s[0].k_o[0].taint.empty());
    CHECK(s[0].steps == 1);
}

TEST_CASE("a two-way branch completes exactly two paths")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32) (result i32)
        local.get $x
        if
          nop
        end
        i32.const 0
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    CHECK(r.stats.paths == 2);
    CHECK(r.stats.unknown_paths == 0);
    CHECK(outcome_of(r, "assert-ok").outcome == Outcome::valid);
    CHECK(outcome_of(r, "trap-free").outcome == Outcome::valid);
}

TEST_CASE("select over a symbolic condition explores both choices")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32) (result i32)
        i32.const 7
        i32.const 9
        local.get $x
        select
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    CHECK(r.stats.paths == 2);
    CHECK(outcome_of(r, "trap-free").outcome == Outcome::valid);
}

TEST_CASE("local assignment dependencies are data edges")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32) (result i32)
        (local $y i32)
        local.get $x
        local.set $y
        local.get $y
      )
    ))",
        standard_props());
    const Configuration done = run_linear(a, entry_configuration(a, 0));
    REQUIRE(done.status == Configuration::Status::returned);

    const std::set<Dependency> deps = dependencies_of(done.graph, local_vertex(0, 1));
    REQUIRE(deps.size() == 1);
    CHECK(deps.begin()->vertex == local_vertex(0, 0));
    CHECK(deps.begin()->kind == EdgeKind::data_flow);
}

TEST_CASE("assignment under a symbolic branch depends on the condition via control")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32)
        (local $y i32)
        local.get $x
        if
          i32.const 1
          local.set $y
        end
      )
    ))",
        standard_props());
    Configuration c = entry_configuration(a, 0);
    c = std::move(step(a, c).front());  // local.get
    std::vector<Configuration> s = step(a, c);  // if: [zero, nonzero]
    REQUIRE(s.size() == 2);
    const Configuration done = run_linear(a, std::move(s[1]));
    REQUIRE(done.status == Configuration::Status::returned);

    const std::set<Dependency> deps = dependencies_of(done.graph, local_vertex(0, 1));
    bool via_control = false;
    for (const Dependency& d : deps)
        if (d.vertex == local_vertex(0, 0) && d.kind == EdgeKind::control_flow)
            via_control = true;
    CHECK(via_control);
    CHECK(deps.contains({branch_vertex(0, 1), EdgeKind::control_flow}));
}

TEST_CASE("an unassigned global resolves to an empty dependency set")
{
    const Analysis a = analyze(R"((module
      (global $g (mut i32) (i32.const 5))
      (func (export "f") (result i32)
        i32.const 0
      )
    ))",
        standard_props());
    const Configuration c = entry_configuration(a, 0);
    CHECK(dependencies_of(c.graph, global_vertex(0)).empty());
}

TEST_CASE("unknown vertices are rejected")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (result i32)
        i32.const 0
      )
    ))",
        standard_props());
    const Configuration c = entry_configuration(a, 0);
    CHECK_THROWS_WITH_AS(static_cast<void>(dependencies_of(c.graph, "local:9:9")),
        doctest::Contains("local:9:9"), SymexecError);
    try
    {
        static_cast<void>(dependencies_of(c.graph, "nope"));
        FAIL("expected SymexecError");
    }
    catch (const SymexecError& e)
    {
        CHECK(e.kind == SymexecError::Kind::UnknownVertex);
    }
}

TEST_CASE("properties targeting missing exports are rejected")
{
    PropertySet ps;
    ps.properties.push_back({"p", PropertyKind::no_trap, "missing"});
    try
    {
        const Analysis a = analyze(R"((module
          (func (export "f") (result i32)
            i32.const 0
          )
        ))",
            ps);
        FAIL("expected SymexecError");
    }
    catch (const SymexecError& e)
    {
        CHECK(e.kind == SymexecError::Kind::UnknownTarget);
    }

    PropertySet dup;
    dup.properties.push_back({"p", PropertyKind::no_trap, std::nullopt});
    dup.properties.push_back({"p", PropertyKind::assertion_unreachable, std::nullopt});
    CHECK_THROWS_AS(static_cast<void>(analyze(R"((module
      (func (export "f") (result i32)
        i32.const 0
      )
    ))",
                        dup)),
        std::invalid_argument);
}

TEST_CASE("division by zero violates no_trap but not assertion_unreachable")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32) (result i32)
        i32.const 10
        local.get $x
        i32.div_u
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    CHECK(outcome_of(r, "assert-ok").outcome == Outcome::valid);
    const PropertyOutcome& po = outcome_of(r, "trap-free");
    REQUIRE(po.outcome == Outcome::violated);
    REQUIRE(po.witness.has_value());
    CHECK(po.witness->model.at("a0") == 0);
    CHECK(r.stats.paths == 2);
}

TEST_CASE("signed division overflow is found with a replaying witness")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32) (result i32)
        local.get $x
        i32.const -1
        i32.div_s
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    const PropertyOutcome& po = outcome_of(r, "trap-free");
    REQUIRE(po.outcome == Outcome::violated);
    REQUIRE(po.witness.has_value());
    CHECK(po.witness->model.at("a0") == 0x80000000u);

    const wasm::Module& m = a.modules.front();
    const interp::TraceResult rr = interp::run_concrete(m, "f",
        std::array{interp::Value::i32(0x80000000u)}, FUEL);
    REQUIRE(rr.trapped());
    CHECK(rr.trap.reason == interp::TrapReason::integer_overflow);
}

TEST_CASE("br_table over a symbolic selector resolves each case")
{
    const Analysis a = analyze(R"((module
      (import "env" "tcpa_assert" (func $assert (param i32)))
      (func (export "f") (param $x i32)
        block $B2
          block $B1
            block $B0
              local.get $x
              br_table 0 1 $B2
            end
            i32.const 0
            call $assert
          end
        end
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    const PropertyOutcome& po = outcome_of(r, "assert-ok");
    REQUIRE(po.outcome == Outcome::violated);
    REQUIRE(po.witness.has_value());
    // Only selector zero reaches the assertion.
    CHECK(po.witness->model.at("a0") == 0);
}

TEST_CASE("call arguments flow into callee parameter locals")
{
    const Analysis a = analyze(R"((module
      (func $h (param $a i32) (result i32)
        local.get $a
      )
      (func (export "f") (param $x i32) (result i32)
        local.get $x
        call $h
      )
    ))",
        standard_props());
    const Configuration done = run_linear(a, entry_configuration(a, 1));
    REQUIRE(done.status == Configuration::Status::returned);
    REQUIRE(done.results.size() == 1);

    const std::set<Dependency> deps = dependencies_of(done.graph, local_vertex(0, 0));
    REQUIRE(deps.size() == 1);
    CHECK(deps.begin()->vertex == local_vertex(1, 0));
    CHECK(deps.begin()->kind == EdgeKind::data_flow);

    const auto v =
        solver::eval_expr(done.results[0].expr, {{"a0", 0x1234}});
    REQUIRE(v.has_value());
    CHECK(*v == 0x1234);
}

TEST_CASE("memory stores and loads reassemble byte cells")
{
    const Analysis a = analyze(R"((module
      (memory 1)
      (func (export "f") (param $x i32) (result i32)
        i32.const 16
        local.get $x
        i32.store
        i32.const 16
        i32.load
      )
    ))",
        standard_props());
    const Configuration done = run_linear(a, entry_configuration(a, 0));
    REQUIRE(done.status == Configuration::Status::returned);
    REQUIRE(done.results.size() == 1);

    const auto v = solver::eval_expr(done.results[0].expr, {{"a0", 0xAABBCCDDu}});
    REQUIRE(v.has_value());
    CHECK(*v == 0xAABBCCDDu);

    const std::set<Dependency> deps = dependencies_of(done.graph, memory_vertex(16));
    CHECK(deps.contains({local_vertex(0, 0), EdgeKind::data_flow}));
}

TEST_CASE("out of bounds stores trap with a witness")
{
    const Analysis a = analyze(R"((module
      (memory 1)
      (func (export "f")
        i32.const 65534
        i32.const 1
        i32.store
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    const PropertyOutcome& po = outcome_of(r, "trap-free");
    REQUIRE(po.outcome == Outcome::violated);
    CHECK(outcome_of(r, "assert-ok").outcome == Outcome::valid);
}

TEST_CASE("loops beyond the unroll bound become unknown")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32) (result i32)
        (local $i i32)
        loop $L
          local.get $i
          i32.const 1
          i32.add
          local.set $i
          local.get $i
          local.get $x
          i32.lt_u
          br_if $L
        end
        local.get $i
      )
    ))",
        standard_props());
    const AnalysisReport r = explore(a);
    CHECK(outcome_of(r, "assert-ok").outcome == Outcome::unknown);
    CHECK(outcome_of(r, "trap-free").outcome == Outcome::unknown);
    CHECK(r.stats.unknown_paths > 0);
    CHECK(r.stats.unknown_reasons.contains("unroll"));
}

TEST_CASE("unroll bounds separate terminating loops from truncated ones")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (result i32)
        (local $i i32)
        loop $L
          local.get $i
          i32.const 1
          i32.add
          local.set $i
          local.get $i
          i32.const 6
          i32.lt_u
          br_if $L
        end
        local.get $i
      )
    ))",
        standard_props());

    ExploreBounds tight;
    tight.loop_unroll = 4;
    CHECK(outcome_of(explore(a, tight), "trap-free").outcome == Outcome::unknown);

    ExploreBounds enough;
    enough.loop_unroll = 5;
    const AnalysisReport r = explore(a, enough);
    CHECK(outcome_of(r, "trap-free").outcome == Outcome::valid);
    CHECK(r.stats.paths == 1);
}

TEST_CASE("exhausting the path budget degrades the verdict to unknown")
{
    const Analysis a = analyze(R"((module
      (func (export "f") (param $x i32) (result i32)
        local.get $x
        if
          nop
        end
        i32.const 0
      )
    ))",
        standard_props());
    ExploreBounds bounds;
    bounds.max_paths = 1;
    const AnalysisReport r = explore(a, bounds);
    CHECK(outcome_of(r, "assert-ok").outcome == Outcome::unknown);
    CHECK(outcome_of(r, "trap-free").outcome == Outcome::unknown);
}

TEST_CASE("reports round trip through text and binary forms")
{
    const Analysis a = analyze(R"((module
      (import "env" "tcpa_assert" (func $assert (param i32)))
      (func (export "f") (param $x i32)
        local.get $x
        call $assert
      )
    ))",
        standard_props());
    const AnalysisReport r1 = explore(a);
    const AnalysisReport r2 = explore(a);
    CHECK(report_equal(r1, r2));

    const Bytes encoded = encode_report(r1);
    const AnalysisReport back = decode_report(encoded);
    CHECK(report_equal(r1, back));
    CHECK(serialize_report(r1) == serialize_report(back));

    Bytes bad = encoded;
    bad[0] ^= 0xFF;
    CHECK_THROWS_AS(static_cast<void>(decode_report(bad)), ReportError);
}

TEST_CASE("explored verdicts agree with exhaustive concrete enumeration")
{
    // Generated entry points mask their parameters to eight bits, so
    // running every argument tuple is an exact ground truth for both
    // property kinds.
    ExploreBounds bounds;
    bounds.max_paths = 4096;
    bounds.max_depth = 400000;
    bounds.loop_unroll = 256;

    int decided_assert = 0;
    int decided_trap = 0;
    int programs = 0;

    for (uint64_t seed = 1; seed <= 34 && programs < 26; ++seed)
    {
        const watgen::Generated g = watgen::generate(seed, watgen::Profile::oracle);
        const wasm::AssembledModule am = wasm::assemble_text(g.source);
        const wasm::Module m = wasm::parse_module(am.bytes);
        ++programs;

        const Analysis a = init_analysis(m, am.map, standard_props());
        const AnalysisReport r = explore(a, bounds);

        // Ground truth by brute force over the masked domain.
        bool any_assert = false;
        bool any_trap = false;
        const uint64_t domain = g.entry_params == 1 ? 256 : 256 * 256;
        for (uint64_t t = 0; t < domain; ++t)
        {
            std::vector<interp::Value> args;
            args.push_back(interp::Value::i32(static_cast<uint32_t>(t & 0xFF)));
            if (g.entry_params == 2)
                args.push_back(interp::Value::i32(static_cast<uint32_t>(t >> 8)));
            const interp::TraceResult rr = interp::run_concrete(m, "f", args, FUEL);
            REQUIRE(rr.status != interp::TraceResult::Status::out_of_fuel);
            if (rr.trapped())
            {
                any_trap = true;
                any_assert |= rr.trap.reason == interp::TrapReason::assert_failed;
            }
            if (any_assert)
                break;  // both flags settled
        }

        const PropertyOutcome& pa = outcome_of(r, "assert-ok");
        if (pa.outcome != Outcome::unknown)
        {
            ++decided_assert;
            CHECK_MESSAGE((pa.outcome == Outcome::violated) == any_assert,
                "assert verdict diverges for seed ", seed);
            if (pa.outcome == Outcome::violated)
            {
                REQUIRE(pa.witness.has_value());
                const interp::TraceResult rr = interp::run_concrete(m, "f",
                    args_from_model(m, m.find_export("f")->func_index,
                        pa.witness->model),
                    FUEL);
                REQUIRE(rr.trapped());
                CHECK(rr.trap.reason == interp::TrapReason::assert_failed);
            }
        }
        const PropertyOutcome& pt = outcome_of(r, "trap-free");
        if (pt.outcome != Outcome::unknown)
        {
            ++decided_trap;
            CHECK_MESSAGE((pt.outcome == Outcome::violated) == any_trap,
                "trap verdict diverges for seed ", seed);
            if (pt.outcome == Outcome::violated)
            {
                REQUIRE(pt.witness.has_value());
                const interp::TraceResult rr = interp::run_concrete(m, "f",
                    args_from_model(m, m.find_export("f")->func_index,
                        pt.witness->model),
                    FUEL);
                CHECK(rr.trapped());
            }
        }
    }

    // The suite only means something if most programs are decidable.
    CHECK(decided_assert >= 20);
    CHECK(decided_trap >= 20);
}
