// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <tcpa/interp.hpp>
#include <tcpa/solver/solve.hpp>
#include <tcpa/symexec/graph.hpp>
#include <tcpa/symexec/props.hpp>
#include <tcpa/symexec/report.hpp>
#include <tcpa/wasm/module.hpp>
#include <tcpa/wasm/source_map.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcpa::symexec
{

struct SymexecError : std::runtime_error
{
    enum class Kind
    {
        UnknownTarget,    // property targets a missing export
        SubsetViolation,  // instruction outside the supported subset reached
        UnknownVertex,    // dependency query for a vertex not in the graph
    };

    SymexecError(Kind k, const std::string& msg) : std::runtime_error{msg}, kind{k} {}

    Kind kind;
};

/// A symbolic value on the operand stack: the expression plus the set of
/// graph vertices its defining computation read.
struct SymVal
{
    solver::ExprRef expr;
    std::set<std::string> taint;
};

/// Branch guard active for a control region: control_flow edges are drawn
/// from `vertex` to every variable assigned while the guard is live. The
/// guard dies when the frame's control stack shrinks below `depth`.
struct Guard
{
    std::string vertex;
    uint32_t depth = 0;  // minimum ctrl stack size keeping the guard alive
};

/// Mirror of the interpreter's label stack entry.
struct CtrlEntry
{
    uint32_t instr = 0;  // index of the block/loop/if instruction
    size_t height = 0;   // operand stack height at entry
    uint8_t arity = 0;   // values carried by a branch out of this label
    bool is_loop = false;
};

struct Frame
{
    uint32_t func_index = wasm::NO_FUNC;
    uint32_t ip = 0;
    size_t base = 0;  // operand stack height at function entry
    std::vector<solver::ExprRef> locals;
    std::vector<CtrlEntry> ctrl;
    std::vector<Guard> guards;
    std::map<uint32_t, uint32_t> unroll;  // loop instr index -> re-entries
};

/// Per-module mutable state: byte-granular symbolic memory plus globals.
struct ModuleState
{
    std::map<uint32_t, solver::ExprRef> memory;  // address -> byte expr
    std::vector<solver::ExprRef> globals;
};

struct Pc
{
    uint32_t func = wasm::NO_FUNC;
    uint32_t instr = 0;

    bool operator==(const Pc&) const = default;
};

struct SourceLoc
{
    uint32_t line = 0;
    uint32_t col = 0;

    bool operator==(const SourceLoc&) const = default;
};

struct TrapSite
{
    interp::TrapReason reason = interp::TrapReason::unreachable;
    uint32_t func_index = 0;
    uint32_t instr_index = 0;
    uint32_t byte_offset = 0;
};

struct Configuration
{
    enum class Status
    {
        running,
        returned,
        trapped,
        aborted,  // path abandoned; contributes an unknown, never a verdict
    };

    Pc pc;
    SourceLoc src;  // kept equal to the source map's view of pc
    std::vector<Frame> k_f;
    std::vector<SymVal> k_o;
    std::vector<ModuleState> module_states;
    solver::PathCondition path_condition;
    SemanticGraph graph;

    Status status = Status::running;
    std::optional<TrapSite> trap;   // set when status == trapped
    std::vector<SymVal> results;    // set when status == returned
    std::string abort_reason;       // set when status == aborted
    uint64_t steps = 0;
};

struct Analysis
{
    // Templates the entry configuration is seeded from; live state lives
    // in Configuration instances.
    std::vector<Frame> call_stack_template;
    std::vector<SymVal> operand_stack_template;

    std::vector<wasm::Module> modules;
    wasm::SourceMap src_map;
    std::string spec_version;
    PropertySet props;
};

/// Identifier of the implemented semantics revision.
inline constexpr const char* SPEC_VERSION = "wasm-core-1-int";

struct ExploreBounds
{
    uint64_t max_paths = 256;
    uint64_t max_depth = 65536;  // instructions executed per path
    uint32_t loop_unroll = 8;    // re-entries per loop instruction per path
    solver::CheckBudget per_path_solver_budget;
};

/// Builds the analysis over one module. Every property target must exist
/// among the module's exports (throws SymexecError{UnknownTarget}); a
/// non-empty source map must cover the module's instructions.
Analysis init_analysis(const wasm::Module& m, const wasm::SourceMap& map,
    const PropertySet& props);

/// Entry configuration for a function: empty stacks, fresh argument
/// symbols a0..aN-1, zeroed non-parameter locals, init-valued globals,
/// zeroed memory.
Configuration entry_configuration(const Analysis& a, uint32_t func_index);

/// One symbolic transition. Returns the successor configurations in
/// deterministic order (fall-through/not-taken before taken, concretized
/// values ascending, trap successors last); successors whose extended
/// path condition simplifies to constant false are dropped. Terminal
/// configurations yield no successors. The budget limits solver work for
/// address and callee concretization.
std::vector<Configuration> step(const Analysis& a, const Configuration& c,
    const solver::CheckBudget& budget = {});

/// Bounded depth-first exploration of every property target; outcomes are
/// valid only when exploration was exhaustive and free of unknowns.
AnalysisReport explore(const Analysis& a, const ExploreBounds& bounds = {});

}  // namespace tcpa::symexec
