// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <string>

namespace tcpa::symexec
{

/// Dependency edge labels: data_flow when the defining computation of the
/// target reads the source, control_flow when the target was assigned
/// inside a region guarded by the source branch decision.
enum class EdgeKind : uint8_t
{
    data_flow = 0,
    control_flow = 1,
};

const char* edge_kind_name(EdgeKind k) noexcept;

/// Vertex ids are structured strings; the helpers below build them.
std::string local_vertex(uint32_t func_index, uint32_t local_index);
std::string global_vertex(uint32_t global_index);
std::string memory_vertex(uint32_t address);
std::string branch_vertex(uint32_t func_index, uint32_t instr_index);

struct GraphEdge
{
    std::string from;
    std::string to;
    EdgeKind kind;

    auto operator<=>(const GraphEdge&) const = default;
};

/// A vertex together with the strongest kind of path that reaches it:
/// data_flow when some all-data path exists, control_flow otherwise.
struct Dependency
{
    std::string vertex;
    EdgeKind kind;

    auto operator<=>(const Dependency&) const = default;
};

class SemanticGraph
{
public:
    void add_vertex(const std::string& v);
    void add_edge(const std::string& from, const std::string& to, EdgeKind kind);

    bool has_vertex(const std::string& v) const;
    const std::set<std::string>& vertices() const { return m_vertices; }
    const std::set<GraphEdge>& edges() const { return m_edges; }

    bool operator==(const SemanticGraph&) const = default;

private:
    std::set<std::string> m_vertices;
    std::set<GraphEdge> m_edges;
};

/// Transitive closure of everything v depends on, over both edge kinds.
/// Throws SymexecError{UnknownVertex} when v is not in the graph.
std::set<Dependency> dependencies_of(const SemanticGraph& g, const std::string& v);

}  // namespace tcpa::symexec
