// tcpa: trusted and confidential program analysis toolkit
// Copyright 2026 The tcpa Authors.
// SPDX-License-Identifier: Apache-2.0

#include <tcpa/symexec/graph.hpp>
#include <tcpa/symexec/symexec.hpp>

#include <deque>

namespace tcpa::symexec
{

const char* edge_kind_name(EdgeKind k) noexcept
{
    return k == EdgeKind::data_flow ? "data_flow" : "control_flow";
}

std::string local_vertex(uint32_t func_index, uint32_t local_index)
{
    return "local:" + std::to_string(func_index) + ":" + std::to_string(local_index);
}

std::string global_vertex(uint32_t global_index)
{
    return "global:" + std::to_string(global_index);
}

std::string memory_vertex(uint32_t address)
{
    return "mem:" + std::to_string(address);
}

std::string branch_vertex(uint32_t func_index, uint32_t instr_index)
{
    return "branch:" + std::to_string(func_index) + ":" + std::to_string(instr_index);
}

void SemanticGraph::add_vertex(const std::string& v)
{
    m_vertices.insert(v);
}

void SemanticGraph::add_edge(const std::string& from, const std::string& to, EdgeKind kind)
{
    m_vertices.insert(from);
    m_vertices.insert(to);
    m_edges.insert({from, to, kind});
}

bool SemanticGraph::has_vertex(const std::string& v) const
{
    return m_vertices.count(v) != 0;
}

std::set<Dependency> dependencies_of(const SemanticGraph& g, const std::string& v)
{
    if (!g.has_vertex(v))
        throw SymexecError{SymexecError::Kind::UnknownVertex,
            "no vertex named '" + v + "' in the semantic graph"};

    // Walk edges backwards from v. A dependency is data_flow when at least
    // one all-data path reaches it, control_flow otherwise, so a vertex can
    // upgrade from control to data if a pure data path is found later.
    std::map<std::string, EdgeKind> best;
    std::deque<std::pair<std::string, EdgeKind>> work;
    work.push_back({v, EdgeKind::data_flow});
    std::map<std::string, EdgeKind> seen;  // vertex -> best kind processed
    seen[v] = EdgeKind::data_flow;

    while (!work.empty())
    {
        auto [cur, kind_so_far] = work.front();
        work.pop_front();
        for (const GraphEdge& e : g.edges())
        {
            if (e.to != cur)
                continue;
            const EdgeKind kind = (kind_so_far == EdgeKind::control_flow ||
                                      e.kind == EdgeKind::control_flow) ?
                EdgeKind::control_flow :
                EdgeKind::data_flow;
            auto it = best.find(e.from);
            if (it == best.end() || (it->second == EdgeKind::control_flow &&
                                        kind == EdgeKind::data_flow))
                best[e.from] = kind;
            auto sit = seen.find(e.from);
            if (sit == seen.end() || (sit->second == EdgeKind::control_flow &&
                                         kind == EdgeKind::data_flow))
            {
                seen[e.from] = kind;
                work.push_back({e.from, kind});
            }
        }
    }

    std::set<Dependency> out;
    for (const auto& [vertex, kind] : best)
        if (vertex != v)
            out.insert({vertex, kind});
    return out;
}

}  // namespace tcpa::symexec
