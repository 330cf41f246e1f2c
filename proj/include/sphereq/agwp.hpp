#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphereq/equations.hpp"

namespace sphereq {

// ---------------------------------------------------------------------------
// Acyclic-graph word problem: is there an oriented alpha -> omega path whose
// edge labels multiply to the identity?

struct AgwpEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  GroupElement label;
  std::string tag;  // optional annotation, carried through untouched
};

struct AgwpInstance {
  GroupParams params;
  std::size_t vertex_count = 0;
  std::vector<AgwpEdge> edges;
  std::size_t alpha = 0;  // start vertex
  std::size_t omega = 0;  // end vertex
};

/// Kahn topological sort (FIFO tie-break, so the order is deterministic).
/// Also validates edge endpoints and label parameters.
inline std::vector<std::size_t> validate_dag(const AgwpInstance& inst) {
  if (inst.alpha >= inst.vertex_count || inst.omega >= inst.vertex_count)
    throw DanglingVertex("marked vertex outside the vertex range");
  std::vector<std::size_t> indegree(inst.vertex_count, 0);
  for (const auto& e : inst.edges) {
    if (e.from >= inst.vertex_count || e.to >= inst.vertex_count)
      throw DanglingVertex("edge endpoint outside the vertex range");
    if (e.label.params != inst.params) throw ParamMismatch("edge label under different parameters");
    ++indegree[e.to];
  }
  std::vector<std::vector<std::size_t>> successors(inst.vertex_count);
  for (const auto& e : inst.edges) successors[e.from].push_back(e.to);
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < inst.vertex_count; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::vector<std::size_t> order;
  order.reserve(inst.vertex_count);
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (std::size_t w : successors[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != inst.vertex_count) throw CycleDetected("graph has a directed cycle");
  return order;
}

struct AgwpReport {
  Status status = Status::Unknown;
  std::optional<std::vector<std::size_t>> witness_edges;  // indices into edges, path order
  std::string note;
};

/// Dynamic program over the topological order: reachable(v) is the set of
/// label products of alpha -> v paths. Each (vertex, element) pair stores the
/// first (edge, prior element) that produced it, so witnesses are
/// deterministic. budget caps the total number of stored pairs.
inline AgwpReport agwp_solve(const AgwpInstance& inst, std::uint64_t budget) {
  const std::vector<std::size_t> order = validate_dag(inst);

  struct Incoming {
    std::size_t edge;        // edge index that produced this element
    GroupElement previous;   // element at the edge's source
    bool root = false;       // true for the seed at alpha
  };
  std::vector<std::map<GroupElement, Incoming>> reachable(inst.vertex_count);

  std::uint64_t stored = 0;
  const GroupElement one = identity(inst.params);
  reachable[inst.alpha].emplace(one, Incoming{0, one, true});
  if (++stored > budget)
    return AgwpReport{Status::Unknown, std::nullopt, "stored-state budget exceeded"};

  std::vector<std::vector<std::size_t>> out_edges(inst.vertex_count);
  for (std::size_t i = 0; i < inst.edges.size(); ++i) out_edges[inst.edges[i].from].push_back(i);

  for (std::size_t v : order) {
    for (std::size_t ei : out_edges[v]) {
      const AgwpEdge& e = inst.edges[ei];
      for (const auto& [h, _] : reachable[v]) {
        GroupElement next = multiply(h, e.label);
        auto [it, inserted] = reachable[e.to].emplace(std::move(next), Incoming{ei, h, false});
        if (inserted && ++stored > budget)
          return AgwpReport{Status::Unknown, std::nullopt, "stored-state budget exceeded"};
      }
    }
  }

  const auto hit = reachable[inst.omega].find(one);
  if (hit == reachable[inst.omega].end()) return AgwpReport{Status::Unsolvable, std::nullopt, ""};

  // Walk predecessor links back to the seed at alpha.
  std::vector<std::size_t> path;
  std::size_t v = inst.omega;
  GroupElement cur = one;
  while (true) {
    const Incoming& in = reachable[v].at(cur);
    if (in.root) break;
    path.push_back(in.edge);
    v = inst.edges[in.edge].from;
    cur = in.previous;
  }
  std::reverse(path.begin(), path.end());

  GroupElement product = one;
  for (std::size_t ei : path) product = multiply(product, inst.edges[ei].label);
  if (product != one) throw std::logic_error("witness path does not evaluate to the identity");
  return AgwpReport{Status::Solvable, std::move(path), ""};
}

}  // namespace sphereq
