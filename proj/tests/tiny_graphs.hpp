#pragma once

// Exhaustive labeled-graph enumeration for the small-instance oracle suites.

#include <utility>
#include <vector>

#include "mislca/graph.hpp"

namespace tiny {

using mislca::Graph;
using mislca::u32;
using mislca::u64;

inline std::vector<std::pair<u32, u32>> mask_edges(u32 n, u64 mask) {
  std::vector<std::pair<u32, u32>> edges;
  u32 bit = 0;
  for (u32 a = 0; a < n; ++a)
    for (u32 b = a + 1; b < n; ++b, ++bit)
      if ((mask >> bit) & 1) edges.emplace_back(a, b);
  return edges;
}

inline Graph graph_from_mask(u32 n, u64 mask) {
  return Graph::from_edges(n, mask_edges(n, mask));
}

inline bool connected(const Graph& g) {
  if (g.n() == 0) return true;
  std::vector<u32> stack{0};
  std::vector<bool> seen(g.n(), false);
  seen[0] = true;
  u32 cnt = 0;
  while (!stack.empty()) {
    u32 v = stack.back();
    stack.pop_back();
    ++cnt;
    for (u32 i = 0; i < g.degree(v); ++i) {
      u32 u = g.neighbor(v, i);
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return cnt == g.n();
}

inline u64 mask_count(u32 n) { return u64(1) << (n * (n - 1) / 2); }

// Visits every labeled graph on exactly n vertices; connected_only filters.
template <typename Fn>
void for_each_graph(u32 n, bool connected_only, Fn&& fn) {
  for (u64 mask = 0; mask < mask_count(n); ++mask) {
    Graph g = graph_from_mask(n, mask);
    if (connected_only && !connected(g)) continue;
    fn(g, mask);
  }
}

}  // namespace tiny
