#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mislca/common.hpp"
#include "mislca/graph.hpp"

namespace mislca {

struct MisVerdict {
  bool pass = true;
  std::string reason;       // empty on pass
  u32 witness_u = kAbsent;  // offending edge (u,v) or unreachable vertex u
  u32 witness_v = kAbsent;

  static MisVerdict fail_edge(u32 u, u32 v) {
    return {false, "independence violated", u, v};
  }
  static MisVerdict fail_vertex(u32 u) {
    return {false, "maximality violated", u, kAbsent};
  }
};

// Pass iff membership is independent (no edge inside) and maximal (every
// outside vertex has a member neighbor).
inline MisVerdict verify_mis(const Graph& g, const std::vector<u8>& membership) {
  if (membership.size() != g.n()) throw input_error("verify_mis: membership size mismatch");
  for (u32 v = 0; v < g.n(); ++v) {
    bool covered = membership[v] != 0;
    for (u32 i = 0; i < g.degree(v); ++i) {
      u32 u = g.neighbor(v, i);
      if (membership[v] && membership[u]) return MisVerdict::fail_edge(std::min(u, v), std::max(u, v));
      if (membership[u]) covered = true;
    }
    if (!covered) return MisVerdict::fail_vertex(v);
  }
  return {};
}

// Partial verification over a certified region: every decided vertex must be
// independent of decided neighbors, and every decided-out vertex must have a
// decided-in neighbor. Undecided vertices are ignored.
inline MisVerdict verify_mis_region(const Graph& g,
                                    const std::unordered_map<u32, bool>& decided) {
  for (auto [v, in] : decided) {
    bool covered = in;
    for (u32 i = 0; i < g.degree(v); ++i) {
      u32 u = g.neighbor(v, i);
      auto it = decided.find(u);
      if (it == decided.end()) continue;
      if (in && it->second) return MisVerdict::fail_edge(std::min(u, v), std::max(u, v));
      if (it->second) covered = true;
    }
    if (!covered) return MisVerdict::fail_vertex(v);
  }
  return {};
}

}  // namespace mislca
