#pragma once

// Test-only oracle: a straight-line reimplementation of the round process
// with plain containers, written independently of RefSim/QuestionContext.
// It shares only the tape (the realized randomness) and the Params record.

#include <map>
#include <set>
#include <vector>

#include "mislca/graph.hpp"
#include "mislca/local_ref.hpp"
#include "mislca/params.hpp"
#include "mislca/tape.hpp"

namespace naive {

using namespace mislca;

struct NaiveTrace {
  std::vector<std::vector<NodeRoundState>> state;  // [v][t], t in [1, T]
  std::vector<i32> joined_at, dead_from;
};

inline NaiveTrace run_naive(const Graph& g, const Params& p) {
  const u32 n = g.n();
  const u32 T = p.T;
  const u32 B = p.bits;
  const u32 e1 = p.initial_exponent();

  auto rl = [&](u32 v, u32 t) { return rho_level(p, v, t); };

  struct Node {
    std::vector<u32> nbrs;
    std::map<u32, std::set<u32>> N;  // round -> relevant neighbors
    std::set<u32> sleep_rounds;
    std::vector<u32> e;  // e[t] = exponent during round t
    i32 joined = -1, dead = -1;
    u32 lp = 0;
  };
  std::vector<Node> nodes(n);

  // Initialization: relevant sets from the tape, then per-target sleeping
  // intervals, each target judged on its own.
  for (u32 v = 0; v < n; ++v) {
    Node& nd = nodes[v];
    for (u32 i = 0; i < g.degree(v); ++i) nd.nbrs.push_back(g.neighbor(v, i));
    nd.e.assign(T + 2, 0);
    nd.e[1] = e1;
    for (u32 t = 1; t <= T; ++t) {
      std::set<u32> s;
      for (u32 u : nd.nbrs) {
        // rho_t(u) <= p1 * 2^(t-1)
        u64 bound = u64(B) - e1 + (t - 1);
        if (rl(u, t) <= std::min<u64>(bound, B)) s.insert(u);
      }
      nd.N[t] = s;
    }
    for (u32 t = 1; t <= T; ++t) {
      u64 cnt = nd.N[t].size();
      if (cnt > sleep_threshold(p, t - 1)) {
        u32 z = 0;
        while (cnt > sleep_threshold(p, t + z)) ++z;
        for (u32 r = t; r <= std::min(t + z, T); ++r) nd.sleep_rounds.insert(r);
      }
    }
  }

  NaiveTrace tr;
  tr.state.assign(n, std::vector<NodeRoundState>(T + 1));

  std::vector<std::set<u32>> joined_in_round(T + 1);

  auto participating = [&](u32 u, u32 r) {
    const Node& nd = nodes[u];
    if (nd.joined >= 0 && u32(nd.joined) < r) return false;
    if (nd.dead >= 0 && u32(nd.dead) <= r) return false;
    return true;
  };

  std::vector<u8> marked_now(n, 0);

  for (u32 t = 1; t <= T; ++t) {
    // Entry: sleeping flag, join consumption, marking.
    for (u32 v = 0; v < n; ++v) {
      Node& nd = nodes[v];
      marked_now[v] = 0;
      if (!participating(v, t)) continue;
      bool sleeping = nd.sleep_rounds.count(t) != 0;
      bool awake_prev = t >= 2 && nd.sleep_rounds.count(t - 1) == 0;
      bool dies = false;
      if (awake_prev) {
        for (u32 u : nd.N[t - 1])
          if (joined_in_round[t - 1].count(u)) dies = true;
        nd.lp = t - 1;
      } else if (!sleeping) {
        for (u32 r = nd.lp + 1; r <= t - 1; ++r)
          for (u32 u : nd.N[r])
            if (joined_in_round[r].count(u)) dies = true;
        nd.lp = t - 1;
      }
      if (dies) {
        nd.dead = i32(t);
        continue;
      }
      if (rl(v, t) <= B - nd.e[t]) marked_now[v] = 1;
    }

    // Body: refinement, then halve-while-sleeping or the marking resolution.
    for (u32 v = 0; v < n; ++v) {
      Node& nd = nodes[v];
      if (!participating(v, t)) continue;
      bool sleeping = nd.sleep_rounds.count(t) != 0;

      for (u32 tpp = t; tpp <= T; ++tpp) {
        if (nd.sleep_rounds.count(tpp)) continue;
        u32 gsz = tpp - t;
        i64 lo = std::max<i64>(1, i64(t) - 2 * i64(gsz));
        i64 hi = i64(t) - i64(gsz) - 1;
        bool declared = false;
        for (i64 r = lo; r <= hi && !declared; ++r) {
          std::set<u32> kept;
          for (u32 u : nd.N[tpp]) {
            if (!participating(u, u32(r))) continue;
            i64 bound = i64(B) - i64(nodes[u].e[r]) + (i64(tpp) - r);
            if (rl(u, tpp) <= std::min<i64>(bound, B)) kept.insert(u);
          }
          nd.N[tpp] = kept;
          if (kept.size() > sleep_threshold(p, tpp - u32(r))) {
            for (u32 s = tpp; s <= std::min<u32>(tpp + (tpp - u32(r)), T); ++s)
              nd.sleep_rounds.insert(s);
            declared = true;
          }
        }
      }

      NodeRoundState& st = tr.state[v][t];
      st.exponent = nd.e[t];
      st.marked = marked_now[v] != 0;
      st.sleeping = sleeping;
      if (sleeping) {
        nd.e[t + 1] = nd.e[t] + 1;
        st.move = Move::sleep_halve;
        continue;
      }
      bool blocked = false;
      for (u32 u : nd.N[t])
        if (marked_now[u]) blocked = true;
      if (marked_now[v] && !blocked) {
        nd.joined = i32(t);
        joined_in_round[t].insert(v);
        nd.e[t + 1] = nd.e[t];
        st.move = Move::join;
      } else if (blocked) {
        nd.e[t + 1] = nd.e[t] + 1;
        st.move = Move::halve;
      } else {
        nd.e[t + 1] = std::max<u32>(1, nd.e[t] - 1);
        st.move = Move::grow;
      }
      nd.lp = t;
    }

    // Fill trace rows for nodes that skipped the round (frozen exponent).
    for (u32 v = 0; v < n; ++v) {
      Node& nd = nodes[v];
      NodeRoundState& st = tr.state[v][t];
      if (!participating(v, t) || nd.dead == i32(t)) {
        nd.e[t + 1] = nd.e[t];
        st.exponent = nd.e[t];
        st.marked = false;
        st.sleeping = false;
        st.move = Move::none;
      }
      st.dead = nd.dead >= 0 && u32(nd.dead) <= t;
      st.joined = nd.joined >= 0 && u32(nd.joined) <= t;
    }
  }

  tr.joined_at.resize(n);
  tr.dead_from.resize(n);
  for (u32 v = 0; v < n; ++v) {
    tr.joined_at[v] = nodes[v].joined;
    tr.dead_from[v] = nodes[v].dead;
  }
  return tr;
}

}  // namespace naive
