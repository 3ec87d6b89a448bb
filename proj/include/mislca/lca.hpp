#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "mislca/common.hpp"
#include "mislca/graph.hpp"
#include "mislca/local_ref.hpp"
#include "mislca/oracle.hpp"
#include "mislca/params.hpp"
#include "mislca/rules.hpp"
#include "mislca/tape.hpp"

namespace mislca {

enum class Phase1 : u8 { in_i, dominated, residual };

struct Phase1Status {
  Phase1 kind = Phase1::residual;
  u32 by = kAbsent;  // a joined neighbor, when dominated

  bool operator==(const Phase1Status&) const = default;
};

struct Answer {
  bool in_mis = false;
  Phase1Status phase1;
  u64 probes_used = 0;
  u32 component_size = 0;  // 0 unless the question fell into the residual graph
};

// Residual component larger than the configured cap: statistically possible
// at small T multipliers; the harness records it instead of looping forever.
class component_cap_exceeded : public std::runtime_error {
 public:
  component_cap_exceeded(u32 vertex, u64 cap)
      : std::runtime_error("residual component of vertex " + std::to_string(vertex) +
                           " exceeds cap " + std::to_string(cap)),
        vertex(vertex),
        cap(cap) {}
  u32 vertex;
  u64 cap;
};

inline u64 default_component_cap(u32 max_degree, u32 n) {
  double d = std::max<u32>(max_degree, 1);
  double cap = 10.0 * d * d * d * d * std::log(std::max<u32>(n, 2));
  if (cap > 9e18) return std::numeric_limits<u64>::max();
  return std::max<u64>(u64(cap), 1);
}

// One question's worth of lazy simulation against the probe-counted oracle.
// Every (node, round) is simulated at most once; neighbor lists are revealed
// at most once per node. Rho values come from the shared tape at zero query
// cost. Cached states are never mutated after being computed, and always
// equal the local_ref state for the same (graph, params) — the central
// equivalence invariant.
//
// Rounds are advanced in two stages per node, mirroring rules.hpp:
// stage A (entry: sleeping, join consumption, marking) and stage B
// (refinement, join resolution, p update). Stage A of round t pulls only
// stage B of rounds < t; stage B of round t pulls stage A of round t and
// below. Recursion depth is therefore bounded by 2(T+1) regardless of the
// graph.
class QuestionContext {
 public:
  QuestionContext(OracleHandle& oracle, const Params& params)
      : oracle_(&oracle), p_(params), T_(params.T), B_(params.bits),
        e_init_(params.initial_exponent()) {}

  const Params& params() const { return p_; }
  OracleHandle& oracle() { return *oracle_; }

  NodeRoundState simulate_node(u32 v, u32 t) {
    if (t > T_) throw input_error("simulate_node: round out of range");
    QNode& q = get(v);
    if (t == 0) {
      NodeRoundState s;
      s.exponent = e_init_;
      return s;
    }
    ensure_b(v, t);
    NodeRoundState s;
    s.exponent = q.e[t];
    s.marked = q.marked[t] != 0;
    s.sleeping = q.sleeping[t] != 0;
    s.dead = q.dead_from >= 0 && u32(q.dead_from) <= t;
    s.joined = q.joined_at >= 0 && u32(q.joined_at) <= t;
    s.move = Move(q.move[t]);
    return s;
  }

  Phase1Status phase1_status(u32 v) {
    auto it = phase1_cache_.find(v);
    if (it != phase1_cache_.end()) return it->second;
    ensure_b(v, T_);
    Phase1Status st;
    QNode& q = get(v);
    if (q.joined_at >= 0) {
      st.kind = Phase1::in_i;
    } else {
      st.kind = Phase1::residual;
      for (u32 u : q.nbrs) {
        ensure_b(u, T_);
        if (get(u).joined_at >= 0) {
          st = {Phase1::dominated, u};
          break;
        }
      }
    }
    phase1_cache_[v] = st;
    return st;
  }

  // Connected component of v in the residual graph, found by BFS that asks
  // phase1_status of every neighbor of every residual vertex reached.
  std::vector<u32> residual_component(u32 v, u64 cap) {
    if (phase1_status(v).kind != Phase1::residual)
      throw input_error("residual_component: vertex is not residual");
    std::vector<u32> comp{v};
    std::unordered_map<u32, u8> seen{{v, 1}};
    for (size_t head = 0; head < comp.size(); ++head) {
      u32 x = comp[head];
      for (u32 u : get(x).nbrs) {
        if (seen.count(u)) continue;
        seen[u] = 1;
        if (phase1_status(u).kind == Phase1::residual) {
          comp.push_back(u);
          if (comp.size() > cap) throw component_cap_exceeded(v, cap);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    return comp;
  }

  // Neighbors of a node this question has already revealed.
  const std::vector<u32>& revealed_neighbors(u32 v) { return get(v).nbrs; }

 private:
  struct QNode {
    std::vector<u32> nbrs;
    std::vector<u8> levels;              // own rho levels, [t-1]
    std::vector<u8> e;                   // [t], t in [1, T+1]
    std::vector<u8> marked, sleeping, move;  // [t]
    std::vector<u64> declared;
    std::vector<std::vector<u32>> nset;  // [t-1]: adjacency indices, refined in place
    i32 joined_at = -1;
    i32 dead_from = -1;
    i32 exit_round = std::numeric_limits<i32>::max();
    i32 lp = 0;
    u32 a_done = 0, b_done = 0;
    bool advancing = false;
  };

  OracleHandle* oracle_;
  Params p_;
  u32 T_, B_, e_init_;
  std::unordered_map<u32, QNode> nodes_;
  std::unordered_map<u32, Phase1Status> phase1_cache_;
  u32 depth_ = 0;

  bool participating(const QNode& q, u32 r) const { return i64(r) < i64(q.exit_round); }

  bool declared_at(const QNode& q, u32 t) const {
    return (q.declared[t / 64] >> (t % 64)) & 1;
  }

  QNode& get(u32 v) {
    auto it = nodes_.find(v);
    if (it != nodes_.end()) return it->second;
    if (v >= oracle_->graph().n()) throw input_error("question vertex out of range");
    QNode& q = nodes_[v];
    q.nbrs = oracle_->reveal_neighbors(v);
    q.levels.resize(T_);
    for (u32 t = 1; t <= T_; ++t) q.levels[t - 1] = u8(rho_level(p_, v, t));
    q.e.assign(T_ + 2, 0);
    q.e[1] = u8(e_init_);
    q.marked.assign(T_ + 1, 0);
    q.sleeping.assign(T_ + 1, 0);
    q.move.assign(T_ + 1, u8(Move::none));
    q.declared.assign((T_ + 2 + 63) / 64, 0);
    q.nset.resize(T_);
    for (u32 t = 1; t <= T_; ++t) {
      u32 bound = inclusion_level_bound(p_, e_init_, t);
      auto& set = q.nset[t - 1];
      for (u32 i = 0; i < q.nbrs.size(); ++i)
        if (rho_level(p_, q.nbrs[i], t) <= bound) set.push_back(i);
    }
    for (u32 t = 1; t <= T_; ++t) {
      u64 cnt = q.nset[t - 1].size();
      if (cnt > sleep_threshold(p_, t - 1)) {
        u32 z = init_sleep_z(p_, cnt, t);
        for (u32 r = t; r <= std::min(t + z, T_); ++r)
          q.declared[r / 64] |= u64(1) << (r % 64);
      }
    }
    return q;
  }

  void ensure_a(u32 v, u32 t) {
    QNode& q = get(v);
    while (q.a_done < t) {
      if (q.a_done == q.b_done) advance_a(v, q.a_done + 1);
      else advance_b(v, q.b_done + 1);
    }
  }

  void ensure_b(u32 v, u32 t) {
    QNode& q = get(v);
    while (q.b_done < t) {
      if (q.a_done == q.b_done) advance_a(v, q.a_done + 1);
      else advance_b(v, q.b_done + 1);
    }
  }

  struct DepthGuard {
    QuestionContext* c;
    explicit DepthGuard(QuestionContext* ctx) : c(ctx) {
      if (++c->depth_ > 2 * (c->T_ + 1) + 8)
        throw internal_error("simulation recursion exceeded its round bound");
    }
    ~DepthGuard() { --c->depth_; }
  };

  void advance_a(u32 v, u32 t) {
    DepthGuard guard(this);
    QNode& q = get(v);
    if (q.advancing) throw internal_error("re-entrant node advance");
    q.advancing = true;
    if (!participating(q, t)) {
      q.a_done = t;
      q.advancing = false;
      return;
    }
    bool sleeping = declared_at(q, t);
    bool awake_prev = t >= 2 && !declared_at(q, t - 1);
    bool dead_now = false;
    if (awake_prev) {
      for (u32 i : q.nset[t - 2]) {
        u32 u = q.nbrs[i];
        ensure_b(u, t - 1);
        if (nodes_.at(u).joined_at == i32(t - 1)) dead_now = true;
      }
      q.lp = i32(t) - 1;
    } else if (!sleeping) {
      for (u32 r = u32(q.lp) + 1; r + 1 <= t; ++r) {
        for (u32 i : q.nset[r - 1]) {
          u32 u = q.nbrs[i];
          ensure_b(u, r);
          if (nodes_.at(u).joined_at == i32(r)) dead_now = true;
        }
      }
      q.lp = i32(t) - 1;
    }
    if (dead_now) {
      q.dead_from = i32(t);
      q.exit_round = i32(t);
      q.a_done = t;
      q.advancing = false;
      return;
    }
    if (sleeping) q.sleeping[t] = 1;
    if (q.levels[t - 1] <= B_ - q.e[t]) q.marked[t] = 1;
    q.a_done = t;
    q.advancing = false;
  }

  void advance_b(u32 v, u32 t) {
    DepthGuard guard(this);
    QNode& q = get(v);
    if (q.advancing) throw internal_error("re-entrant node advance");
    if (q.a_done != t) throw internal_error("stage B before stage A");
    q.advancing = true;
    if (!participating(q, t)) {
      q.e[t + 1] = q.e[t];  // frozen exponent
      q.b_done = t;
      q.advancing = false;
      return;
    }

    // Step 2: refine future relevant sets; runs even while sleeping.
    for (u32 tpp = t; tpp <= T_; ++tpp) {
      if (declared_at(q, tpp)) continue;
      Window win = refine_window(t, tpp);
      if (win.empty()) continue;
      bool declared = false;
      for (u32 r = win.lo; r <= win.hi && !declared; ++r) {
        auto& set = q.nset[tpp - 1];
        u32 kept = 0;
        for (u32 pos = 0; pos < set.size(); ++pos) {
          u32 i = set[pos];
          u32 u = q.nbrs[i];
          u32 lvl = rho_level(p_, u, tpp);
          bool keep;
          if (r == 1) {
            // Round-1 state is the same for everyone: alive, e = e_init;
            // no need to simulate the member.
            keep = lvl <= refine_level_bound(p_, e_init_, tpp, r);
          } else {
            ensure_a(u, r);
            const QNode& qu = nodes_.at(u);
            keep = participating(qu, r) &&
                   lvl <= refine_level_bound(p_, qu.e[r], tpp, r);
          }
          if (keep) set[kept++] = i;
        }
        set.resize(kept);
        if (u64(kept) > sleep_threshold(p_, tpp - r)) {
          for (u32 s = tpp; s <= std::min(tpp + (tpp - r), T_); ++s)
            q.declared[s / 64] |= u64(1) << (s % 64);
          declared = true;
        }
      }
    }

    if (q.sleeping[t]) {
      q.e[t + 1] = q.e[t] + 1;
      q.move[t] = u8(Move::sleep_halve);
      q.b_done = t;
      q.advancing = false;
      return;
    }

    // Step 4: resolve the marking round.
    bool blocked = false;
    for (u32 i : q.nset[t - 1]) {
      u32 u = q.nbrs[i];
      ensure_a(u, t);
      if (nodes_.at(u).marked[t]) blocked = true;
    }
    if (q.marked[t] && !blocked) {
      q.joined_at = i32(t);
      q.exit_round = i32(t) + 1;
      q.e[t + 1] = q.e[t];
      q.move[t] = u8(Move::join);
    } else if (blocked) {
      q.e[t + 1] = q.e[t] + 1;
      q.move[t] = u8(Move::halve);
    } else {
      q.e[t + 1] = u8(std::max<u32>(1, q.e[t] - 1));
      q.move[t] = u8(Move::grow);
    }
    if (q.e[t + 1] > B_) throw internal_error("exponent exceeded precision");
    q.lp = i32(t);
    q.b_done = t;
    q.advancing = false;
  }
};

// Lexicographically-first greedy MIS of a residual component: ascending ids,
// add a vertex iff no already-added neighbor. Depends only on the component
// and its internal edges, never on which vertex was questioned.
inline std::vector<u32> greedy_complete(const std::vector<u32>& component,
                                        const std::vector<std::pair<u32, u32>>& edges) {
  std::vector<u32> comp = component;
  std::sort(comp.begin(), comp.end());
  std::unordered_map<u32, u32> index;
  for (u32 i = 0; i < comp.size(); ++i) index[comp[i]] = i;
  std::vector<std::vector<u32>> adj(comp.size());
  for (auto [a, b] : edges) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      throw input_error("greedy_complete: edge outside component");
    adj[ia->second].push_back(ib->second);
    adj[ib->second].push_back(ia->second);
  }
  std::vector<u8> taken(comp.size(), 0);
  std::vector<u32> mis;
  for (u32 i = 0; i < comp.size(); ++i) {
    bool free = true;
    for (u32 j : adj[i])
      if (j < i && taken[j]) free = false;
    if (free) {
      taken[i] = 1;
      mis.push_back(comp[i]);
    }
  }
  return mis;
}

struct LcaOptions {
  u64 component_cap = 0;  // 0: use default_component_cap(Delta, n)
};

namespace detail {

inline Answer answer_with_ctx(QuestionContext& ctx, u32 v, u64 cap, u64 probes_before) {
  Answer a;
  a.phase1 = ctx.phase1_status(v);
  switch (a.phase1.kind) {
    case Phase1::in_i:
      a.in_mis = true;
      break;
    case Phase1::dominated:
      a.in_mis = false;
      break;
    case Phase1::residual: {
      auto comp = ctx.residual_component(v, cap);
      a.component_size = u32(comp.size());
      std::vector<std::pair<u32, u32>> edges;
      std::unordered_map<u32, u8> in_comp;
      for (u32 x : comp) in_comp[x] = 1;
      for (u32 x : comp)
        for (u32 u : ctx.revealed_neighbors(x))
          if (x < u && in_comp.count(u)) edges.emplace_back(x, u);
      auto mis = greedy_complete(comp, edges);
      a.in_mis = std::binary_search(mis.begin(), mis.end(), v);
      break;
    }
  }
  a.probes_used = ctx.oracle().probe_count() - probes_before;
  return a;
}

}  // namespace detail

// Fresh per-question context: the pure LCA model. Deterministic in
// (graph, params, v).
inline Answer answer(const Graph& g, const Params& params, u32 v, LcaOptions opts = {}) {
  u64 cap = opts.component_cap ? opts.component_cap
                               : default_component_cap(g.max_degree(), g.n());
  OracleHandle oracle(g);
  QuestionContext ctx(oracle, params);
  return detail::answer_with_ctx(ctx, v, cap, 0);
}

// Batch mode over a shared read-only cache; must produce in_mis bits
// identical to one-at-a-time questioning. Probe deltas are attributed to the
// question that first triggered the work (cache hits are free for later
// questions).
inline std::vector<Answer> answer_all(const Graph& g, const Params& params,
                                      const std::vector<u32>& questions,
                                      LcaOptions opts = {}) {
  u64 cap = opts.component_cap ? opts.component_cap
                               : default_component_cap(g.max_degree(), g.n());
  OracleHandle oracle(g);
  QuestionContext ctx(oracle, params);
  std::vector<Answer> out;
  out.reserve(questions.size());
  for (u32 v : questions)
    out.push_back(detail::answer_with_ctx(ctx, v, cap, oracle.probe_count()));
  return out;
}

}  // namespace mislca
