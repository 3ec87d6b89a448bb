#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mislca/common.hpp"
#include "mislca/graph.hpp"
#include "mislca/params.hpp"
#include "mislca/rules.hpp"
#include "mislca/tape.hpp"

namespace mislca {

enum class Move : u8 { none = 0, halve, grow, sleep_halve, join };

// Per-(node, round) trace entry. dead and joined are absorbing; a joined
// node is never dead. Exponents freeze when a node leaves the process.
struct NodeRoundState {
  u32 exponent = 0;
  bool marked = false;
  bool sleeping = false;
  bool dead = false;
  bool joined = false;
  Move move = Move::none;

  bool operator==(const NodeRoundState&) const = default;
};

struct SleepDecl {
  u32 node = 0;
  u32 target = 0;        // the round t'' whose set triggered the declaration
  u32 from = 0, to = 0;  // declared interval, clamped to [1, T]
  u32 declared_round = 0;  // 0 for initialization-time declarations
  u32 source_round = 0;    // refinement source round r (in-run only)
  u32 init_z = 0;          // z (initialization only)
};

// Max over nodes of |N(v,t'')| at the end of each round (undeclared targets
// only) and of per-(t, t') message read counts. Uniform bounds make the max
// a lossless summary for the deterministic claim checks.
struct InfluenceSummary {
  u32 T = 0;
  std::vector<u64> max_nset;          // (T+1)^2, [t * (T+1) + t'']
  std::vector<u32> max_nset_witness;  // node attaining the max
  std::vector<u64> max_reads;         // (T+1)^2, [t * (T+1) + t']
  std::vector<u32> max_reads_witness;

  u64 nset(u32 t, u32 tpp) const { return max_nset[t * (T + 1) + tpp]; }
  u64 reads(u32 t, u32 tp) const { return max_reads[t * (T + 1) + tp]; }
};

struct RunOptions {
  bool track_influence = true;  // maintain InfluenceSummary (cheap)
  bool full_ledger = false;     // keep per-node read counts (small runs only)
  bool self_check = false;      // expensive inline invariant checks

  // Ball-simulation hooks: remap local vertex ids to tape ids, and stop
  // advancing nodes past per-node round caps (stage A / stage B). Readers
  // must never need a fact beyond a node's cap; the ball radius guarantees
  // that for the questioned vertex.
  const std::vector<u32>* tape_ids = nullptr;
  const std::vector<u32>* cap_a = nullptr;
  const std::vector<u32>* cap_b = nullptr;
};

struct Outcome {
  Params params;
  u32 n = 0;
  u32 T = 0;

  std::vector<u32> in_set;    // I, ascending
  std::vector<u32> dominated; // Gamma(I), ascending
  std::vector<u32> residual;  // the rest, ascending

  // Traces. joined_at/dead_from are -1 when the event never happened;
  // dead_from is the first round during which the node no longer acts.
  std::vector<i32> joined_at;
  std::vector<i32> dead_from;
  std::vector<u8> exponent;  // [v * (T+2) + t], t in [1, T+1]
  std::vector<u8> marked;    // [v * (T+1) + t]
  std::vector<u8> sleeping;
  std::vector<u8> move;

  std::vector<SleepDecl> declarations;
  InfluenceSummary influence;
  bool influence_tracked = false;

  // Optional full ledger: reads[v][t][t'], (T+1)^2 stride per node, and
  // |N(v,t)| right after initialization, [v * T + (t-1)].
  std::vector<u32> reads_full;
  std::vector<u32> initial_nset_count;

  std::vector<u64> round_joins;     // [t]
  std::vector<u64> round_deaths;    // deaths discovered in round t
  std::vector<u64> round_marked;
  std::vector<u64> round_sleeping;
  std::vector<u64> round_active;    // participants during round t

  bool participates(u32 v, u32 t) const {
    return (joined_at[v] < 0 || u32(joined_at[v]) >= t) &&
           (dead_from[v] < 0 || u32(dead_from[v]) > t);
  }

  NodeRoundState trace(u32 v, u32 t) const {
    NodeRoundState s;
    s.exponent = exponent[v * (T + 2) + t];
    s.marked = marked[v * (T + 1) + t] != 0;
    s.sleeping = sleeping[v * (T + 1) + t] != 0;
    s.dead = dead_from[v] >= 0 && u32(dead_from[v]) <= t;
    s.joined = joined_at[v] >= 0 && u32(joined_at[v]) <= t;
    s.move = Move(move[v * (T + 1) + t]);
    return s;
  }

  u32 exponent_at(u32 v, u32 t) const { return exponent[v * (T + 2) + t]; }

  u64 reads_of(u32 v, u32 t, u32 tp) const {
    return reads_full.empty() ? 0 : reads_full[(u64(v) * (T + 1) + t) * (T + 1) + tp];
  }
};

struct InfluenceVerdict {
  bool pass = true;
  std::string reason;
  u32 node = 0, t = 0, other = 0;
  u64 count = 0, bound = 0;
};

// Deterministic claim checks: (a) undeclared future relevant sets stay below
// 2^(10(t''-t+1)) + K at the end of every round; (b) round-t reads of round-t'
// messages stay below 2^(25(t-t'+1)) + K(t-t'). A violation is a simulator bug.
inline InfluenceVerdict assert_influence_bounds(const Outcome& out) {
  InfluenceVerdict v;
  if (!out.influence_tracked) {
    v.pass = false;
    v.reason = "influence tracking was disabled for this run";
    return v;
  }
  const auto& inf = out.influence;
  for (u32 t = 1; t <= out.T; ++t) {
    for (u32 tpp = t + 1; tpp <= out.T; ++tpp) {
      u64 bound = relevant_set_bound(out.params, t, tpp);
      u64 got = inf.nset(t, tpp);
      if (got > bound) {
        v.pass = false;
        v.reason = "relevant-set bound violated";
        v.node = inf.max_nset_witness[t * (out.T + 1) + tpp];
        v.t = t;
        v.other = tpp;
        v.count = got;
        v.bound = bound;
        return v;
      }
    }
    for (u32 tp = 1; tp < t; ++tp) {
      u64 bound = reads_bound(out.params, t, tp);
      u64 got = inf.reads(t, tp);
      if (got > bound) {
        v.pass = false;
        v.reason = "message-read bound violated";
        v.node = inf.max_reads_witness[t * (out.T + 1) + tp];
        v.t = t;
        v.other = tp;
        v.count = got;
        v.bound = bound;
        return v;
      }
    }
  }
  return v;
}

// Round-synchronous reference simulator. See rules.hpp for the canonical
// semantics this implements.
class RefSim {
 public:
  RefSim(const Graph& g, const Params& params, RunOptions opts = {})
      : g_(g), p_(params), opts_(opts), T_(params.T), B_(params.bits) {
    if (g.max_degree() > p_.delta_max_degree)
      throw input_error("graph max degree exceeds params.delta_max_degree");
    init();
  }

  void run() {
    for (u32 t = 1; t <= T_; ++t) step(t);
    finalize();
  }

  Outcome take() { return std::move(out_); }

 private:
  const Graph& g_;
  Params p_;
  RunOptions opts_;
  u32 T_, B_;
  u32 n_ = 0;
  u32 e_init_ = 0;

  std::vector<u8> levels_;    // [v * T + (t-1)]
  std::vector<u64> nset_;     // bitmask arena over adjacency indices
  std::vector<u64> nset_off_; // word offset of (v, t=1); stride words_[v]
  std::vector<u32> nwords_;
  std::vector<u32> ncount_;   // [v * T + (t-1)]
  std::vector<u64> declared_; // bitset over rounds, stride decl_words_
  u32 decl_words_ = 0;
  std::vector<i32> exit_round_;  // first round the node no longer acts; INT32_MAX while active
  std::vector<i32> lp_;          // last processed announcement round
  std::vector<u32> reads_row_;   // [v * (T+1) + t'], current round scratch
  std::vector<u8> reads_touched_;

  Outcome out_;

  u8* e_at(u32 v) { return out_.exponent.data() + u64(v) * (T_ + 2); }
  u64* nset_at(u32 v, u32 t) { return nset_.data() + nset_off_[v] + u64(t - 1) * nwords_[v]; }
  u32& ncount_at(u32 v, u32 t) { return ncount_[u64(v) * T_ + (t - 1)]; }
  u8 level_at(u32 v, u32 t) const { return levels_[u64(v) * T_ + (t - 1)]; }
  bool declared_at(u32 v, u32 t) const {
    return (declared_[u64(v) * decl_words_ + t / 64] >> (t % 64)) & 1;
  }
  void declare_range(u32 v, u32 from, u32 to) {
    for (u32 t = from; t <= to; ++t)
      declared_[u64(v) * decl_words_ + t / 64] |= u64(1) << (t % 64);
  }
  bool participating(u32 u, u32 r) const { return i64(r) < i64(exit_round_[u]); }

  void init() {
    n_ = g_.n();
    e_init_ = p_.initial_exponent();
    out_.params = p_;
    out_.n = n_;
    out_.T = T_;
    out_.joined_at.assign(n_, -1);
    out_.dead_from.assign(n_, -1);
    out_.exponent.assign(u64(n_) * (T_ + 2), 0);
    out_.marked.assign(u64(n_) * (T_ + 1), 0);
    out_.sleeping.assign(u64(n_) * (T_ + 1), 0);
    out_.move.assign(u64(n_) * (T_ + 1), u8(Move::none));
    out_.round_joins.assign(T_ + 1, 0);
    out_.round_deaths.assign(T_ + 1, 0);
    out_.round_marked.assign(T_ + 1, 0);
    out_.round_sleeping.assign(T_ + 1, 0);
    out_.round_active.assign(T_ + 1, 0);
    if (opts_.track_influence) {
      out_.influence.T = T_;
      out_.influence.max_nset.assign(u64(T_ + 1) * (T_ + 1), 0);
      out_.influence.max_nset_witness.assign(u64(T_ + 1) * (T_ + 1), 0);
      out_.influence.max_reads.assign(u64(T_ + 1) * (T_ + 1), 0);
      out_.influence.max_reads_witness.assign(u64(T_ + 1) * (T_ + 1), 0);
      out_.influence_tracked = true;
    }
    if (opts_.full_ledger) {
      u64 cells = u64(n_) * (T_ + 1) * (T_ + 1);
      if (cells > (u64(1) << 28))
        throw input_error("full ledger requested for too large a run");
      out_.reads_full.assign(cells, 0);
    }

    levels_.assign(u64(n_) * T_, 0);
    for (u32 v = 0; v < n_; ++v) {
      u32 tid = opts_.tape_ids ? (*opts_.tape_ids)[v] : v;
      for (u32 t = 1; t <= T_; ++t)
        levels_[u64(v) * T_ + (t - 1)] = u8(rho_level(p_, tid, t));
    }

    nwords_.assign(n_, 0);
    nset_off_.assign(n_, 0);
    u64 total_words = 0;
    for (u32 v = 0; v < n_; ++v) {
      nwords_[v] = (g_.degree(v) + 63) / 64;
      nset_off_[v] = total_words;
      total_words += u64(nwords_[v]) * T_;
    }
    nset_.assign(total_words, 0);
    ncount_.assign(u64(n_) * T_, 0);

    decl_words_ = (T_ + 2 + 63) / 64;
    declared_.assign(u64(n_) * decl_words_, 0);
    exit_round_.assign(n_, std::numeric_limits<i32>::max());
    lp_.assign(n_, 0);
    reads_row_.assign(u64(n_) * (T_ + 1), 0);
    reads_touched_.assign(n_, 0);

    // Initialization round: build every N(v,t) from the tape and declare
    // initial sleeping intervals per target, independently.
    for (u32 v = 0; v < n_; ++v) {
      u8* e = e_at(v);
      e[1] = u8(e_init_);
      const u32 deg = g_.degree(v);
      const u32* adj = g_.adj(v);
      for (u32 t = 1; t <= T_; ++t) {
        u64* mask = nset_at(v, t);
        u32 bound = inclusion_level_bound(p_, e_init_, t);
        u32 cnt = 0;
        for (u32 i = 0; i < deg; ++i) {
          if (level_at(adj[i], t) <= bound) {
            mask[i / 64] |= u64(1) << (i % 64);
            ++cnt;
          }
        }
        ncount_at(v, t) = cnt;
      }
      for (u32 t = 1; t <= T_; ++t) {
        u64 cnt = ncount_at(v, t);
        if (cnt > sleep_threshold(p_, t - 1)) {
          u32 z = init_sleep_z(p_, cnt, t);
          u32 to = std::min(t + z, T_);
          declare_range(v, t, to);
          out_.declarations.push_back({v, t, t, to, 0, 0, z});
        }
      }
    }
    if (opts_.full_ledger) out_.initial_nset_count = ncount_;
  }

  void add_reads(u32 v, u32 tp, u64 k) {
    reads_row_[u64(v) * (T_ + 1) + tp] += u32(k);
    reads_touched_[v] = 1;
  }

  void step(u32 t) {
    const u32 stride = T_ + 1;
    // Stage A: entry state for every node.
    for (u32 v = 0; v < n_; ++v) {
      if (opts_.cap_a && t > (*opts_.cap_a)[v]) continue;
      if (!participating(v, t)) continue;
      bool sleeping = declared_at(v, t);
      bool awake_prev = t >= 2 && !declared_at(v, t - 1);
      bool dead_now = false;
      if (awake_prev) {
        const u64* mask = nset_at(v, t - 1);
        const u32* adj = g_.adj(v);
        for (u32 w = 0; w < nwords_[v] && !dead_now; ++w) {
          u64 bits = mask[w];
          while (bits) {
            u32 i = w * 64 + u32(std::countr_zero(bits));
            bits &= bits - 1;
            if (out_.joined_at[adj[i]] == i32(t - 1)) {
              dead_now = true;
              break;
            }
          }
        }
        lp_[v] = i32(t) - 1;
      } else if (!sleeping) {
        const u32* adj = g_.adj(v);
        for (u32 r = u32(lp_[v]) + 1; r + 1 <= t; ++r) {
          add_reads(v, r, ncount_at(v, r));
          const u64* mask = nset_at(v, r);
          for (u32 w = 0; w < nwords_[v]; ++w) {
            u64 bits = mask[w];
            while (bits) {
              u32 i = w * 64 + u32(std::countr_zero(bits));
              bits &= bits - 1;
              if (out_.joined_at[adj[i]] == i32(r)) dead_now = true;
            }
          }
        }
        lp_[v] = i32(t) - 1;
      }
      if (dead_now) {
        out_.dead_from[v] = i32(t);
        exit_round_[v] = i32(t);
        ++out_.round_deaths[t];
        continue;
      }
      ++out_.round_active[t];
      if (sleeping) {
        out_.sleeping[u64(v) * stride + t] = 1;
        ++out_.round_sleeping[t];
      }
      if (level_at(v, t) <= B_ - e_at(v)[t]) {
        out_.marked[u64(v) * stride + t] = 1;
        ++out_.round_marked[t];
      }
    }

    // Stage B: refinement, then sleeping halve or marking resolution.
    for (u32 v = 0; v < n_; ++v) {
      if (opts_.cap_b && t > (*opts_.cap_b)[v]) continue;
      if (!participating(v, t)) continue;
      const u32* adj = g_.adj(v);
      u8* e = e_at(v);

      // Step 2: refine future relevant sets, even while sleeping.
      for (u32 tpp = t; tpp <= T_; ++tpp) {
        if (declared_at(v, tpp)) continue;
        Window win = refine_window(t, tpp);
        if (win.empty()) continue;
        bool declared = false;
        for (u32 r = win.lo; r <= win.hi && !declared; ++r) {
          add_reads(v, r, ncount_at(v, tpp));
          u64* mask = nset_at(v, tpp);
          u32 cnt = ncount_at(v, tpp);
          for (u32 w = 0; w < nwords_[v]; ++w) {
            u64 bits = mask[w];
            while (bits) {
              u32 b = u32(std::countr_zero(bits));
              bits &= bits - 1;
              u32 i = w * 64 + b;
              u32 u = adj[i];
              bool keep = participating(u, r) &&
                          level_at(u, tpp) <= refine_level_bound(p_, e_at(u)[r], tpp, r);
              if (!keep) {
                mask[w] &= ~(u64(1) << b);
                --cnt;
              }
            }
          }
          ncount_at(v, tpp) = cnt;
          if (cnt > sleep_threshold(p_, tpp - r)) {
            u32 to = std::min(tpp + (tpp - r), T_);
            declare_range(v, tpp, to);
            out_.declarations.push_back({v, tpp, tpp, to, t, r, 0});
            declared = true;
          }
        }
      }

      if (out_.sleeping[u64(v) * stride + t]) {
        e[t + 1] = e[t] + 1;
        out_.move[u64(v) * stride + t] = u8(Move::sleep_halve);
        continue;
      }

      // Step 4: read round-t marks of N(v,t), join or adjust p.
      add_reads(v, t, ncount_at(v, t));
      bool blocked = false;
      {
        const u64* mask = nset_at(v, t);
        for (u32 w = 0; w < nwords_[v]; ++w) {
          u64 bits = mask[w];
          while (bits) {
            u32 i = w * 64 + u32(std::countr_zero(bits));
            bits &= bits - 1;
            if (out_.marked[u64(adj[i]) * stride + t]) blocked = true;
          }
        }
      }
      if (opts_.self_check) check_safety(v, t);
      bool self_marked = out_.marked[u64(v) * stride + t] != 0;
      if (self_marked && !blocked) {
        out_.joined_at[v] = i32(t);
        exit_round_[v] = i32(t) + 1;
        e[t + 1] = e[t];
        out_.move[u64(v) * stride + t] = u8(Move::join);
        ++out_.round_joins[t];
      } else if (blocked) {
        e[t + 1] = e[t] + 1;
        out_.move[u64(v) * stride + t] = u8(Move::halve);
      } else {
        e[t + 1] = u8(std::max<u32>(1, e[t] - 1));
        out_.move[u64(v) * stride + t] = u8(Move::grow);
      }
      if (e[t + 1] > B_) throw internal_error("exponent exceeded precision");
      lp_[v] = i32(t);
    }

    if (opts_.track_influence) collect_influence(t);
    else clear_reads();
  }

  void check_safety(u32 v, u32 t) {
    // Every marked participating neighbor must still be in N(v,t).
    const u32* adj = g_.adj(v);
    const u64* mask = nset_at(v, t);
    for (u32 i = 0; i < g_.degree(v); ++i) {
      u32 u = adj[i];
      if (participating(u, t) && out_.marked[u64(u) * (T_ + 1) + t]) {
        if (!((mask[i / 64] >> (i % 64)) & 1))
          throw internal_error("safety violation: marked neighbor missing from N(v,t)");
      }
    }
  }

  void collect_influence(u32 t) {
    auto& inf = out_.influence;
    const u32 stride = T_ + 1;
    for (u32 v = 0; v < n_; ++v) {
      bool active_end = participating(v, t) && out_.joined_at[v] != i32(t);
      if (active_end) {
        for (u32 tpp = t + 1; tpp <= T_; ++tpp) {
          if (declared_at(v, tpp)) continue;
          u64 cnt = ncount_at(v, tpp);
          u64 idx = u64(t) * stride + tpp;
          if (cnt > inf.max_nset[idx]) {
            inf.max_nset[idx] = cnt;
            inf.max_nset_witness[idx] = v;
          }
        }
      }
      if (reads_touched_[v]) {
        for (u32 tp = 1; tp <= t; ++tp) {
          u32 cnt = reads_row_[u64(v) * stride + tp];
          if (cnt == 0) continue;
          u64 idx = u64(t) * stride + tp;
          if (cnt > inf.max_reads[idx]) {
            inf.max_reads[idx] = cnt;
            inf.max_reads_witness[idx] = v;
          }
          if (opts_.full_ledger)
            out_.reads_full[(u64(v) * stride + t) * stride + tp] = cnt;
          reads_row_[u64(v) * stride + tp] = 0;
        }
        reads_touched_[v] = 0;
      }
    }
  }

  void clear_reads() {
    for (u32 v = 0; v < n_; ++v) {
      if (!reads_touched_[v]) continue;
      std::fill_n(reads_row_.begin() + u64(v) * (T_ + 1), T_ + 1, 0);
      reads_touched_[v] = 0;
    }
  }

  void finalize() {
    // Freeze exponents past each node's exit so traces read uniformly.
    for (u32 v = 0; v < n_; ++v) {
      u8* e = e_at(v);
      i32 exit = exit_round_[v];
      if (exit == std::numeric_limits<i32>::max()) continue;
      u32 from = out_.joined_at[v] >= 0 ? u32(out_.joined_at[v]) + 2 : u32(exit) + 1;
      u8 frozen = e[from - 1];
      for (u32 t = from; t <= T_ + 1; ++t) e[t] = frozen;
    }
    out_.in_set.clear();
    for (u32 v = 0; v < n_; ++v)
      if (out_.joined_at[v] >= 0) out_.in_set.push_back(v);
    std::vector<u8> dom(n_, 0);
    for (u32 v : out_.in_set)
      for (u32 i = 0; i < g_.degree(v); ++i) dom[g_.neighbor(v, i)] = 1;
    for (u32 v = 0; v < n_; ++v) {
      if (out_.joined_at[v] >= 0) continue;
      if (dom[v]) out_.dominated.push_back(v);
      else out_.residual.push_back(v);
    }
    if (opts_.self_check) {
      for (u32 v : out_.in_set)
        for (u32 i = 0; i < g_.degree(v); ++i)
          if (out_.joined_at[g_.neighbor(v, i)] >= 0)
            throw internal_error("independence violated");
      for (u32 v = 0; v < n_; ++v)
        if (out_.dead_from[v] >= 0 && !dom[v] && out_.joined_at[v] < 0)
          throw internal_error("dead node without a joined neighbor");
    }
  }
};

inline Outcome run_reference(const Graph& g, const Params& p, RunOptions opts = {}) {
  RefSim sim(g, p, opts);
  sim.run();
  return sim.take();
}

}  // namespace mislca
