#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "mislca/common.hpp"
#include "mislca/graph.hpp"
#include "mislca/lca.hpp"
#include "mislca/local_ref.hpp"
#include "mislca/oracle.hpp"
#include "mislca/tape.hpp"

namespace mislca {

// Randomized-greedy MIS, simulated locally: v is in the MIS iff no neighbor
// earlier in the random order pi made it in. Earlier neighbors are explored
// in increasing pi order (which minimizes expected probes); the plain
// adjacency order is available for comparison. Memoized per question;
// recursion strictly descends in pi, so it terminates.
class RgmisContext {
 public:
  RgmisContext(OracleHandle& oracle, u64 seed, bool pi_order = true)
      : oracle_(&oracle), seed_(seed), pi_order_(pi_order) {}

  bool in_mis(u32 v) { return query(v, v, true); }

 private:
  OracleHandle* oracle_;
  u64 seed_;
  bool pi_order_;
  std::unordered_map<u32, bool> memo_;
  std::unordered_map<u32, std::vector<u32>> nbrs_;

  bool query(u32 v, u32 caller, bool root) {
    if (!root && !rg_before(seed_, v, caller))
      throw internal_error("rgmis recursion failed to descend in pi");
    auto it = memo_.find(v);
    if (it != memo_.end()) return it->second;
    auto nit = nbrs_.find(v);
    if (nit == nbrs_.end())
      nit = nbrs_.emplace(v, oracle_->reveal_neighbors(v)).first;
    std::vector<u32> earlier;
    for (u32 u : nit->second)
      if (rg_before(seed_, u, v)) earlier.push_back(u);
    if (pi_order_)
      std::sort(earlier.begin(), earlier.end(),
                [&](u32 a, u32 b) { return rg_before(seed_, a, b); });
    bool in = true;
    for (u32 u : earlier) {
      if (query(u, v, false)) {
        in = false;
        break;
      }
    }
    memo_[v] = in;
    return in;
  }
};

struct RgmisAnswer {
  bool in_mis = false;
  u64 probes_used = 0;
};

inline RgmisAnswer rgmis_answer(const Graph& g, u64 seed, u32 v, bool pi_order = true) {
  if (v >= g.n()) throw input_error("rgmis: vertex out of range");
  OracleHandle oracle(g);
  RgmisContext ctx(oracle, seed, pi_order);
  RgmisAnswer a;
  a.in_mis = ctx.in_mis(v);
  a.probes_used = oracle.probe_count();
  return a;
}

// Reference for the baseline's own tests: sequential greedy over pi.
inline std::vector<u8> rgmis_sequential(const Graph& g, u64 seed) {
  std::vector<u32> order(g.n());
  for (u32 v = 0; v < g.n(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](u32 a, u32 b) { return rg_before(seed, a, b); });
  std::vector<u8> in(g.n(), 0);
  for (u32 v : order) {
    bool ok = true;
    for (u32 i = 0; i < g.degree(v); ++i)
      if (in[g.neighbor(v, i)]) ok = false;
    if (ok) in[v] = 1;
  }
  return in;
}

struct BallOptions {
  u64 probe_budget = 20'000'000;
  bool truncated = true;  // per-distance round caps; false = plain full ball
};

struct BallResult {
  bool refused = false;
  u64 estimated_probes = 0;  // probes spent when the budget ran out
  Phase1Status status;
  u64 probes_used = 0;
  u32 ball_size = 0;
};

// Naive LCA by whole-ball simulation. Marked bits and join announcements
// both cross one hop inside a round, so information travels two hops per
// round: an exact answer needs the radius-2(T+1) ball. The truncated mode
// keeps that exactness while simulating distance-d nodes only up to rounds
// T - floor(max(0,d-1)/2) (stage A) and T - ceil(max(0,d-1)/2) (stage B),
// which shaves the outermost layers.
inline BallResult ball_simulate_answer(const Graph& g, const Params& params, u32 v,
                                       BallOptions opts = {}) {
  if (v >= g.n()) throw input_error("ball_simulate: vertex out of range");
  const u32 T = params.T;
  const u32 reveal_radius = opts.truncated ? (2 * T >= 1 ? 2 * T - 1 : 0) : 2 * T + 1;
  const u32 member_radius = opts.truncated ? 2 * T : 2 * T + 2;

  OracleHandle oracle(g);
  BallResult res;

  std::vector<u32> members{v};
  std::vector<u32> dist{0};
  std::unordered_map<u32, u32> local;  // original id -> local id
  local[v] = 0;
  std::vector<std::vector<u32>> adj_orig;
  adj_orig.push_back({});

  for (size_t head = 0; head < members.size(); ++head) {
    u32 x = members[head];
    u32 dx = dist[head];
    if (dx > reveal_radius) continue;
    if (oracle.probe_count() + g.degree(x) + 1 > opts.probe_budget) {
      res.refused = true;
      res.estimated_probes = oracle.probe_count() + g.degree(x) + 1;
      return res;
    }
    std::vector<u32> nbrs = oracle.reveal_neighbors(x);
    for (u32 u : nbrs) {
      if (local.count(u) || dx + 1 > member_radius) continue;
      local[u] = u32(members.size());
      members.push_back(u);
      dist.push_back(dx + 1);
      adj_orig.push_back({});
    }
    adj_orig[head] = std::move(nbrs);
  }

  std::vector<std::pair<u32, u32>> edges;
  for (u32 i = 0; i < members.size(); ++i)
    for (u32 u : adj_orig[i]) {
      auto it = local.find(u);
      if (it != local.end() && i < it->second) edges.emplace_back(i, it->second);
    }
  Graph ball = Graph::from_edges(u32(members.size()), std::move(edges));

  std::vector<u32> cap_a(members.size(), T), cap_b(members.size(), T);
  if (opts.truncated) {
    for (u32 i = 0; i < members.size(); ++i) {
      u32 gap = dist[i] > 0 ? dist[i] - 1 : 0;
      cap_a[i] = T - std::min(T, gap / 2);
      cap_b[i] = T - std::min(T, (gap + 1) / 2);
    }
  }

  RunOptions ropts;
  ropts.track_influence = false;
  ropts.tape_ids = &members;
  if (opts.truncated) {
    ropts.cap_a = &cap_a;
    ropts.cap_b = &cap_b;
  }
  RefSim sim(ball, params, ropts);
  sim.run();
  Outcome out = sim.take();

  if (out.joined_at[0] >= 0) {
    res.status.kind = Phase1::in_i;
  } else {
    res.status.kind = Phase1::residual;
    for (u32 u : adj_orig[0]) {
      if (out.joined_at[local.at(u)] >= 0) {
        res.status = {Phase1::dominated, u};
        break;
      }
    }
  }
  res.probes_used = oracle.probe_count();
  res.ball_size = u32(members.size());
  return res;
}

}  // namespace mislca
