#pragma once

#include "mislca/common.hpp"
#include "mislca/params.hpp"

namespace mislca {

// Canonical round semantics, shared by the reference simulator (local_ref)
// and the per-question simulation (lca). Both must follow this sequence
// exactly; the exhaustive small-graph equivalence suite checks that they do.
//
// Per node v, per round t in [1, T], with all vertices in lockstep:
//
//  Entry (stage A):
//    a1. v inactive (joined or dead in an earlier round): exponent frozen,
//        no flags, skip the round.
//    a2. sleeping(v,t) = t lies in a declared sleeping interval.
//    a3. Join consumption / death. Exactly one branch:
//        - v was awake in round t-1: v already read the round-(t-1)
//          messages of N(v,t-1); if any member joined in t-1, v is dead
//          from round t. last_processed = t-1.
//        - else if v is awake in round t: v scans rounds
//          r in [last_processed+1, t-1] (full scan, ascending), reading
//          the round-r messages of the current N(v,r); any member that
//          joined in round r kills v (dead during t, before marking).
//          last_processed = t-1.
//        - else (sleeping now and in t-1): nothing.
//    a4. If v is still alive: marked(v,t) = [rho_t(v) <= p_t(v)], whether
//        sleeping or not.
//
//  Body (stage B, after every node finished stage A of round t):
//    b1. Step 2 (alive v, even when sleeping in t): for each target
//        t'' in [t, T], ascending, skipped if t'' is already declared
//        sleeping: for each source round r in
//        [max(1, t-2(t''-t)), t-(t''-t)-1], ascending: read the round-r
//        messages of N(v,t'') and keep member u iff u participated in
//        round r and rho_{t''}(u) <= p_r(u) * 2^(t''-r). If afterwards
//        |N(v,t'')| > 2^(5(t''-r)) + K, declare v sleeping for rounds
//        [t'', t''+(t''-r)] (clamped to [1,T]) and move to the next t''.
//    b2. Sleeping v: p halves (exponent+1). Skip b3.
//    b3. Awake v: read round-t messages of N(v,t) (full scan). If v is
//        marked and no member is marked, v joins I. Otherwise p halves if
//        some member was marked, else p doubles capped at 1/2
//        (exponent = max(1, exponent-1)). last_processed = t. Awake alive
//        neighbors of a joiner learn of the join through this same read
//        and are dead from round t+1 (evaluated lazily in a3).
//
// Membership tests, marking tests and inclusion tests are exact integer
// comparisons on the rho levels (see tape.hpp).

// |N| threshold whose crossing declares sleep; gap = t''-r (in-run) or t-1
// (initialization).
inline u64 sleep_threshold(const Params& p, u32 gap) {
  u64 pw = pow2_sat(i64(5) * gap);
  u64 sum = pw + p.K;
  return sum < pw ? std::numeric_limits<u64>::max() : sum;
}

// Initialization: greatest z >= 0 with count > 2^(5(t+z-1)) + K, given that
// z = 0 already triggers. The declared interval is [t, t+z] clamped to T.
inline u32 init_sleep_z(const Params& p, u64 count, u32 t) {
  u32 z = 0;
  while (count > sleep_threshold(p, t + z)) ++z;  // gap at z+1 is t+z
  return z;
}

struct Window {
  u32 lo = 1, hi = 0;  // empty when hi < lo
  bool empty() const { return hi < lo; }
};

// Source rounds whose messages round t processes for future round t''.
inline Window refine_window(u32 t, u32 tpp) {
  u32 g = tpp - t;
  Window w;
  w.lo = (t > 2 * g) ? t - 2 * g : 1;
  w.hi = (t >= g + 1) ? t - g - 1 : 0;
  return w;
}

// Initial membership: u in N(v,t) iff rho_t(u) <= p_1(u) * 2^(t-1).
inline u32 inclusion_level_bound(const Params& p, u32 e_init, u32 t) {
  u64 bound = u64(p.bits) - e_init + (t - 1);
  return bound >= p.bits ? p.bits : u32(bound);
}

// Refinement keep test on the rho level, given u's exponent in round r.
inline u32 refine_level_bound(const Params& p, u32 e_r, u32 tpp, u32 r) {
  i64 bound = i64(p.bits) - e_r + (i64(tpp) - r);
  if (bound >= p.bits) return p.bits;
  if (bound < 0) return 0;  // unreachable while e <= bits, kept for safety
  return u32(bound);
}

// Deterministic guarantees asserted after every round (run analysis):
// relevant-set size for undeclared future rounds, and per-(t, t') message
// read counts.
inline u64 relevant_set_bound(const Params& p, u32 t, u32 tpp) {
  u64 pw = pow2_sat(i64(10) * (i64(tpp) - t + 1));
  u64 sum = pw + p.K;
  return sum < pw ? std::numeric_limits<u64>::max() : sum;
}

inline u64 reads_bound(const Params& p, u32 t, u32 tp) {
  u64 d = t - tp;
  u64 pw = pow2_sat(i64(25) * i64(d + 1));
  u64 sum = pw + u64(p.K) * d;
  return sum < pw ? std::numeric_limits<u64>::max() : sum;
}

}  // namespace mislca
