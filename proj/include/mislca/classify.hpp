#pragma once

#include <vector>

#include "mislca/common.hpp"
#include "mislca/graph.hpp"
#include "mislca/local_ref.hpp"

namespace mislca {

enum class RoundClass : u8 { inactive = 0, sleeping, light, moderate, heavy };

// Per-(node, round) diagnostic flags. None of these feed back into the
// algorithm; they are instrumentation over a finished run.
struct ClassFlags {
  static constexpr u8 good1 = 1;
  static constexpr u8 good2 = 2;
  static constexpr u8 wrong_down = 4;
  static constexpr u8 wrong_up = 8;
  static constexpr u8 mistaken = 16;
  static constexpr u8 d_ge_delta = 32;
};

struct ClassTable {
  u32 n = 0, T = 0;
  std::vector<u8> cls;    // [v * (T+1) + t]
  std::vector<u8> flags;  // [v * (T+1) + t]

  // Population / event tallies for the statistical diagnostics.
  u64 pop_rounds = 0;          // participating (v,t) pairs
  u64 ev_mistaken = 0;
  u64 pop_intact_light = 0;
  u64 ev_wrong_down = 0;
  u64 pop_intact_heavy = 0;
  u64 ev_heavy_halved = 0;
  u64 pop_intact_good1 = 0;
  u64 ev_good1_joined = 0;
  u64 pop_intact_good2 = 0;
  u64 ev_good2_neighbor_joined = 0;
  u64 pop_wrong_up_eligible = 0;  // intact, d_t >= delta, not good2, alive at t+1
  u64 ev_wrong_up = 0;

  u64 count_class(RoundClass c) const {
    u64 k = 0;
    for (u8 x : cls)
      if (x == u8(c)) ++k;
    return k;
  }

  RoundClass class_of(u32 v, u32 t) const { return RoundClass(cls[u64(v) * (T + 1) + t]); }
  u8 flags_of(u32 v, u32 t) const { return flags[u64(v) * (T + 1) + t]; }
};

// d_t(v) <= 2^(4*gap), exact with saturation (both sides dyadic).
inline bool mass_below_pow2(u128 mass, u32 bits, u32 exp4gap) {
  u64 e = u64(bits) + exp4gap;
  if (e >= 127) return true;
  return mass <= (u128(1) << e);
}

// Fills the class table for a completed run. d_t(v) sums the marking
// probabilities of participating neighbors as exact multiples of 2^-bits;
// nodes removed from the process carry no mass.
inline ClassTable classify_rounds(const Graph& g, const Outcome& out) {
  const u32 n = out.n, T = out.T, B = out.params.bits;
  const double delta = out.params.delta_const;
  const double c_delta = out.params.C_delta;
  ClassTable ct;
  ct.n = n;
  ct.T = T;
  ct.cls.assign(u64(n) * (T + 1), u8(RoundClass::inactive));
  ct.flags.assign(u64(n) * (T + 1), 0);

  // Declarations indexed by the round whose mass decides "mistake".
  std::vector<std::vector<u32>> decls_by_source(T + 1);
  auto mark_mistaken = [&](u32 v, u32 from, u32 to) {
    for (u32 t = from; t <= std::min(to, T); ++t)
      ct.flags[u64(v) * (T + 1) + t] |= ClassFlags::mistaken;
  };
  for (u32 i = 0; i < out.declarations.size(); ++i) {
    const SleepDecl& d = out.declarations[i];
    if (d.declared_round == 0) {
      if (d.init_z >= 1) mark_mistaken(d.node, d.from, d.to);
    } else {
      decls_by_source[d.source_round].push_back(i);
    }
  }

  std::vector<u128> d_prev(n, 0), d_cur(n, 0);
  std::vector<u8> part_prev(n, 0), part_cur(n, 0);

  for (u32 t = 1; t <= T; ++t) {
    for (u32 v = 0; v < n; ++v) {
      part_cur[v] = out.participates(v, t) ? 1 : 0;
      d_cur[v] = 0;
    }
    for (u32 v = 0; v < n; ++v) {
      if (!part_cur[v]) continue;
      u128 d = 0;
      for (u32 i = 0; i < g.degree(v); ++i) {
        u32 u = g.neighbor(v, i);
        if (part_cur[u]) d += u128(1) << (B - out.exponent_at(u, t));
      }
      d_cur[v] = d;
    }
    // Classes first: neighbor heaviness feeds the good2 test below.
    for (u32 v = 0; v < n; ++v) {
      if (!part_cur[v]) continue;
      u8& c = ct.cls[u64(v) * (T + 1) + t];
      if (out.sleeping[u64(v) * (T + 1) + t]) {
        c = u8(RoundClass::sleeping);
      } else if (cmp_mass_vs_threshold(d_cur[v], B, delta) <= 0) {
        c = u8(RoundClass::light);
      } else if (cmp_mass_vs_threshold(d_cur[v], B, c_delta) >= 0) {
        c = u8(RoundClass::heavy);
      } else {
        c = u8(RoundClass::moderate);
      }
    }
    for (u32 v = 0; v < n; ++v) {
      if (!part_cur[v]) continue;
      u8& f = ct.flags[u64(v) * (T + 1) + t];
      RoundClass c = RoundClass(ct.cls[u64(v) * (T + 1) + t]);
      if ((c == RoundClass::light || c == RoundClass::moderate) &&
          out.exponent_at(v, t) == 1)
        f |= ClassFlags::good1;
      if (cmp_mass_vs_threshold(d_cur[v], B, delta) >= 0) {
        f |= ClassFlags::d_ge_delta;
        u128 heavy_mass = 0;
        for (u32 i = 0; i < g.degree(v); ++i) {
          u32 u = g.neighbor(v, i);
          if (!part_cur[u]) continue;
          RoundClass cu = RoundClass(ct.cls[u64(u) * (T + 1) + t]);
          if (cu == RoundClass::heavy || cu == RoundClass::sleeping)
            heavy_mass += u128(1) << (B - out.exponent_at(u, t));
        }
        if (cmp_scaled(20, heavy_mass, 19, d_cur[v]) <= 0) f |= ClassFlags::good2;
      }
      if (c == RoundClass::light && Move(out.move[u64(v) * (T + 1) + t]) == Move::halve)
        f |= ClassFlags::wrong_down;
    }
    // Wrong-up for the previous round needs d_{t} vs d_{t-1}.
    if (t >= 2) {
      for (u32 v = 0; v < n; ++v) {
        if (!part_prev[v] || !part_cur[v]) continue;
        u8& f = ct.flags[u64(v) * (T + 1) + (t - 1)];
        if (cmp_mass_vs_threshold(d_prev[v], B, delta) < 0) continue;
        if (f & ClassFlags::good2) continue;
        if (cmp_scaled(10, d_cur[v], 7, d_prev[v]) > 0) f |= ClassFlags::wrong_up;
      }
    }
    // In-run sleep declarations judged by the mass at their source round.
    for (u32 idx : decls_by_source[t]) {
      const SleepDecl& d = out.declarations[idx];
      if (mass_below_pow2(d_cur[d.node], B, 4 * (d.target - d.source_round)))
        mark_mistaken(d.node, d.from, d.to);
    }
    std::swap(d_prev, d_cur);
    std::swap(part_prev, part_cur);
  }

  // Tallies.
  for (u32 v = 0; v < n; ++v) {
    for (u32 t = 1; t <= T; ++t) {
      u64 at = u64(v) * (T + 1) + t;
      RoundClass c = RoundClass(ct.cls[at]);
      if (c == RoundClass::inactive) continue;
      u8 f = ct.flags[at];
      ++ct.pop_rounds;
      if (f & ClassFlags::mistaken) {
        ++ct.ev_mistaken;
        continue;  // intact populations exclude mistaken rounds
      }
      bool halved = Move(out.move[at]) == Move::halve;
      if (c == RoundClass::light) {
        ++ct.pop_intact_light;
        if (f & ClassFlags::wrong_down) ++ct.ev_wrong_down;
      }
      if (c == RoundClass::heavy) {
        ++ct.pop_intact_heavy;
        if (halved) ++ct.ev_heavy_halved;
      }
      if (f & ClassFlags::good1) {
        ++ct.pop_intact_good1;
        if (out.joined_at[v] == i32(t)) ++ct.ev_good1_joined;
      }
      if (f & ClassFlags::good2) {
        ++ct.pop_intact_good2;
        bool neighbor_joined = false;
        for (u32 i = 0; i < g.degree(v) && !neighbor_joined; ++i)
          if (out.joined_at[g.neighbor(v, i)] == i32(t)) neighbor_joined = true;
        if (neighbor_joined) ++ct.ev_good2_neighbor_joined;
      }
      if (t < T && (f & ClassFlags::d_ge_delta) && !(f & ClassFlags::good2) &&
          out.participates(v, t + 1)) {
        ++ct.pop_wrong_up_eligible;
        if (f & ClassFlags::wrong_up) ++ct.ev_wrong_up;
      }
    }
  }
  return ct;
}

}  // namespace mislca
