#pragma once

#include "mislca/common.hpp"
#include "mislca/params.hpp"

namespace mislca {

// Fixed randomness: one uniform value rho_t(v) in (0, 1] per (node, round),
// realized as a keyed hash of (master_seed, v, t). Stored as an integer in
// [1, 2^bits] meaning value / 2^bits. Being a pure function of the seed, the
// tape is shared by the reference simulator and every LCA question at zero
// query cost.
struct Rho {
  u128 value = 0;
};

namespace detail {

inline u64 mix64(u64 x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

inline u128 hash128(u64 seed, u64 a, u64 b, u64 salt) {
  u64 h1 = mix64(mix64(mix64(seed ^ 0x243f6a8885a308d3ull ^ salt) + a) + b);
  u64 h2 = mix64(h1 ^ 0x13198a2e03707344ull);
  return (u128(h1) << 64) | h2;
}

}  // namespace detail

inline Rho rho(const Params& p, u32 v, u32 t) {
  if (t < 1 || t > p.T) throw input_error("rho: round out of range");
  u128 raw = detail::hash128(p.master_seed, v, t, 0);
  u128 mod = raw & ((u128(1) << p.bits) - 1);  // bits <= 126 by validation
  if (mod == 0) mod = u128(1) << p.bits;       // remap 0 to 2^bits; stays uniform
  return Rho{mod};
}

// Smallest j with value <= 2^j. All comparisons the algorithm makes against
// rho are of the form value <= 2^j, so the level is a complete summary.
inline u32 rho_level_of(Rho r) {
  if (r.value <= 1) return 0;
  u128 x = r.value - 1;
  u32 w = 0;
  u64 hi = u64(x >> 64);
  if (hi != 0) w = 64 + u32(std::bit_width(hi));
  else w = u32(std::bit_width(u64(x)));
  return w;  // bit_width(value-1) == ceil(log2(value))
}

inline u32 rho_level(const Params& p, u32 v, u32 t) { return rho_level_of(rho(p, v, t)); }

// Marking probability exponent: p = 2^-e with e >= 1 (p <= 1/2 always).
struct ProbExponent {
  u32 e = 1;
};

inline ProbExponent initial_exponent(u32 delta_max_degree) {
  if (delta_max_degree < 1) throw input_error("initial_exponent: Delta must be >= 1");
  return ProbExponent{u32(ceil_log2(delta_max_degree)) + 1};
}

// rho <= 2^-e, exact: value <= 2^(bits - e). The boundary value is marked
// (inclusive comparison).
inline bool is_marked(Rho r, ProbExponent p, const Params& params) {
  if (p.e > params.bits) throw input_error("is_marked: exponent exceeds precision");
  return r.value <= (u128(1) << (params.bits - p.e));
}

// Random order for the greedy baseline: position of v in the order, ties on
// the hash broken by id (total order).
inline u64 rg_priority(u64 seed, u32 v) { return detail::hash128(seed, v, 0, 0x9e37) >> 64; }

inline bool rg_before(u64 seed, u32 a, u32 b) {
  u64 pa = rg_priority(seed, a), pb = rg_priority(seed, b);
  return pa != pb ? pa < pb : a < b;
}

}  // namespace mislca
