#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace mislca {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

using vertex_t = u32;

// Thrown on bad user input (CLI maps it to exit code 2).
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on broken internal invariants (simulation bugs).
class internal_error : public std::logic_error {
 public:
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

inline int ceil_log2(u64 x) {
  if (x == 0) throw input_error("ceil_log2: x must be positive");
  return x == 1 ? 0 : std::bit_width(x - 1);
}

// 2^e as u64, saturating at the max value. Set-size thresholds use this;
// any realizable set is smaller than the saturation point.
inline u64 pow2_sat(i64 e) {
  if (e < 0) return 0;
  if (e >= 63) return std::numeric_limits<u64>::max();
  return u64{1} << e;
}

inline std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(char('0' + int(v % 10)));
    v /= 10;
  }
  return std::string(s.rbegin(), s.rend());
}

// Compares a*x with b*y exactly, without 128-bit overflow (a, b small).
inline int cmp_scaled(u64 a, u128 x, u64 b, u128 y) {
  auto mul = [](u64 k, u128 v) {
    u128 lo_part = u128(k) * u64(v);
    u128 hi_part = u128(k) * u64(v >> 64);
    u128 low = lo_part + (hi_part << 64);
    u128 high = (hi_part >> 64) + (low < lo_part ? 1 : 0);
    return std::pair<u128, u128>{high, low};
  };
  auto [lh, ll] = mul(a, x);
  auto [rh, rl] = mul(b, y);
  if (lh != rh) return lh < rh ? -1 : 1;
  if (ll != rl) return ll < rl ? -1 : 1;
  return 0;
}

// Compares mass/2^bits with a positive double threshold, exactly.
// Doubles are dyadic rationals, so the comparison has a precise answer.
inline int cmp_mass_vs_threshold(u128 mass, int bits, double threshold) {
  if (!(threshold > 0.0)) return mass == 0 && threshold == 0.0 ? 0 : 1;
  int ex;
  double frac = std::frexp(threshold, &ex);
  u64 m = static_cast<u64>(std::ldexp(frac, 53));  // threshold = m * 2^(ex-53)
  i64 s = i64(ex) - 53 + bits;
  // mass/2^bits vs m*2^(ex-53)  <=>  mass vs m << s
  if (s >= 0) {
    if (s >= 128 || (s > 64 && (m >> (128 - s)) != 0)) return -1;
    u128 rhs = u128(m) << s;
    return mass < rhs ? -1 : (mass > rhs ? 1 : 0);
  }
  i64 sh = -s;
  if (sh >= 128 || (sh > 0 && (mass >> (128 - sh)) != 0)) return mass == 0 ? -1 : 1;
  u128 lhs = mass << sh;
  return lhs < m ? -1 : (lhs > m ? 1 : 0);
}

}  // namespace mislca
