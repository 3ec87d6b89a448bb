#pragma once

#include <cmath>
#include <optional>

#include <json.hpp>

#include "mislca/common.hpp"

namespace mislca {

// All algorithm constants in one validated record.
//
//   K       = ceil(20 * log2(1/delta))   unless explicitly overridden
//   C_delta = log2(1/delta)
//   T       = T_multiplier * ceil(log2(Delta+1))
//   bits    = ceil(log2(Delta+1)) + 1 + T
//
// bits is chosen so that every reachable marking probability 2^-e is exactly
// representable and every comparison against a rho value is an exact integer
// comparison. Rho values are 128-bit, so bits must stay below 128; mass sums
// additionally need bits + ceil(log2(Delta+1)) <= 126.
struct Params {
  u32 delta_max_degree = 1;  // Delta (>= 1; degree-0 graphs are clamped to 1)
  u32 T = 0;                 // total rounds
  double delta_const = 0.005;
  u32 K = 0;
  double C_delta = 0.0;
  u32 bits = 0;  // B
  u64 master_seed = 0;
  u32 T_multiplier = 8;  // C_T

  static constexpr double kDefaultDelta = 0.005;
  static constexpr u32 kDefaultCT = 8;

  static u32 k_for_delta(double delta) {
    return u32(std::ceil(20.0 * std::log2(1.0 / delta)));
  }

  static Params make(u32 max_degree, u64 master_seed, u32 t_multiplier = kDefaultCT,
                     double delta = kDefaultDelta, std::optional<u32> k_override = {}) {
    Params p;
    p.delta_max_degree = std::max<u32>(max_degree, 1);
    if (!(delta > 0.0 && delta <= 0.01))
      throw input_error("delta must lie in (0, 0.01]");
    if (t_multiplier < 1) throw input_error("T multiplier must be >= 1");
    p.delta_const = delta;
    p.C_delta = std::log2(1.0 / delta);
    p.K = k_override ? *k_override : k_for_delta(delta);
    p.T_multiplier = t_multiplier;
    u32 lg = u32(ceil_log2(u64(p.delta_max_degree) + 1));
    p.T = t_multiplier * lg;
    p.bits = lg + 1 + p.T;
    p.master_seed = master_seed;
    p.validate();
    return p;
  }

  u32 initial_exponent() const { return u32(ceil_log2(delta_max_degree)) + 1; }

  void validate() const {
    if (delta_max_degree < 1) throw input_error("delta_max_degree must be >= 1");
    if (!(delta_const > 0.0 && delta_const <= 0.01))
      throw input_error("delta must lie in (0, 0.01]");
    u32 lg = u32(ceil_log2(u64(delta_max_degree) + 1));
    if (T != T_multiplier * lg || T_multiplier < 1)
      throw input_error("T must equal T_multiplier * ceil(log2(Delta+1))");
    if (bits != lg + 1 + T)
      throw input_error("bits must equal ceil(log2(Delta+1)) + 1 + T");
    if (bits + lg > 126)
      throw input_error("Delta/T combination needs more than 128-bit arithmetic");
    double cd = std::log2(1.0 / delta_const);
    if (std::abs(C_delta - cd) > 1e-9) throw input_error("C_delta must equal log2(1/delta)");
  }

  bool k_is_overridden() const { return K != k_for_delta(delta_const); }
};

inline void to_json(nlohmann::ordered_json& j, const Params& p) {
  j = nlohmann::ordered_json{{"delta_max_degree", p.delta_max_degree},
                             {"T", p.T},
                             {"delta_const", p.delta_const},
                             {"K", p.K},
                             {"C_delta", p.C_delta},
                             {"bits", p.bits},
                             {"master_seed", p.master_seed},
                             {"T_multiplier", p.T_multiplier}};
}

inline void from_json(const nlohmann::ordered_json& j, Params& p) {
  p.delta_max_degree = j.at("delta_max_degree").get<u32>();
  p.T = j.at("T").get<u32>();
  p.delta_const = j.at("delta_const").get<double>();
  p.K = j.at("K").get<u32>();
  p.C_delta = j.at("C_delta").get<double>();
  p.bits = j.at("bits").get<u32>();
  p.master_seed = j.at("master_seed").get<u64>();
  p.T_multiplier = j.at("T_multiplier").get<u32>();
  p.validate();
}

}  // namespace mislca
