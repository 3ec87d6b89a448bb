#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mislca/common.hpp"

namespace mislca {

using ojson = nlohmann::ordered_json;

struct ProbeStats {
  u64 questions = 0;
  u64 max = 0;
  double mean = 0.0;
  u64 p50 = 0, p95 = 0, p99 = 0;
  u64 total = 0;
};

inline ProbeStats probe_stats(std::vector<u64> probes) {
  ProbeStats s;
  s.questions = probes.size();
  if (probes.empty()) return s;
  std::sort(probes.begin(), probes.end());
  for (u64 p : probes) s.total += p;
  s.max = probes.back();
  s.mean = double(s.total) / double(probes.size());
  auto rank = [&](u64 q) {  // nearest-rank percentile
    u64 idx = (probes.size() * q + 99) / 100;
    return probes[std::max<u64>(idx, 1) - 1];
  };
  s.p50 = rank(50);
  s.p95 = rank(95);
  s.p99 = rank(99);
  return s;
}

inline ojson to_json(const ProbeStats& s) {
  return ojson{{"questions", s.questions}, {"max", s.max},   {"mean", s.mean},
               {"p50", s.p50},             {"p95", s.p95},   {"p99", s.p99},
               {"total", s.total}};
}

// Machine-readable experiment output. Runs are keyed by seed; every verdict
// is "pass" or "fail: <reason>". Identical configs produce byte-identical
// files (wall-clock timings only appear when explicitly requested).
struct Report {
  ojson config;
  std::vector<std::pair<u64, ojson>> runs;
  ojson aggregate;
  bool all_pass = true;

  void add_verdict(ojson& run_json, const std::string& name, bool pass,
                   const std::string& reason = "") {
    run_json["verdicts"][name] = pass ? "pass" : ("fail: " + reason);
    if (!pass) all_pass = false;
  }
};

inline ojson report_to_json(const Report& r) {
  ojson j;
  j["config"] = r.config;
  j["runs"] = ojson::array();
  for (const auto& [seed, run] : r.runs) {
    ojson entry;
    entry["seed"] = seed;
    entry.update(run);
    j["runs"].push_back(entry);
  }
  j["aggregate"] = r.aggregate;
  j["all_pass"] = r.all_pass;
  return j;
}

namespace detail {

inline void flatten_csv(const ojson& j, const std::string& prefix, const std::string& seed,
                        std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten_csv(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), seed, out);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i)
      flatten_csv(j[i], prefix + "[" + std::to_string(i) + "]", seed, out);
  } else {
    out << seed << "," << prefix << ",";
    if (j.is_string()) out << j.get<std::string>();
    else out << j.dump();
    out << "\n";
  }
}

}  // namespace detail

// CSV: one row per (seed, metric); aggregate rows use seed "all".
inline void emit_report(const Report& r, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << report_to_json(r).dump(2) << "\n";
  } else if (format == "csv") {
    out << "seed,metric,value\n";
    for (const auto& [seed, run] : r.runs)
      detail::flatten_csv(run, "", std::to_string(seed), out);
    detail::flatten_csv(r.aggregate, "", "all", out);
  } else {
    throw input_error("unknown report format: " + format);
  }
}

inline void emit_report(const Report& r, const std::string& format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + path);
  emit_report(r, format, out);
}

}  // namespace mislca
