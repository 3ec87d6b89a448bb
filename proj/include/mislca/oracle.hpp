#pragma once

#include <optional>
#include <vector>

#include "mislca/common.hpp"
#include "mislca/graph.hpp"

namespace mislca {

constexpr u32 kAbsent = 0xffffffffu;

// Probe-counted view of a graph's adjacency lists. Every neighbor_probe
// increments the counter, including repeated identical probes; callers that
// want caching must cache on their side. Single-owner: concurrent questions
// use distinct handles over the shared graph.
class OracleHandle {
 public:
  explicit OracleHandle(const Graph& g, bool log_probes = false)
      : graph_(&g), logging_(log_probes) {}

  const Graph& graph() const { return *graph_; }

  // i-th smallest neighbor of v (1-based), or kAbsent past the degree.
  // Out-of-range v is an input error and is not counted as a probe.
  u32 neighbor_probe(u32 v, u32 i) {
    if (v >= graph_->n()) throw input_error("neighbor_probe: vertex id out of range");
    if (i < 1) throw input_error("neighbor_probe: index must be >= 1");
    ++probe_counter_;
    if (logging_) probe_log_.push_back({v, i});
    if (i > graph_->degree(v)) return kAbsent;
    return graph_->neighbor(v, i - 1);
  }

  // All neighbors of v, ascending; costs exactly degree(v)+1 probes
  // (probing until Absent).
  std::vector<u32> reveal_neighbors(u32 v) {
    std::vector<u32> out;
    for (u32 i = 1;; ++i) {
      u32 w = neighbor_probe(v, i);
      if (w == kAbsent) break;
      out.push_back(w);
    }
    return out;
  }

  u64 probe_count() const { return probe_counter_; }
  void reset_probe_count() { probe_counter_ = 0; probe_log_.clear(); }

  const std::vector<std::pair<u32, u32>>& probe_log() const { return probe_log_; }

 private:
  const Graph* graph_;
  bool logging_;
  u64 probe_counter_ = 0;
  std::vector<std::pair<u32, u32>> probe_log_;
};

}  // namespace mislca
