#pragma once

#include <atomic>
#include <chrono>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mislca/baselines.hpp"
#include "mislca/classify.hpp"
#include "mislca/common.hpp"
#include "mislca/graph.hpp"
#include "mislca/lca.hpp"
#include "mislca/local_ref.hpp"
#include "mislca/report.hpp"
#include "mislca/verify.hpp"

namespace mislca {

struct ExperimentConfig {
  std::string mode;  // lca | global | baseline-rg | baseline-ball | verify | bench | sweep
  std::string gen_spec;    // exactly one of gen_spec / graph_path
  std::string graph_path;
  std::vector<u64> seeds;

  u32 ct = Params::kDefaultCT;
  std::vector<u32> ct_list;  // sweep mode
  double delta = Params::kDefaultDelta;
  std::optional<u32> k_override;

  std::optional<u32> question;
  bool all_questions = false;
  std::optional<u32> sample;
  u64 sample_seed = 0x5eed;

  u64 component_cap = 0;  // 0 = default 10 * Delta^4 * ln n
  u64 ball_budget = 20'000'000;
  bool trace = false;
  bool timings = false;
  u32 threads = 1;

  std::string out_path;
  std::string format = "json";

  void validate() const {
    if (gen_spec.empty() == graph_path.empty())
      throw input_error("exactly one graph source (--gen or --graph) is required");
    if (seeds.empty()) throw input_error("at least one seed is required");
    static const char* modes[] = {"lca", "global", "baseline-rg", "baseline-ball",
                                  "verify", "bench", "sweep"};
    bool ok = false;
    for (const char* m : modes) ok |= mode == m;
    if (!ok) throw input_error("unknown mode: " + mode);
    if (mode == "sweep" && ct_list.empty())
      throw input_error("sweep mode needs --ct with a list of multipliers");
  }
};

namespace detail {

template <typename Fn>
void parallel_for(u64 count, u32 threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (u64 i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<u64> next{0};
  std::vector<std::thread> pool;
  u32 workers = std::min<u64>(threads, count);
  for (u32 w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (u64 i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

inline std::vector<u32> pick_sample(u32 n, u32 k, u64 seed) {
  std::vector<u32> ids(n);
  for (u32 i = 0; i < n; ++i) ids[i] = i;
  std::mt19937_64 rng(seed);
  for (u32 i = 0; i < std::min(k, n); ++i)
    std::swap(ids[i], ids[i + mislca::detail::bounded(rng, n - i)]);
  ids.resize(std::min(k, n));
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace detail

inline Graph make_graph(const ExperimentConfig& cfg, u64 seed) {
  if (!cfg.graph_path.empty()) return load_edge_list(cfg.graph_path);
  return generate_graph(parse_gen_spec(cfg.gen_spec), seed);
}

inline Params make_params(const ExperimentConfig& cfg, const Graph& g, u64 seed) {
  return Params::make(std::max<u32>(g.max_degree(), 1), seed, cfg.ct, cfg.delta,
                      cfg.k_override);
}

// All vertices up to 1e5, else a fixed-seed sample of 1e4; --question and
// --sample override.
inline std::vector<u32> select_questions(const ExperimentConfig& cfg, u32 n) {
  if (cfg.question) {
    if (*cfg.question >= n) throw input_error("question vertex out of range");
    return {*cfg.question};
  }
  if (cfg.sample) return detail::pick_sample(n, *cfg.sample, cfg.sample_seed);
  if (cfg.all_questions || n <= 100'000) {
    std::vector<u32> all(n);
    for (u32 i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  return detail::pick_sample(n, 10'000, cfg.sample_seed);
}

inline ojson outcome_to_json(const Outcome& out) {
  ojson j;
  j["I"] = out.in_set;
  j["dead"] = out.dominated;
  j["residual"] = out.residual;
  ojson pj;
  to_json(pj, out.params);
  j["params"] = pj;
  j["per_round_counts"] =
      ojson{{"joins", std::vector<u64>(out.round_joins.begin() + 1, out.round_joins.end())},
            {"deaths", std::vector<u64>(out.round_deaths.begin() + 1, out.round_deaths.end())},
            {"marked", std::vector<u64>(out.round_marked.begin() + 1, out.round_marked.end())},
            {"sleeping",
             std::vector<u64>(out.round_sleeping.begin() + 1, out.round_sleeping.end())},
            {"active", std::vector<u64>(out.round_active.begin() + 1, out.round_active.end())}};
  return j;
}

inline ojson class_tallies_json(const ClassTable& ct) {
  auto rate = [](u64 ev, u64 pop) { return pop ? double(ev) / double(pop) : 0.0; };
  ojson j;
  j["rounds"] = ct.pop_rounds;
  j["mistaken"] = ojson{{"events", ct.ev_mistaken}, {"rate", rate(ct.ev_mistaken, ct.pop_rounds)}};
  j["wrong_down"] = ojson{{"population", ct.pop_intact_light},
                          {"events", ct.ev_wrong_down},
                          {"rate", rate(ct.ev_wrong_down, ct.pop_intact_light)}};
  j["heavy_halved"] = ojson{{"population", ct.pop_intact_heavy},
                            {"events", ct.ev_heavy_halved},
                            {"rate", rate(ct.ev_heavy_halved, ct.pop_intact_heavy)}};
  j["good1_join"] = ojson{{"population", ct.pop_intact_good1},
                          {"events", ct.ev_good1_joined},
                          {"rate", rate(ct.ev_good1_joined, ct.pop_intact_good1)}};
  j["good2_neighbor_join"] = ojson{{"population", ct.pop_intact_good2},
                                   {"events", ct.ev_good2_neighbor_joined},
                                   {"rate", rate(ct.ev_good2_neighbor_joined, ct.pop_intact_good2)}};
  j["wrong_up"] = ojson{{"population", ct.pop_wrong_up_eligible},
                        {"events", ct.ev_wrong_up},
                        {"rate", rate(ct.ev_wrong_up, ct.pop_wrong_up_eligible)}};
  j["class_counts"] = ojson{{"sleeping", ct.count_class(RoundClass::sleeping)},
                            {"light", ct.count_class(RoundClass::light)},
                            {"moderate", ct.count_class(RoundClass::moderate)},
                            {"heavy", ct.count_class(RoundClass::heavy)}};
  return j;
}

// Component sizes of the residual graph, from a completed global run.
inline std::vector<u32> residual_component_sizes(const Graph& g, const Outcome& out) {
  std::vector<u8> residual(g.n(), 0);
  for (u32 v : out.residual) residual[v] = 1;
  std::vector<u8> seen(g.n(), 0);
  std::vector<u32> sizes;
  std::vector<u32> stack;
  for (u32 s : out.residual) {
    if (seen[s]) continue;
    u32 size = 0;
    stack.push_back(s);
    seen[s] = 1;
    while (!stack.empty()) {
      u32 v = stack.back();
      stack.pop_back();
      ++size;
      for (u32 i = 0; i < g.degree(v); ++i) {
        u32 u = g.neighbor(v, i);
        if (residual[u] && !seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

inline void export_trace_csv(const Graph& g, const Outcome& out, const ClassTable& ct,
                             const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw input_error("cannot open trace file: " + path);
  os << "v,t,exponent,marked,sleeping,dead,joined,d_t,class,flags\n";
  static const char* names[] = {"inactive", "sleeping", "light", "moderate", "heavy"};
  for (u32 v = 0; v < out.n; ++v) {
    for (u32 t = 1; t <= out.T; ++t) {
      NodeRoundState s = out.trace(v, t);
      double d = 0;
      if (out.participates(v, t))
        for (u32 i = 0; i < g.degree(v); ++i) {
          u32 u = g.neighbor(v, i);
          if (out.participates(u, t))
            d += std::ldexp(1.0, -double(out.exponent_at(u, t)));
        }
      os << v << "," << t << "," << s.exponent << "," << int(s.marked) << ","
         << int(s.sleeping) << "," << int(s.dead) << "," << int(s.joined) << "," << d << ","
         << names[int(ct.class_of(v, t))] << "," << int(ct.flags_of(v, t)) << "\n";
    }
  }
}

namespace detail {

struct SharedBatch {
  std::vector<std::pair<u32, bool>> decided;  // vertex -> in MIS (certified region)
  std::vector<Answer> answers;                // per question, shared-cache attribution
  std::vector<u32> component_sizes;           // one entry per distinct component
  u64 cap_aborts = 0;
};

// Shared-cache batch pass: answers every question, decides the certified
// region (questions, dominating witnesses, full residual components).
inline SharedBatch run_shared_batch(const Graph& g, const Params& params,
                                    const std::vector<u32>& questions, u64 cap) {
  SharedBatch res;
  OracleHandle oracle(g);
  QuestionContext ctx(oracle, params);
  std::unordered_map<u32, bool> decided;
  std::unordered_map<u32, u8> comp_seen;  // representative = smallest member
  for (u32 q : questions) {
    u64 before = oracle.probe_count();
    Answer a;
    try {
      a.phase1 = ctx.phase1_status(q);
      switch (a.phase1.kind) {
        case Phase1::in_i:
          a.in_mis = true;
          decided[q] = true;
          break;
        case Phase1::dominated:
          a.in_mis = false;
          decided[q] = false;
          decided[a.phase1.by] = true;
          break;
        case Phase1::residual: {
          auto comp = ctx.residual_component(q, cap);
          a.component_size = u32(comp.size());
          std::vector<std::pair<u32, u32>> edges;
          std::unordered_map<u32, u8> in_comp;
          for (u32 x : comp) in_comp[x] = 1;
          for (u32 x : comp)
            for (u32 u : ctx.revealed_neighbors(x))
              if (x < u && in_comp.count(u)) edges.emplace_back(x, u);
          auto mis = greedy_complete(comp, edges);
          std::unordered_map<u32, u8> in_mis_set;
          for (u32 x : mis) in_mis_set[x] = 1;
          for (u32 x : comp) decided[x] = in_mis_set.count(x) != 0;
          // A residual vertex outside the MIS is covered inside its
          // component; its dominated neighbors' witnesses come from phase 1.
          a.in_mis = in_mis_set.count(q) != 0;
          if (!comp_seen.count(comp.front())) {
            comp_seen[comp.front()] = 1;
            res.component_sizes.push_back(u32(comp.size()));
          }
          break;
        }
      }
    } catch (const component_cap_exceeded&) {
      ++res.cap_aborts;
      a.in_mis = false;
      a.component_size = 0;
    }
    a.probes_used = oracle.probe_count() - before;
    res.answers.push_back(a);
  }
  res.decided.assign(decided.begin(), decided.end());
  std::sort(res.decided.begin(), res.decided.end());
  return res;
}

}  // namespace detail

inline Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Report report;
  {
    ojson c;
    c["mode"] = cfg.mode;
    if (!cfg.gen_spec.empty()) c["gen"] = cfg.gen_spec;
    if (!cfg.graph_path.empty()) c["graph"] = cfg.graph_path;
    c["seeds"] = cfg.seeds;
    c["ct"] = cfg.mode == "sweep" ? ojson(cfg.ct_list) : ojson(cfg.ct);
    c["delta"] = cfg.delta;
    if (cfg.k_override) c["k_override"] = *cfg.k_override;
    report.config = c;
  }

  std::vector<double> agg_residual_fraction;
  std::vector<u64> agg_probe_max;
  u64 agg_cap_aborts = 0;

  for (u64 seed : cfg.seeds) {
    auto started = std::chrono::steady_clock::now();
    Graph g = make_graph(cfg, seed);
    Params params = make_params(cfg, g, seed);
    u64 cap = cfg.component_cap ? cfg.component_cap
                                : default_component_cap(g.max_degree(), g.n());
    ojson run;
    run["n"] = g.n();
    run["m"] = g.m();
    run["max_degree"] = g.max_degree();
    run["T"] = params.T;

    if (cfg.mode == "global" || cfg.mode == "sweep") {
      std::vector<u32> cts = cfg.mode == "sweep" ? cfg.ct_list : std::vector<u32>{cfg.ct};
      ojson ct_results = ojson::array();
      for (u32 ct_val : cts) {
        Params p = Params::make(std::max<u32>(g.max_degree(), 1), seed, ct_val, cfg.delta,
                                cfg.k_override);
        Outcome out = run_reference(g, p);
        ClassTable table = classify_rounds(g, out);
        auto sizes = residual_component_sizes(g, out);
        InfluenceVerdict iv = assert_influence_bounds(out);
        ojson entry;
        entry["ct"] = ct_val;
        entry["mis_size"] = out.in_set.size();
        entry["residual_count"] = out.residual.size();
        entry["residual_fraction"] = g.n() ? double(out.residual.size()) / g.n() : 0.0;
        entry["max_component"] = sizes.empty() ? 0 : sizes.back();
        entry["component_count"] = sizes.size();
        entry["component_cap"] = cap;
        entry["class_tallies"] = class_tallies_json(table);
        if (cfg.mode == "global") {
          entry["outcome"] = outcome_to_json(out);
          ojson hist = ojson::array();
          for (size_t i = 0; i < sizes.size();) {
            size_t j = i;
            while (j < sizes.size() && sizes[j] == sizes[i]) ++j;
            hist.push_back(ojson{{"size", sizes[i]}, {"count", j - i}});
            i = j;
          }
          entry["component_histogram"] = hist;
          if (cfg.trace && !cfg.out_path.empty())
            export_trace_csv(g, out, table,
                             cfg.out_path + ".seed" + std::to_string(seed) + ".trace.csv");
        }
        report.add_verdict(entry, "influence_bounds", iv.pass, iv.reason);
        bool independent = true;
        for (u32 x : out.in_set)
          for (u32 i = 0; i < g.degree(x) && independent; ++i)
            if (out.joined_at[g.neighbor(x, i)] >= 0) independent = false;
        report.add_verdict(entry, "independence", independent, "joined nodes adjacent");
        agg_residual_fraction.push_back(entry["residual_fraction"].get<double>());
        ct_results.push_back(entry);
      }
      if (cfg.mode == "sweep") run["ct_results"] = ct_results;
      else run.update(ct_results[0]);
    } else if (cfg.mode == "lca" || cfg.mode == "bench") {
      auto questions = select_questions(cfg, g.n());
      std::vector<Answer> fresh(questions.size());
      std::atomic<u64> cap_aborts{0};
      LcaOptions lopts{cap};
      detail::parallel_for(questions.size(), cfg.threads, [&](u64 i) {
        try {
          fresh[i] = answer(g, params, questions[i], lopts);
        } catch (const component_cap_exceeded&) {
          ++cap_aborts;
          fresh[i] = Answer{};
          fresh[i].probes_used = 0;
        }
      });
      std::vector<u64> probes;
      u64 in_count = 0, residual_q = 0;
      for (const Answer& a : fresh) {
        probes.push_back(a.probes_used);
        in_count += a.in_mis;
        residual_q += a.phase1.kind == Phase1::residual;
      }
      ProbeStats ps = probe_stats(probes);
      run["questions"] = questions.size();
      run["probes"] = to_json(ps);
      run["answered_in_mis"] = in_count;
      run["residual_questions"] = residual_q;
      run["cap_aborts"] = cap_aborts.load();
      agg_probe_max.push_back(ps.max);
      agg_cap_aborts += cap_aborts.load();

      if (cfg.mode == "lca") {
        auto batch = detail::run_shared_batch(g, params, questions, cap);
        bool identical = batch.answers.size() == fresh.size();
        for (size_t i = 0; identical && i < fresh.size(); ++i)
          identical = batch.answers[i].in_mis == fresh[i].in_mis &&
                      batch.answers[i].phase1 == fresh[i].phase1;
        report.add_verdict(run, "batch_consistency", identical,
                           "batch answers differ from per-question answers");
        std::unordered_map<u32, bool> decided(batch.decided.begin(), batch.decided.end());
        MisVerdict mv = verify_mis_region(g, decided);
        report.add_verdict(run, "region_mis", mv.pass, mv.reason);
        run["certified_vertices"] = batch.decided.size();
        if (!batch.component_sizes.empty()) {
          auto cs = batch.component_sizes;
          std::sort(cs.begin(), cs.end());
          run["max_component"] = cs.back();
          run["component_count"] = cs.size();
        } else {
          run["max_component"] = 0;
          run["component_count"] = 0;
        }
        agg_cap_aborts += batch.cap_aborts;
      }
    } else if (cfg.mode == "baseline-rg") {
      auto questions = select_questions(cfg, g.n());
      std::vector<RgmisAnswer> answers(questions.size());
      detail::parallel_for(questions.size(), cfg.threads,
                           [&](u64 i) { answers[i] = rgmis_answer(g, seed, questions[i]); });
      auto sequential = rgmis_sequential(g, seed);
      bool match = true;
      std::vector<u64> probes;
      for (size_t i = 0; i < questions.size(); ++i) {
        probes.push_back(answers[i].probes_used);
        if (answers[i].in_mis != (sequential[questions[i]] != 0)) match = false;
      }
      report.add_verdict(run, "rgmis_matches_sequential", match,
                         "local simulation disagrees with sequential greedy");
      MisVerdict mv = verify_mis(g, sequential);
      report.add_verdict(run, "rgmis_is_mis", mv.pass, mv.reason);
      ProbeStats ps = probe_stats(probes);
      run["questions"] = questions.size();
      run["probes"] = to_json(ps);
      agg_probe_max.push_back(ps.max);
    } else if (cfg.mode == "baseline-ball") {
      auto questions = select_questions(cfg, g.n());
      std::vector<BallResult> balls(questions.size());
      std::vector<Answer> lca_answers(questions.size());
      BallOptions bopts;
      bopts.probe_budget = cfg.ball_budget;
      detail::parallel_for(questions.size(), cfg.threads, [&](u64 i) {
        balls[i] = ball_simulate_answer(g, params, questions[i], bopts);
        lca_answers[i] = answer(g, params, questions[i], LcaOptions{cap});
      });
      bool match = true;
      u64 refused = 0;
      std::vector<u64> ball_probes, lca_probes;
      for (size_t i = 0; i < questions.size(); ++i) {
        if (balls[i].refused) {
          ++refused;
          continue;
        }
        ball_probes.push_back(balls[i].probes_used);
        lca_probes.push_back(lca_answers[i].probes_used);
        if (balls[i].status != lca_answers[i].phase1) match = false;
      }
      report.add_verdict(run, "ball_matches_lca", match,
                         "ball simulation phase-1 status differs");
      run["questions"] = questions.size();
      run["refused"] = refused;
      run["ball_probes"] = to_json(probe_stats(ball_probes));
      run["lca_probes"] = to_json(probe_stats(lca_probes));
    } else if (cfg.mode == "verify") {
      RunOptions ropts;
      ropts.self_check = true;
      Outcome out = run_reference(g, params, ropts);
      InfluenceVerdict iv = assert_influence_bounds(out);
      report.add_verdict(run, "influence_bounds", iv.pass, iv.reason);

      // Trace equivalence of the per-question simulation against the
      // reference run, on every (v,t) for small graphs, else on a sample.
      OracleHandle oracle(g);
      QuestionContext ctx(oracle, params);
      bool traces_equal = true;
      u64 pairs = u64(g.n()) * params.T;
      if (pairs <= 200'000) {
        for (u32 v = 0; v < g.n() && traces_equal; ++v)
          for (u32 t = 1; t <= params.T && traces_equal; ++t)
            traces_equal = ctx.simulate_node(v, t) == out.trace(v, t);
      } else {
        std::mt19937_64 rng(cfg.sample_seed);
        for (u32 s = 0; s < 2000 && traces_equal; ++s) {
          u32 v = u32(mislca::detail::bounded(rng, g.n()));
          u32 t = 1 + u32(mislca::detail::bounded(rng, params.T));
          traces_equal = ctx.simulate_node(v, t) == out.trace(v, t);
        }
      }
      report.add_verdict(run, "lca_trace_equivalence", traces_equal,
                         "per-question simulation diverged from reference run");

      if (g.n() <= 20'000) {
        auto questions = select_questions(cfg, g.n());
        auto batch = detail::run_shared_batch(g, params, questions, cap);
        std::unordered_map<u32, bool> decided(batch.decided.begin(), batch.decided.end());
        MisVerdict mv = verify_mis_region(g, decided);
        report.add_verdict(run, "lca_region_mis", mv.pass, mv.reason);
        if (questions.size() == g.n() && batch.cap_aborts == 0) {
          std::vector<u8> membership(g.n(), 0);
          for (size_t i = 0; i < questions.size(); ++i)
            membership[questions[i]] = batch.answers[i].in_mis;
          MisVerdict full = verify_mis(g, membership);
          report.add_verdict(run, "lca_full_mis", full.pass, full.reason);
        }
        auto sequential = rgmis_sequential(g, seed);
        bool rg_match = true;
        for (u32 v = 0; v < g.n() && rg_match; ++v)
          rg_match = rgmis_answer(g, seed, v).in_mis == (sequential[v] != 0);
        report.add_verdict(run, "rgmis_matches_sequential", rg_match, "mismatch");
        MisVerdict rgv = verify_mis(g, sequential);
        report.add_verdict(run, "rgmis_is_mis", rgv.pass, rgv.reason);
      }
      if (g.n() <= 512) {
        bool ball_match = true;
        bool any_refused = false;
        for (u32 v = 0; v < g.n() && ball_match; ++v) {
          BallResult b = ball_simulate_answer(g, params, v, BallOptions{cfg.ball_budget, true});
          if (b.refused) {
            any_refused = true;
            break;
          }
          Phase1Status st;
          {
            OracleHandle oh(g);
            QuestionContext qc(oh, params);
            st = qc.phase1_status(v);
          }
          ball_match = b.status == st;
        }
        if (!any_refused)
          report.add_verdict(run, "ball_phase1_match", ball_match,
                             "ball simulation disagrees with lca phase 1");
      }
      run["mis_size"] = out.in_set.size();
      run["residual_fraction"] = g.n() ? double(out.residual.size()) / g.n() : 0.0;
    }

    if (cfg.timings) {
      auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
      run["wall_seconds"] = elapsed.count();
    }
    report.runs.emplace_back(seed, std::move(run));
  }

  ojson agg;
  agg["seeds"] = cfg.seeds.size();
  if (!agg_residual_fraction.empty()) {
    double sum = 0, mx = 0;
    for (double f : agg_residual_fraction) {
      sum += f;
      mx = std::max(mx, f);
    }
    agg["residual_fraction_mean"] = sum / double(agg_residual_fraction.size());
    agg["residual_fraction_max"] = mx;
  }
  if (!agg_probe_max.empty()) {
    u64 mx = 0;
    for (u64 p : agg_probe_max) mx = std::max(mx, p);
    agg["probes_max"] = mx;
  }
  agg["cap_aborts"] = agg_cap_aborts;
  report.aggregate = agg;
  return report;
}

}  // namespace mislca
