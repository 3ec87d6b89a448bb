#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mislca/experiment.hpp"

namespace {

std::vector<mislca::u64> parse_seed_list(const std::string& text) {
  std::vector<mislca::u64> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  return seeds;
}

std::vector<mislca::u32> parse_ct_list(const std::string& text) {
  std::vector<mislca::u32> cts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) cts.push_back(mislca::u32(std::stoul(item)));
  return cts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mis-lca: query-efficient local computation of a maximal independent set.\n"
      "Runs a round-synchronous reference simulator, a per-vertex LCA that\n"
      "reproduces it exactly, greedy completion of residual components, and\n"
      "baselines, with machine-readable reports."};

  std::string mode, gen, graph_path, seed_text, ct_text = "8", out_path, format = "json";
  double delta = mislca::Params::kDefaultDelta;
  int k_override = -1;
  int question = -1, sample = -1;
  bool all = false, trace = false, timings = false;
  mislca::u64 cap = 0, ball_budget = 20'000'000;
  unsigned threads = 1;

  app.add_option("--mode", mode,
                 "lca | global | baseline-rg | baseline-ball | verify | bench | sweep")
      ->required();
  app.add_option("--gen", gen, "generator spec, e.g. gnp:n=1000,p=0.01 or dreg:n=20000,d=16");
  app.add_option("--graph", graph_path, "edge-list file");
  app.add_option("--seed", seed_text, "comma-separated master seeds")->required();
  app.add_option("--ct", ct_text, "T multiplier; a comma list in sweep mode");
  app.add_option("--delta", delta, "delta constant in (0, 0.01]");
  app.add_option("--k-override", k_override, "override the sleep-threshold constant K");
  app.add_option("--question", question, "single question vertex");
  app.add_flag("--all", all, "question every vertex");
  app.add_option("--sample", sample, "question a fixed-seed sample of this size");
  app.add_option("--cap", cap, "residual component cap (0 = 10*Delta^4*ln n)");
  app.add_option("--ball-budget", ball_budget, "probe budget for the ball baseline");
  app.add_option("--out", out_path, "report path ('-' for stdout)")->required();
  app.add_option("--format", format, "json | csv");
  app.add_flag("--trace", trace, "export per-(node,round) trace CSV (global mode)");
  app.add_flag("--timings", timings, "include wall-clock timings in the report");
  app.add_option("--threads", threads, "worker threads for per-question modes");

  CLI11_PARSE(app, argc, argv);

  try {
    mislca::ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.gen_spec = gen;
    cfg.graph_path = graph_path;
    cfg.seeds = parse_seed_list(seed_text);
    auto cts = parse_ct_list(ct_text);
    if (cts.empty()) throw mislca::input_error("--ct needs at least one value");
    if (mode == "sweep") cfg.ct_list = cts;
    else if (cts.size() == 1) cfg.ct = cts[0];
    else throw mislca::input_error("--ct accepts a list only in sweep mode");
    cfg.delta = delta;
    if (k_override >= 0) cfg.k_override = mislca::u32(k_override);
    if (question >= 0) cfg.question = mislca::u32(question);
    cfg.all_questions = all;
    if (sample >= 0) cfg.sample = mislca::u32(sample);
    cfg.component_cap = cap;
    cfg.ball_budget = ball_budget;
    cfg.trace = trace;
    cfg.timings = timings;
    cfg.threads = threads;
    cfg.out_path = out_path == "-" ? "" : out_path;
    cfg.format = format;

    mislca::Report report = mislca::run_experiment(cfg);
    if (out_path == "-") mislca::emit_report(report, format, std::cout);
    else mislca::emit_report(report, format, out_path);

    if (!report.all_pass) {
      std::cerr << "mis-lca: at least one verdict failed\n";
      return 1;
    }
    return 0;
  } catch (const mislca::input_error& e) {
    std::cerr << "mis-lca: input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mis-lca: error: " << e.what() << "\n";
    return 1;
  }
}
