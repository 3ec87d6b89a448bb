#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mislca/common.hpp"

namespace mislca {

// Immutable undirected simple graph with sorted adjacency lists.
// Construct via from_edges(), a generator, or load_edge_list().
class Graph {
 public:
  Graph() = default;

  static Graph from_edges(u32 n, std::vector<std::pair<u32, u32>> edges) {
    Graph g;
    g.n_ = n;
    std::vector<std::vector<u32>> adj(n);
    for (auto& [a, b] : edges) {
      if (a >= n || b >= n) throw input_error("edge endpoint out of range");
      if (a == b) throw input_error("self-loop");
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    g.offset_.assign(n + 1, 0);
    for (u32 v = 0; v < n; ++v) {
      auto& lst = adj[v];
      std::sort(lst.begin(), lst.end());
      if (std::adjacent_find(lst.begin(), lst.end()) != lst.end())
        throw input_error("duplicate edge");
      g.offset_[v + 1] = g.offset_[v] + u64(lst.size());
      g.max_degree_ = std::max<u32>(g.max_degree_, u32(lst.size()));
    }
    g.neighbors_.reserve(g.offset_[n]);
    for (u32 v = 0; v < n; ++v)
      g.neighbors_.insert(g.neighbors_.end(), adj[v].begin(), adj[v].end());
    return g;
  }

  u32 n() const { return n_; }
  u64 m() const { return neighbors_.size() / 2; }
  u32 max_degree() const { return max_degree_; }

  u32 degree(u32 v) const { return u32(offset_[v + 1] - offset_[v]); }

  // Strictly ascending neighbor list of v.
  const u32* adj(u32 v) const { return neighbors_.data() + offset_[v]; }

  u32 neighbor(u32 v, u32 idx) const { return neighbors_[offset_[v] + idx]; }

  bool has_edge(u32 u, u32 v) const {
    const u32* b = adj(u);
    const u32* e = b + degree(u);
    return std::binary_search(b, e, v);
  }

  // Index of w in adj(v), or degree(v) if absent.
  u32 adj_index(u32 v, u32 w) const {
    const u32* b = adj(v);
    const u32* e = b + degree(v);
    const u32* it = std::lower_bound(b, e, w);
    return (it != e && *it == w) ? u32(it - b) : degree(v);
  }

  bool symmetric() const {
    for (u32 v = 0; v < n_; ++v)
      for (u32 i = 0; i < degree(v); ++i)
        if (!has_edge(neighbor(v, i), v)) return false;
    return true;
  }

 private:
  u32 n_ = 0;
  u32 max_degree_ = 0;
  std::vector<u64> offset_;
  std::vector<u32> neighbors_;
};

namespace detail {

// mt19937_64 is fully specified by the standard, so generated graphs are
// reproducible across platforms. Bounded draws avoid std::uniform_int_distribution,
// whose output is implementation-defined.
inline u64 bounded(std::mt19937_64& rng, u64 n) {
  // Multiply-shift; bias is irrelevant here, determinism is what matters.
  return u64((u128(rng()) * n) >> 64);
}

}  // namespace detail

inline Graph generate_cycle(u32 n) {
  if (n < 3) throw input_error("cycle requires n >= 3");
  std::vector<std::pair<u32, u32>> e;
  for (u32 v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return Graph::from_edges(n, std::move(e));
}

inline Graph generate_path(u32 n) {
  if (n < 1) throw input_error("path requires n >= 1");
  std::vector<std::pair<u32, u32>> e;
  for (u32 v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return Graph::from_edges(n, std::move(e));
}

inline Graph generate_complete(u32 n) {
  if (n < 1) throw input_error("complete requires n >= 1");
  std::vector<std::pair<u32, u32>> e;
  for (u32 v = 0; v < n; ++v)
    for (u32 w = v + 1; w < n; ++w) e.emplace_back(v, w);
  return Graph::from_edges(n, std::move(e));
}

// Vertex 0 is the center.
inline Graph generate_star(u32 n) {
  if (n < 1) throw input_error("star requires n >= 1");
  std::vector<std::pair<u32, u32>> e;
  for (u32 v = 1; v < n; ++v) e.emplace_back(0, v);
  return Graph::from_edges(n, std::move(e));
}

inline Graph generate_grid2d(u32 rows, u32 cols) {
  if (rows < 1 || cols < 1) throw input_error("grid2d requires rows, cols >= 1");
  std::vector<std::pair<u32, u32>> e;
  auto id = [cols](u32 r, u32 c) { return r * cols + c; };
  for (u32 r = 0; r < rows; ++r)
    for (u32 c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
    }
  return Graph::from_edges(rows * cols, std::move(e));
}

// G(n, p) via geometric jumps over the linearized pair sequence.
inline Graph generate_gnp(u32 n, double p, u64 seed) {
  if (n < 1) throw input_error("gnp requires n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw input_error("gnp requires p in [0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<u32, u32>> e;
  if (p > 0.0) {
    const double log1mp = std::log1p(-p);
    u64 total = u64(n) * (n - 1) / 2;
    u64 pos = 0;
    bool full = p >= 1.0;
    while (pos < total) {
      if (!full) {
        double r = double(rng() >> 11) * 0x1.0p-53;  // uniform in [0, 1)
        u64 skip = u64(std::floor(std::log1p(-r * (1.0 - std::exp(log1mp))) / log1mp));
        pos += skip;
        if (pos >= total) break;
      }
      // invert linear index -> (u, v), u < v
      u64 k = pos;
      u32 u = 0;
      u64 row = n - 1;
      while (k >= row) {
        k -= row;
        --row;
        ++u;
      }
      e.emplace_back(u, u32(u + 1 + k));
      ++pos;
    }
  }
  return Graph::from_edges(n, std::move(e));
}

// Random d-regular simple graph: stub pairing followed by edge-swap repair.
inline Graph generate_d_regular(u32 n, u32 d, u64 seed) {
  if (d >= n) throw input_error("d-regular requires d < n");
  if ((u64(n) * d) % 2 != 0) throw input_error("d-regular requires n*d even");
  std::mt19937_64 rng(seed);
  const u64 stubs = u64(n) * d;

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<u32> perm(stubs);
    for (u64 i = 0; i < stubs; ++i) perm[i] = u32(i / d);
    for (u64 i = stubs; i > 1; --i)
      std::swap(perm[i - 1], perm[detail::bounded(rng, i)]);

    std::vector<std::pair<u32, u32>> edges(stubs / 2);
    for (u64 i = 0; i < stubs / 2; ++i) {
      u32 a = perm[2 * i], b = perm[2 * i + 1];
      edges[i] = {std::min(a, b), std::max(a, b)};
    }
    auto count_multi = [](std::vector<std::pair<u32, u32>> es) {
      std::sort(es.begin(), es.end());
      u64 bad = 0;
      for (u64 i = 0; i < es.size(); ++i)
        if (i + 1 < es.size() && es[i] == es[i + 1]) ++bad;
      return bad;
    };
    auto is_bad = [&](u64 i) {
      if (edges[i].first == edges[i].second) return true;
      for (u64 j = 0; j < edges.size(); ++j)
        if (j != i && edges[j] == edges[i]) return true;
      return false;
    };
    // Swap endpoints between a defective edge and a random partner until simple.
    u64 budget = 200 * stubs;
    bool ok = false;
    for (u64 iter = 0; iter < budget; ++iter) {
      u64 bad_idx = edges.size();
      for (u64 i = 0; i < edges.size(); ++i)
        if (is_bad(i)) {
          bad_idx = i;
          break;
        }
      if (bad_idx == edges.size()) {
        ok = true;
        break;
      }
      u64 other = detail::bounded(rng, edges.size());
      if (other == bad_idx) continue;
      auto [a, b] = edges[bad_idx];
      auto [c, dd] = edges[other];
      std::pair<u32, u32> e1{std::min(a, c), std::max(a, c)};
      std::pair<u32, u32> e2{std::min(b, dd), std::max(b, dd)};
      if (e1.first == e1.second || e2.first == e2.second) continue;
      auto old1 = edges[bad_idx], old2 = edges[other];
      edges[bad_idx] = e1;
      edges[other] = e2;
      if (is_bad(bad_idx) || is_bad(other)) {
        edges[bad_idx] = old1;
        edges[other] = old2;
      }
    }
    if (ok && count_multi(edges) == 0) return Graph::from_edges(n, std::move(edges));
  }
  throw input_error("d-regular generation failed to produce a simple graph");
}

struct GenSpec {
  std::string kind;  // cycle, path, complete, star, d_regular_random, gnp, grid2d
  u32 n = 0;
  u32 d = 0;
  u32 rows = 0, cols = 0;
  double p = -1.0;
  double deg = -1.0;  // gnp convenience: p = deg/(n-1)
  bool has_seed = false;
  u64 seed = 0;
};

inline Graph generate_graph(const GenSpec& s, u64 default_seed) {
  u64 seed = s.has_seed ? s.seed : default_seed;
  if (s.kind == "cycle") return generate_cycle(s.n);
  if (s.kind == "path") return generate_path(s.n);
  if (s.kind == "complete") return generate_complete(s.n);
  if (s.kind == "star") return generate_star(s.n);
  if (s.kind == "grid2d") return generate_grid2d(s.rows, s.cols);
  if (s.kind == "gnp") {
    double p = s.p;
    if (p < 0.0) {
      if (s.deg < 0.0) throw input_error("gnp needs p=... or deg=...");
      if (s.n < 2) throw input_error("gnp with deg= needs n >= 2");
      p = s.deg / double(s.n - 1);
    }
    return generate_gnp(s.n, p, seed);
  }
  if (s.kind == "d_regular_random" || s.kind == "dreg")
    return generate_d_regular(s.n, s.d, seed);
  throw input_error("unknown generator kind: " + s.kind);
}

// Parses "kind:key=value,key=value" (e.g. "gnp:n=1000,p=0.01").
inline GenSpec parse_gen_spec(const std::string& text) {
  GenSpec s;
  auto colon = text.find(':');
  s.kind = text.substr(0, colon);
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw input_error("bad generator parameter: " + item);
      std::string key = item.substr(0, eq);
      std::string val = item.substr(eq + 1);
      try {
        if (key == "n") s.n = u32(std::stoul(val));
        else if (key == "d") s.d = u32(std::stoul(val));
        else if (key == "rows") s.rows = u32(std::stoul(val));
        else if (key == "cols") s.cols = u32(std::stoul(val));
        else if (key == "p") s.p = std::stod(val);
        else if (key == "deg") s.deg = std::stod(val);
        else if (key == "seed") { s.seed = std::stoull(val); s.has_seed = true; }
        else throw input_error("unknown generator parameter: " + key);
      } catch (const std::logic_error&) {
        throw input_error("bad value for generator parameter " + key + ": " + val);
      }
    }
  }
  return s;
}

// Edge-list text format: optional "# n <N>" header, then one edge per line,
// smaller id first, lines sorted lexicographically. save_edge_list always
// writes the canonical form; load accepts edges in any order but rejects
// self-loops and duplicates.
inline Graph load_edge_list(std::istream& in) {
  std::vector<std::pair<u32, u32>> edges;
  std::string line;
  u64 line_no = 0;
  u32 n = 0;
  bool n_from_header = false;
  std::vector<std::pair<u64, std::pair<u32, u32>>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      if (hs >> word && word == "n") {
        u64 hn;
        if (hs >> hn) {
          n = u32(hn);
          n_from_header = true;
        }
      }
      continue;
    }
    std::istringstream ls(line);
    u64 a, b;
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra)) {
      throw input_error("edge list parse error at line " + std::to_string(line_no) +
                        ": expected two vertex ids");
    }
    if (a == b)
      throw input_error("edge list parse error at line " + std::to_string(line_no) +
                        ": self-loop");
    auto e = std::pair<u32, u32>{u32(std::min(a, b)), u32(std::max(a, b))};
    seen.push_back({line_no, e});
    edges.push_back(e);
  }
  std::sort(seen.begin(), seen.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
  for (size_t i = 0; i + 1 < seen.size(); ++i)
    if (seen[i].second == seen[i + 1].second)
      throw input_error("edge list parse error at line " +
                        std::to_string(std::max(seen[i].first, seen[i + 1].first)) +
                        ": duplicate edge");
  u32 max_id = 0;
  for (auto& [a, b] : edges) max_id = std::max(max_id, b);
  if (!n_from_header) n = edges.empty() ? 0 : max_id + 1;
  if (n_from_header && !edges.empty() && max_id >= n)
    throw input_error("edge list: vertex id exceeds declared n");
  return Graph::from_edges(n, std::move(edges));
}

inline Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open graph file: " + path);
  return load_edge_list(in);
}

inline void save_edge_list(const Graph& g, std::ostream& out) {
  std::vector<std::string> lines;
  for (u32 v = 0; v < g.n(); ++v)
    for (u32 i = 0; i < g.degree(v); ++i) {
      u32 w = g.neighbor(v, i);
      if (v < w) lines.push_back(std::to_string(v) + " " + std::to_string(w));
    }
  std::sort(lines.begin(), lines.end());
  out << "# n " << g.n() << "\n";
  for (auto& l : lines) out << l << "\n";
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open output file: " + path);
  save_edge_list(g, out);
}

}  // namespace mislca
