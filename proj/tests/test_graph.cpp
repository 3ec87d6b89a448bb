#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "mislca/graph.hpp"
#include "mislca/oracle.hpp"

using namespace mislca;

TEST_CASE("neighbor_probe returns sorted neighbors and counts every call") {
  Graph path = generate_path(3);  // 0-1-2
  OracleHandle o(path);
  CHECK(o.neighbor_probe(1, 1) == 0);
  CHECK(o.neighbor_probe(0, 2) == kAbsent);
  CHECK(o.probe_count() == 2);

  Graph tri = generate_complete(3);
  OracleHandle ot(tri);
  CHECK(ot.neighbor_probe(2, 2) == 1);

  // Repeated identical probes each count; out-of-range vertex does not.
  OracleHandle o2(path);
  o2.neighbor_probe(1, 1);
  o2.neighbor_probe(1, 1);
  CHECK_THROWS_AS(o2.neighbor_probe(9, 1), input_error);
  CHECK_THROWS_AS(o2.neighbor_probe(0, 0), input_error);
  CHECK(o2.probe_count() == 2);
}

TEST_CASE("probe accounting over a random probe sequence") {
  Graph g = generate_gnp(40, 0.2, 7);
  OracleHandle o(g);
  std::mt19937_64 rng(3);
  u64 k = 0;
  for (int i = 0; i < 500; ++i) {
    o.neighbor_probe(u32(rng() % g.n()), 1 + u32(rng() % (g.max_degree() + 2)));
    ++k;
  }
  CHECK(o.probe_count() == k);
}

TEST_CASE("reveal_neighbors costs degree+1 probes") {
  Graph star = generate_star(6);  // center 0 with 5 leaves
  OracleHandle o(star);
  auto nbrs = o.reveal_neighbors(0);
  CHECK(nbrs == std::vector<u32>{1, 2, 3, 4, 5});
  CHECK(o.probe_count() == 6);

  Graph lone = Graph::from_edges(1, {});
  OracleHandle ol(lone);
  CHECK(ol.reveal_neighbors(0).empty());
  CHECK(ol.probe_count() == 1);

  Graph k4 = generate_complete(4);
  OracleHandle ok(k4);
  CHECK(ok.reveal_neighbors(0) == std::vector<u32>{1, 2, 3});
  CHECK(ok.probe_count() == 4);
}

TEST_CASE("absent iff index exceeds degree") {
  Graph g = generate_gnp(30, 0.15, 11);
  OracleHandle o(g);
  for (u32 v = 0; v < g.n(); ++v)
    for (u32 i = 1; i <= g.max_degree() + 1; ++i)
      CHECK((o.neighbor_probe(v, i) == kAbsent) == (i > g.degree(v)));
}

TEST_CASE("generators produce the expected shapes") {
  Graph c5 = generate_cycle(5);
  for (u32 v = 0; v < 5; ++v) CHECK(c5.degree(v) == 2);

  Graph k4 = generate_complete(4);
  CHECK(k4.m() == 6);
  CHECK(k4.max_degree() == 3);

  Graph grid = generate_grid2d(3, 4);
  CHECK(grid.n() == 12);
  CHECK(grid.m() == 3 * 3 + 2 * 4);
}

TEST_CASE("gnp edge count stays within five standard deviations") {
  // Binomial(C(1000,2), 0.01): mean 4995, sd sqrt(4995*0.99) ~ 70.3.
  Graph g = generate_gnp(1000, 0.01, 42);
  double mean = 4995.0;
  double sd = std::sqrt(499500.0 * 0.01 * 0.99);
  CHECK(double(g.m()) > mean - 5 * sd);
  CHECK(double(g.m()) < mean + 5 * sd);
  CHECK(g.symmetric());

  Graph again = generate_gnp(1000, 0.01, 42);
  CHECK(again.m() == g.m());
  for (u32 v = 0; v < g.n(); ++v) {
    REQUIRE(again.degree(v) == g.degree(v));
    for (u32 i = 0; i < g.degree(v); ++i) CHECK(again.neighbor(v, i) == g.neighbor(v, i));
  }
}

TEST_CASE("d-regular generator yields simple d-regular graphs") {
  for (u64 seed : {1ull, 2ull, 3ull}) {
    Graph g = generate_d_regular(200, 8, seed);
    for (u32 v = 0; v < g.n(); ++v) CHECK(g.degree(v) == 8);
    CHECK(g.symmetric());
  }
  CHECK_THROWS_AS(generate_d_regular(5, 3, 1), input_error);  // odd n*d
  CHECK_THROWS_AS(generate_d_regular(4, 4, 1), input_error);  // d >= n
}

TEST_CASE("edge list parsing and canonical round-trip") {
  {
    std::istringstream in("0 1\n1 2\n");
    Graph g = load_edge_list(in);
    CHECK(g.n() == 3);
    CHECK(g.degree(1) == 2);
  }
  {
    std::istringstream in("0 1\n3 3\n");
    CHECK_THROWS_WITH(load_edge_list(in), Catch::Matchers::ContainsSubstring("line 2"));
  }
  {
    std::istringstream in("0 1\n1 0\n");
    CHECK_THROWS_WITH(load_edge_list(in), Catch::Matchers::ContainsSubstring("duplicate"));
  }
  {
    std::istringstream in("0 1 5\n");
    CHECK_THROWS_AS(load_edge_list(in), input_error);
  }
  {
    // Canonical form round-trips byte-identically.
    Graph g = generate_gnp(200, 0.05, 9);
    std::ostringstream first;
    save_edge_list(g, first);
    std::istringstream back(first.str());
    Graph g2 = load_edge_list(back);
    std::ostringstream second;
    save_edge_list(g2, second);
    CHECK(first.str() == second.str());
    CHECK(g2.n() == g.n());
    CHECK(g2.m() == g.m());
  }
  {
    // Header keeps isolated vertices.
    Graph g = Graph::from_edges(5, {{1, 3}});
    std::ostringstream os;
    save_edge_list(g, os);
    std::istringstream is(os.str());
    CHECK(load_edge_list(is).n() == 5);
  }
}

TEST_CASE("gen spec parsing") {
  GenSpec s = parse_gen_spec("gnp:n=1000,p=0.01,seed=4");
  CHECK(s.kind == "gnp");
  CHECK(s.n == 1000);
  CHECK(s.p == 0.01);
  CHECK(s.has_seed);
  CHECK_THROWS_AS(parse_gen_spec("gnp:n=10,q=2"), input_error);
  CHECK_THROWS_AS(generate_graph(parse_gen_spec("wat:n=3"), 0), input_error);

  Graph g = generate_graph(parse_gen_spec("gnp:n=100,deg=5"), 77);
  CHECK(g.n() == 100);
}
