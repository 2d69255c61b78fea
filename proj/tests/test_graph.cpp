#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "matchdecomp/graph.hpp"
#include "matchdecomp/rng.hpp"

using namespace matchdecomp;
using matchdecomp::testing::make_matching;
using matchdecomp::testing::six_node_demand;
using matchdecomp::testing::six_node_generator;

TEST_CASE("WeightedGraph canonicalizes and validates edges", "[graph]") {
  WeightedGraph g(4, {{2, 0, 1.5}, {1, 3, -0.25}});
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0].u == 0);
  CHECK(g.edges()[0].v == 2);
  CHECK(g.weight(0, 2) == 1.5);
  CHECK(g.weight(2, 0) == 1.5);
  CHECK(g.weight(3, 1) == -0.25);
  CHECK(g.weight(0, 1) == 0.0);

  CHECK_THROWS_AS(WeightedGraph(3, {{0, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedGraph(3, {{0, 3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 0.5}}), std::invalid_argument);
}

TEST_CASE("DemandMatrix enforces substochastic rows", "[graph]") {
  CHECK_NOTHROW(six_node_demand());
  CHECK_THROWS_AS(DemandMatrix(WeightedGraph(3, {{0, 1, 1.1}})), std::invalid_argument);
  // node 1 carries 0.7 + 0.7
  CHECK_THROWS_WITH(DemandMatrix(WeightedGraph(3, {{0, 1, 0.7}, {1, 2, 0.7}})),
                    Catch::Matchers::ContainsSubstring("node 1"));
}

TEST_CASE("build_edge_indexing is lexicographic and stable", "[graph]") {
  WeightedGraph tri(3, {{1, 2, 1.0}, {0, 2, 1.0}, {0, 1, 1.0}});
  EdgeIndexing idx = build_edge_indexing(tri);
  REQUIRE(idx.size() == 3);
  CHECK(idx.key(0) == make_edge_key(0, 1));
  CHECK(idx.key(1) == make_edge_key(0, 2));
  CHECK(idx.key(2) == make_edge_key(1, 2));
  CHECK(idx.index_of(make_edge_key(0, 2)) == 1);

  CHECK(build_edge_indexing(WeightedGraph(5)).size() == 0);
  CHECK(build_edge_indexing(six_node_demand().graph()).size() == 9);
}

TEST_CASE("bitstring_to_subgraph maps set bits to edges", "[graph]") {
  WeightedGraph g(5, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}});
  EdgeIndexing idx = build_edge_indexing(g);

  Bitstring x = {0, 1, 0, 1};
  auto edges = bitstring_to_subgraph(x, idx);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == idx.key(1));
  CHECK(edges[1] == idx.key(3));

  CHECK(bitstring_to_subgraph({0, 0, 0, 0}, idx).empty());

  WeightedGraph tri(3, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}});
  EdgeIndexing tidx = build_edge_indexing(tri);
  auto full = bitstring_to_subgraph({1, 1, 1}, tidx);
  CHECK(full.size() == 3);
  CHECK_FALSE(is_matching(full));

  CHECK_THROWS_AS(bitstring_to_subgraph({1, 0}, idx), std::invalid_argument);
}

TEST_CASE("bitstring round trip is the identity on edge sets", "[graph]") {
  std::mt19937_64 rng = make_rng(7);
  WeightedGraph g(8, {{0, 1, 1}, {0, 5, 1}, {1, 2, 1}, {2, 7, 1}, {3, 4, 1}, {5, 6, 1}});
  EdgeIndexing idx = build_edge_indexing(g);
  for (int rep = 0; rep < 50; ++rep) {
    Bitstring x(idx.size());
    for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1u);
    auto edges = bitstring_to_subgraph(x, idx);
    CHECK(subgraph_to_bitstring(edges, idx) == x);
  }
}

TEST_CASE("is_matching detects shared nodes", "[graph]") {
  CHECK(is_matching({make_edge_key(0, 1), make_edge_key(2, 3)}));
  CHECK_FALSE(is_matching({make_edge_key(0, 1), make_edge_key(1, 2)}));
  CHECK(is_matching(std::vector<EdgeKey>{}));
}

TEST_CASE("Matching construction rejects conflicts", "[graph]") {
  CHECK_THROWS_AS(make_matching({{0, 1}, {1, 2}}), std::invalid_argument);
  Matching m = make_matching({{2, 3}, {0, 1}});
  CHECK(m.size() == 2);
  CHECK(m.edges()[0] == make_edge_key(0, 1));
}

TEST_CASE("approximation_error on the six node example", "[graph]") {
  DemandMatrix d = six_node_demand();

  // Exact reconstruction from the generator entries.
  Decomposition exact;
  exact.entries = six_node_generator();
  CHECK(approximation_error(d, exact) <= 1e-15);

  // Empty decomposition: direct Frobenius sum over the nine entries.
  Decomposition empty;
  double frob = 0.0;
  for (const Edge& e : d.graph().edges()) frob += 2.0 * e.w * e.w;
  const double expected = frob / 36.0;
  CHECK_THAT(approximation_error(d, empty), Catch::Matchers::WithinAbs(expected, 1e-16));
  CHECK_THAT(approximation_error(d, empty), Catch::Matchers::WithinAbs(0.0755555555555556, 1e-13));

  // Dimension mismatch.
  Decomposition bad;
  bad.entries = {{make_matching({{0, 7}}), 0.5}};
  CHECK_THROWS_AS(approximation_error(d, bad), std::invalid_argument);
}

TEST_CASE("approximation_error is permutation invariant and nonnegative", "[graph]") {
  DemandMatrix d = six_node_demand();
  Decomposition a;
  a.entries = six_node_generator();
  Decomposition b;
  b.entries = {a.entries[2], a.entries[0], a.entries[3], a.entries[1]};
  const double ea = approximation_error(d, a);
  const double eb = approximation_error(d, b);
  CHECK_THAT(ea, Catch::Matchers::WithinAbs(eb, 1e-15));

  std::mt19937_64 rng = make_rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Decomposition c;
    c.entries = a.entries;
    std::shuffle(c.entries.begin(), c.entries.end(), rng);
    for (auto& entry : c.entries) entry.weight *= 0.25;  // inexact decomposition
    Decomposition cs;
    cs.entries = c.entries;
    std::shuffle(cs.entries.begin(), cs.entries.end(), rng);
    const double e1 = approximation_error(d, c);
    const double e2 = approximation_error(d, cs);
    CHECK(e1 >= 0.0);
    CHECK_THAT(e1, Catch::Matchers::WithinRel(e2, 1e-12));
  }
}

TEST_CASE("residual_graph subtracts the decomposition", "[graph]") {
  DemandMatrix d = six_node_demand();

  Decomposition empty;
  WeightedGraph r0 = residual_graph(d, empty);
  REQUIRE(r0.edge_count() == d.graph().edge_count());
  for (const Edge& e : d.graph().edges()) CHECK(r0.weight(e.u, e.v) == e.w);

  Decomposition exact;
  exact.entries = six_node_generator();
  WeightedGraph rexact = residual_graph(d, exact);
  for (const Edge& e : rexact.edges()) CHECK(std::abs(e.w) <= 1e-12);

  // Single matching with alpha = 1 covering edge (0,1) of weight 0.4.
  DemandMatrix small(WeightedGraph(2, {{0, 1, 0.4}}));
  Decomposition one;
  one.entries = {{make_matching({{0, 1}}), 1.0}};
  WeightedGraph r = residual_graph(small, one);
  CHECK_THAT(r.weight(0, 1), Catch::Matchers::WithinAbs(-0.6, 1e-15));

  // Symmetry is structural: lookups in either node order agree exactly.
  for (const Edge& e : r.edges()) CHECK(r.weight(e.u, e.v) == r.weight(e.v, e.u));
}

TEST_CASE("matching_weight sums graph weights", "[graph]") {
  DemandMatrix d = six_node_demand();
  CHECK(matching_weight(Matching(), d.graph()) == 0.0);

  Matching best = make_matching({{0, 4}, {2, 5}, {1, 3}});
  CHECK_THAT(matching_weight(best, d.graph()), Catch::Matchers::WithinAbs(1.6, 1e-15));

  WeightedGraph neg(4, {{0, 1, -0.5}, {2, 3, 0.2}});
  CHECK_THAT(matching_weight(make_matching({{0, 1}, {2, 3}}), neg),
             Catch::Matchers::WithinAbs(-0.3, 1e-15));

  // Edges absent from the graph contribute 0.
  CHECK_THAT(matching_weight(make_matching({{0, 2}}), neg), Catch::Matchers::WithinAbs(0.0, 0.0));
}

TEST_CASE("Decomposition length counts strictly positive weights", "[graph]") {
  Decomposition dec;
  dec.entries = six_node_generator();
  CHECK(dec.length() == 4);
  dec.entries[1].weight = 0.0;
  CHECK(dec.length() == 3);
  dec.entries[2].weight = 1e-12;  // below the nonzero cutoff
  CHECK(dec.length() == 2);
  CHECK(dec.weight_sum() <= 1.0 + tolerances::weight_sum_slack);
}
