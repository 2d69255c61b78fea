#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "matchdecomp/matching.hpp"
#include "matchdecomp/rng.hpp"

using namespace matchdecomp;
using matchdecomp::testing::make_matching;
using matchdecomp::testing::six_node_demand;

namespace {

// Brute-force optimum over all matchings; independent of the blossom path.
double brute_force_max_weight(const WeightedGraph& g) {
  double best = 0.0;
  for (const Matching& m : enumerate_matchings(g, 64))
    best = std::max(best, matching_weight(m, g));
  return best;
}

WeightedGraph random_graph(std::mt19937_64& rng, int max_nodes, double wmin, double wmax) {
  std::uniform_int_distribution<int> nodes(2, max_nodes);
  std::uniform_real_distribution<double> weight(wmin, wmax);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n = nodes(rng);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng) < 0.5) edges.push_back({u, v, weight(rng)});
  return WeightedGraph(n, std::move(edges));
}

}  // namespace

TEST_CASE("max_weight_matching trivial cases", "[matching]") {
  WeightedGraph single(2, {{0, 1, 0.7}});
  auto sol = max_weight_matching(single);
  REQUIRE(sol.matching.size() == 1);
  CHECK(sol.matching.contains(make_edge_key(0, 1)));
  CHECK_THAT(sol.weight, Catch::Matchers::WithinAbs(0.7, 1e-15));

  WeightedGraph allneg(4, {{0, 1, -0.5}, {1, 2, -0.1}, {2, 3, -2.0}});
  auto neg = max_weight_matching(allneg);
  CHECK(neg.matching.empty());
  CHECK(neg.weight == 0.0);

  CHECK(max_weight_matching(WeightedGraph(3)).matching.empty());
}

TEST_CASE("max_weight_matching on the six node example", "[matching]") {
  auto sol = max_weight_matching(six_node_demand().graph());
  CHECK(sol.matching == make_matching({{0, 4}, {1, 3}, {2, 5}}));
  CHECK_THAT(sol.weight, Catch::Matchers::WithinAbs(1.6, 1e-12));
}

TEST_CASE("enumerate_matchings counts", "[matching]") {
  WeightedGraph tri(3, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}});
  CHECK(enumerate_matchings(tri).size() == 4);

  WeightedGraph path(3, {{0, 1, 1}, {1, 2, 1}});
  CHECK(enumerate_matchings(path).size() == 3);

  std::vector<Edge> k4;
  for (NodeId u = 0; u < 4; ++u)
    for (NodeId v = u + 1; v < 4; ++v) k4.push_back({u, v, 1.0});
  CHECK(enumerate_matchings(WeightedGraph(4, k4)).size() == 10);

  std::vector<Edge> big;
  for (NodeId u = 0; u < 26; ++u) big.push_back({u, static_cast<NodeId>(u + 1), 1.0});
  CHECK_THROWS_AS(enumerate_matchings(WeightedGraph(27, big)), std::invalid_argument);
}

TEST_CASE("oracle equivalence on random graphs", "[matching]") {
  std::mt19937_64 rng = make_rng(12345);
  for (int rep = 0; rep < 200; ++rep) {
    WeightedGraph g = random_graph(rng, 10, -1.0, 1.0);
    auto sol = max_weight_matching(g);
    CHECK(is_matching(sol.matching.edges()));
    const double oracle = brute_force_max_weight(g);
    CHECK_THAT(sol.weight, Catch::Matchers::WithinAbs(oracle, 1e-12));
    for (EdgeKey k : sol.matching.edges()) CHECK(g.weight(k) > 0.0);
  }
}

TEST_CASE("oracle equivalence with exact dyadic weights", "[matching]") {
  std::mt19937_64 rng = make_rng(777);
  std::uniform_int_distribution<int> grid(-64, 64);
  for (int rep = 0; rep < 60; ++rep) {
    std::uniform_int_distribution<int> nodes(2, 9);
    const int n = nodes(rng);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (rng() & 1u) edges.push_back({u, v, grid(rng) / 64.0});
    WeightedGraph g(n, std::move(edges));
    auto sol = max_weight_matching(g);
    // Dyadic weights with few terms add exactly in doubles.
    CHECK(sol.weight == brute_force_max_weight(g));
  }
}

TEST_CASE("deterministic lexicographic tie-break", "[matching]") {
  // Two equal-weight single-edge optima: prefer the lex-smaller edge.
  WeightedGraph path(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  CHECK(max_weight_matching(path).matching == make_matching({{0, 1}}));

  // K4 with equal weights: three perfect matchings tie; expect {(0,1),(2,3)}.
  std::vector<Edge> k4;
  for (NodeId u = 0; u < 4; ++u)
    for (NodeId v = u + 1; v < 4; ++v) k4.push_back({u, v, 0.5});
  CHECK(max_weight_matching(WeightedGraph(4, k4)).matching == make_matching({{0, 1}, {2, 3}}));

  // A heavier later edge still wins over the tie-break.
  WeightedGraph path2(3, {{0, 1, 1.0}, {1, 2, 1.5}});
  CHECK(max_weight_matching(path2).matching == make_matching({{1, 2}}));
}

TEST_CASE("scaling equivariance of the argmax", "[matching]") {
  std::mt19937_64 rng = make_rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    WeightedGraph g = random_graph(rng, 8, -1.0, 1.0);
    auto base = max_weight_matching(g);
    for (double c : {0.125, 4.0, 1024.0}) {
      std::vector<Edge> scaled = g.edges();
      for (Edge& e : scaled) e.w *= c;
      auto s = max_weight_matching(WeightedGraph(g.node_count(), scaled));
      CHECK(s.matching == base.matching);
    }
  }
}

TEST_CASE("blossom handles odd cycles and sparse graphs", "[matching]") {
  // 5-cycle with one heavy chord region; forces blossom formation.
  WeightedGraph c5(5, {{0, 1, 2.0}, {1, 2, 2.0}, {2, 3, 2.0}, {3, 4, 2.0}, {0, 4, 2.0}});
  auto sol = max_weight_matching(c5);
  CHECK_THAT(sol.weight, Catch::Matchers::WithinAbs(4.0, 1e-12));
  CHECK(sol.matching.size() == 2);

  std::mt19937_64 rng = make_rng(2024);
  // Sparse graphs shaped like the low-degree lattices used at larger scale.
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_real_distribution<double> weight(-0.2, 1.0);
    std::vector<Edge> edges;
    const int n = 24;
    for (NodeId v = 1; v < n; ++v) {
      std::uniform_int_distribution<NodeId> parent(std::max(0, v - 4), v - 1);
      edges.push_back({parent(rng), v, weight(rng)});
    }
    for (int extra = 0; extra < 4; ++extra) {
      std::uniform_int_distribution<NodeId> pick(0, n - 1);
      NodeId u = pick(rng), v = pick(rng);
      if (u == v) continue;
      Edge e{std::min(u, v), std::max(u, v), weight(rng)};
      bool dup = false;
      for (const Edge& x : edges) dup |= (x.key() == e.key());
      if (!dup) edges.push_back(e);
    }
    WeightedGraph g(n, std::move(edges));
    auto s = max_weight_matching(g);
    CHECK(is_matching(s.matching.edges()));
    CHECK_THAT(s.weight, Catch::Matchers::WithinAbs(brute_force_max_weight(g), 1e-12));
  }
}
