#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "treegm/graph.hpp"

using namespace treegm;

TEST_CASE("pair indexing walks the lower triangle row by row") {
  CHECK(pair_index(1, 0) == 0);
  CHECK(pair_index(2, 0) == 1);
  CHECK(pair_index(2, 1) == 2);
  CHECK(pair_index(3, 0) == 3);
  CHECK(pair_index(0, 3) == 3);  // order of arguments must not matter
  CHECK(pair_count(5) == 10);
  for (int idx = 0; idx < pair_count(7); ++idx) {
    auto [u, v] = pair_from_index(idx);
    CHECK(u < v);
    CHECK(pair_index(u, v) == idx);
  }
  CHECK_THROWS_AS(pair_index(3, 3), validation_error);
}

TEST_CASE("bit patterns fingerprint edge sets") {
  BitPattern a(6), b(6);
  CHECK(a == b);
  a.set(pair_index(4, 2));
  CHECK(a.test(pair_index(2, 4)));
  CHECK(a.count() == 1);
  CHECK(a != b);
  b.flip(pair_index(4, 2));
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  b.reset(pair_index(4, 2));
  CHECK(b.count() == 0);
}

TEST_CASE("graph edge bookkeeping is canonical and validated") {
  LabeledGraph g(4);
  g.add_edge(3, 1);
  g.add_edge(0, 2);
  CHECK(g.has_edge(1, 3));
  CHECK(g.has_edge(3, 1));
  CHECK_FALSE(g.has_edge(0, 1));
  CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 2}, {1, 3}});
  CHECK_THROWS_AS(g.add_edge(1, 3), validation_error);
  CHECK_THROWS_AS(g.add_edge(2, 2), validation_error);
  CHECK_THROWS_AS(g.add_edge(0, 4), validation_error);
  CHECK_THROWS_AS(g.remove_edge(0, 1), validation_error);
  g.remove_edge(1, 3);
  CHECK(g.edge_count() == 1);

  auto back = LabeledGraph::from_bits(4, LabeledGraph(4, {{0, 2}}).bits());
  CHECK(back == LabeledGraph(4, {{0, 2}}));
}

TEST_CASE("forest and tree predicates") {
  CHECK(is_forest(LabeledGraph(1)));
  CHECK(is_forest(LabeledGraph(5, {{0, 1}, {2, 3}})));
  CHECK_FALSE(is_forest(LabeledGraph(3, {{0, 1}, {1, 2}, {0, 2}})));
  CHECK(is_tree(chain_graph(4)));
  CHECK(is_tree(star_graph(6)));
  CHECK_FALSE(is_tree(LabeledGraph(4, {{0, 1}, {2, 3}})));  // too few edges
  CHECK_FALSE(is_tree(LabeledGraph(3, {{0, 1}})));
  CHECK(component_count(LabeledGraph(5, {{0, 1}, {2, 3}})) == 3);
  CHECK(is_connected(complete_graph(4)));
  auto labels = component_labels(LabeledGraph(5, {{1, 4}, {2, 3}}));
  CHECK(labels == std::vector<int>{0, 1, 2, 2, 1});
}

TEST_CASE("prufer coding matches the hand examples") {
  CHECK(prufer_decode({1, 2}, 4) == chain_graph(4));
  CHECK(prufer_encode(chain_graph(4)) == PruferSequence{1, 2});
  CHECK(prufer_encode(star_graph(5)) == PruferSequence{0, 0, 0});
  CHECK(prufer_decode({0, 0, 0}, 5) == star_graph(5));
  CHECK(prufer_decode({}, 2) == LabeledGraph(2, {{0, 1}}));

  CHECK_THROWS_AS(prufer_decode({0, 5}, 4), validation_error);
  CHECK_THROWS_AS(prufer_decode({0}, 4), validation_error);
  CHECK_THROWS_AS(prufer_encode(LabeledGraph(3, {{0, 1}})), validation_error);
}

TEST_CASE("prufer coding is a bijection at p = 5") {
  std::set<BitPattern> seen;
  PruferSequence seq(3, 0);
  int total = 0;
  while (true) {
    auto t = prufer_decode(seq, 5);
    REQUIRE(is_tree(t));
    CHECK(prufer_encode(t) == seq);
    auto bits = t.bits();
    CHECK(seen.insert(bits).second);
    ++total;
    int i = 2;
    while (i >= 0 && seq[i] == 4) seq[i--] = 0;
    if (i < 0) break;
    ++seq[i];
  }
  CHECK(total == 125);
}

TEST_CASE("tree enumeration hits the Cayley counts") {
  CHECK(enumerate_trees(2).size() == 1);
  CHECK(enumerate_trees(4).size() == 16);
  CHECK(enumerate_trees(6).size() == 1296);
  CHECK_THROWS_AS(enumerate_trees(1), validation_error);
  CHECK_THROWS_AS(enumerate_trees(9), validation_error);

  // distinctness at p = 6
  std::set<BitPattern> seen;
  for_each_tree(6, [&](const LabeledGraph& t) {
    REQUIRE(is_tree(t));
    CHECK(seen.insert(t.bits()).second);
  });
  CHECK(seen.size() == 1296);
}

TEST_CASE("forest enumeration counts 1, 2, 7, 38, 291, 2932") {
  const std::size_t expected[] = {1, 2, 7, 38, 291, 2932};
  for (int p = 1; p <= 6; ++p) {
    std::size_t n = 0;
    std::set<BitPattern> seen;
    for_each_forest(p, [&](const LabeledGraph& g) {
      REQUIRE(is_forest(g));
      CHECK(seen.insert(g.bits()).second);
      ++n;
    });
    CHECK(n == expected[p - 1]);
  }
  CHECK_THROWS_AS(enumerate_forests(7), validation_error);
}

TEST_CASE("degree sequence realizability") {
  CHECK(erdos_gallai_check({1, 1}));
  CHECK(erdos_gallai_check({3, 3, 3, 3}));
  CHECK_FALSE(erdos_gallai_check({2, 2, 0}));
  CHECK_FALSE(erdos_gallai_check({3, 1}));          // odd sum
  CHECK(erdos_gallai_check({}));
  CHECK(erdos_gallai_check({0, 0, 0}));
  CHECK_THROWS_AS(erdos_gallai_check({1, 2}), validation_error);
  CHECK_THROWS_AS(erdos_gallai_check({2, -1}), validation_error);

  // every tree's degree sequence is realizable
  for_each_tree(5, [&](const LabeledGraph& t) {
    auto d = t.degrees();
    std::sort(d.rbegin(), d.rend());
    CHECK(erdos_gallai_check(d));
  });
}
