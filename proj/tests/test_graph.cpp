#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mfstab/errors.hpp"
#include "mfstab/graph.hpp"

using namespace mfstab;

TEST_CASE("generators have the expected degrees") {
  const Graph c = cycle_graph(6);
  CHECK(c.edges().size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(c.degree(i) == 2);
  CHECK(path_graph(5).edges().size() == 4);
  CHECK(star_graph(5).degree(0) == 4);
  CHECK(star_graph(5).degree(3) == 1);
  CHECK(complete_graph(5).edges().size() == 10);
  CHECK(empty_graph(4).edges().empty());
}

TEST_CASE("build merges duplicates and rejects bad edges") {
  const std::vector<Edge> dup = {{0, 1}, {1, 0}, {1, 2}};
  const Graph g = Graph::build(3, dup);
  CHECK(g.edges().size() == 2);
  CHECK(g.adjacent(1, 0));
  const std::vector<Edge> loop = {{1, 1}};
  CHECK_THROWS_AS(Graph::build(3, loop), InvalidInput);
  const std::vector<Edge> far = {{0, 3}};
  CHECK_THROWS_AS(Graph::build(3, far), InvalidInput);
}

TEST_CASE("edge list round trip") {
  std::istringstream in("# comment\n0 1\n\n1 2\n2 0\n");
  const Graph g = read_edge_list(in);
  CHECK(g.size() == 3);
  CHECK(g.edges().size() == 3);
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream back(out.str());
  CHECK(read_edge_list(back, 3).edges() == g.edges());
  std::istringstream bad("0 x\n");
  CHECK_THROWS_AS(read_edge_list(bad), InvalidInput);
}

TEST_CASE("erdos renyi is reproducible") {
  const Graph a = erdos_renyi_graph(30, 0.2, 42);
  const Graph b = erdos_renyi_graph(30, 0.2, 42);
  CHECK(a.edges() == b.edges());
  CHECK(erdos_renyi_graph(10, 0.0, 1).edges().empty());
  CHECK(erdos_renyi_graph(10, 1.0, 1).edges().size() == 45);
}

TEST_CASE("one-hop receptive fields and sparsity") {
  const auto rf = ReceptiveFieldMap::one_hop(cycle_graph(16));
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(rf.cardinality(i) == 3);
    CHECK(rf.contains(i, i));
    CHECK(rf.sparsity(i) == doctest::Approx(3.0 / 16.0));
  }
  CHECK(rf.contains(0, 15));
  CHECK_FALSE(rf.contains(0, 2));
  const auto s = sparsity_stats(rf);
  CHECK(s.d_bar == doctest::Approx(3.0));
  CHECK(s.sup_d == doctest::Approx(s.inf_d));

  const auto star = sparsity_stats(ReceptiveFieldMap::one_hop(star_graph(5)));
  CHECK(star.sup_d == doctest::Approx(1.0));
  CHECK(star.inf_d == doctest::Approx(0.4));
}

TEST_CASE("explicit fields are validated") {
  CHECK_NOTHROW(ReceptiveFieldMap::from_sets({{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(ReceptiveFieldMap::from_sets({{1}, {1}}), InvalidInput);
  CHECK_THROWS_AS(ReceptiveFieldMap::from_sets({{0, 1}, {1}}), InvalidInput);
  CHECK_THROWS_AS(ReceptiveFieldMap::from_sets({{0, 2}, {1}}), InvalidInput);
}

TEST_CASE("truncation is nested and symmetric") {
  const auto rf = ReceptiveFieldMap::one_hop(complete_graph(8));
  for (std::size_t r = 1; r <= 8; ++r) {
    const auto t = rf.truncated(r);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(t.contains(i, i));
      for (std::size_t j = 0; j < 8; ++j) {
        CHECK(t.contains(i, j) == t.contains(j, i));
        CHECK(t.contains(i, j) == (static_cast<std::size_t>(i > j ? i - j : j - i) < r));
        if (r > 1 && rf.truncated(r - 1).contains(i, j)) CHECK(t.contains(i, j));
      }
    }
  }
  CHECK(rf.truncated(1).max_sparsity() == doctest::Approx(1.0 / 8.0));
}
