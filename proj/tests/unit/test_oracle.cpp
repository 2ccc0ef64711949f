#include <functional>

#include "doctest.h"
#include "helpers.hpp"
#include "modlink/oracle/brute_force.hpp"

using namespace modlink;

TEST_SUITE("oracle") {
  TEST_CASE("set partitions are counted by Bell numbers") {
    const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
    Rng rng(1);
    for (std::size_t n = 2; n <= 8; ++n) {
      const auto g = oracle::to_dense(oracle::random_connected_graph(n, 0.5, rng));
      CHECK(oracle::exhaustive_modularity(g).partitions_checked == bell[n]);
    }
  }

  TEST_CASE("random graphs are connected with weights in (0, 1]") {
    Rng rng(2);
    for (int k = 0; k < 30; ++k) {
      const ProximityGraph g = oracle::random_connected_graph(9, 0.2, rng);
      CHECK(g.edges().size() >= 8);
      for (const Edge& e : g.edges()) {
        CHECK(e.weight > 0.0);
        CHECK(e.weight <= 1.0);
      }
      std::vector<std::size_t> comp(9);
      for (std::size_t i = 0; i < 9; ++i) comp[i] = i;
      std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
      for (const Edge& e : g.edges()) comp[find(e.u)] = find(e.v);
      for (std::size_t i = 1; i < 9; ++i) CHECK(find(i) == find(0));
    }
  }

  TEST_CASE("optimum of two triangles") {
    const ProximityGraph g(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
    const auto best = oracle::exhaustive_modularity(oracle::to_dense(g));
    CHECK(best.quality == doctest::Approx(0.5));
    CHECK(best.labels == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  }
}
