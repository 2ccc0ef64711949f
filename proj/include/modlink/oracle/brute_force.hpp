#pragma once

// Dense, brute-force reference computations. Independent of the sparse
// library paths they are used to check.

#include <cstddef>
#include <vector>

#include "modlink/linkage_graph.hpp"
#include "modlink/rng.hpp"

namespace modlink::oracle {

/// n x n adjacency matrix, row-major.
struct DenseGraph {
  std::size_t n = 0;
  std::vector<double> a;

  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

DenseGraph to_dense(const ProximityGraph& g);

/// Direct double sum (1/2m) sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j].
double dense_modularity(const DenseGraph& g, const std::vector<std::size_t>& labels);

struct Optimum {
  double quality = 0.0;
  std::vector<std::size_t> labels;
  std::size_t partitions_checked = 0;
};

/// Enumerates every set partition (restricted growth strings). n <= 12.
Optimum exhaustive_modularity(const DenseGraph& g);

/// Random spanning tree plus each remaining pair with probability
/// `extra_edge_probability`; weights uniform in (0, 1].
ProximityGraph random_connected_graph(std::size_t n, double extra_edge_probability, Rng& rng);

}  // namespace modlink::oracle
