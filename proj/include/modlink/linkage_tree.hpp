#pragma once

#include <cstddef>
#include <vector>

#include "modlink/individual.hpp"
#include "modlink/kernels.hpp"
#include "modlink/linkage_graph.hpp"

namespace modlink {

/// Symmetric pairwise mutual information between weight positions.
struct MiMatrix {
  std::size_t size = 0;
  std::vector<double> values;  // size x size, row-major, zero diagonal

  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

/// Gaussian MI estimate from the Pearson correlation of each pair of weight
/// positions across the population. Throws std::invalid_argument for fewer
/// than 3 individuals.
MiMatrix pairwise_mi(const Population& pop);
MiMatrix pairwise_mi(kernels::RowsView samples);

/// Binary merge tree over weight positions.
struct LinkageTreeFos {
  /// All 2l - 1 nodes: the l leaves in index order, then merged nodes in
  /// merge order. The last node is the root.
  std::vector<std::vector<std::size_t>> nodes;
  /// Child node ids per node; {npos, npos} for leaves.
  std::vector<std::pair<std::size_t, std::size_t>> children;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Every node except the root, in node order, optionally dropping subsets
  /// larger than `max_subset_size` (0 = keep all).
  Fos traversal(std::size_t max_subset_size = 0) const;
};

/// Average-linkage agglomerative clustering on MI similarity. Each step merges
/// the most similar pair of clusters; ties go to the pair whose smallest
/// members come first.
LinkageTreeFos build_linkage_tree(const MiMatrix& mi);

}  // namespace modlink
