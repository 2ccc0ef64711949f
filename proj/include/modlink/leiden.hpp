#pragma once

#include <cstddef>
#include <vector>

#include "modlink/linkage_graph.hpp"
#include "modlink/rng.hpp"

namespace modlink {

struct LeidenOptions {
  /// Refinement picks a merge target with probability proportional to
  /// exp(gain / randomness), gains in edge-weight units. 0 means greedy.
  double randomness = 0.01;
  std::size_t max_iterations = 1000;
};

struct LeidenResult {
  Partition partition;
  /// Modularity after each local-moving phase, then of the returned partition.
  std::vector<double> quality_trace;
  std::size_t iterations = 0;
};

/// Modularity (resolution 1) community detection by the Leiden scheme: fast
/// local moving, refinement into well-connected sub-communities, aggregation
/// on the refined partition, repeated until no node moves. Returned
/// communities are connected through positive-weight edges and numbered by
/// smallest vertex. Throws DegenerateGraphError if m = 0.
LeidenResult leiden(const ProximityGraph& g, Rng& rng, const LeidenOptions& options = {});

inline Partition leiden_partition(const ProximityGraph& g, Rng& rng, const LeidenOptions& options = {}) {
  return leiden(g, rng, options).partition;
}

}  // namespace modlink
