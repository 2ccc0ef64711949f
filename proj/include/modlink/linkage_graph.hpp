#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "modlink/network.hpp"

namespace modlink {

/// Raised when a graph has no edge weight at all (m = 0).
class DegenerateGraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

/// Sparse undirected weighted graph. Each undirected edge is stored once in
/// `edges()`; `neighbors(u)` lists both directions.
class ProximityGraph {
 public:
  struct Neighbor {
    std::size_t vertex;
    double weight;
  };

  ProximityGraph() = default;
  /// Throws std::invalid_argument on out-of-range endpoints, self-loops or
  /// negative / non-finite weights.
  ProximityGraph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return degree_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t u) const {
    return {adjacency_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  /// k_i = sum_j A_ij
  double degree(std::size_t u) const { return degree_[u]; }
  const std::vector<double>& degrees() const noexcept { return degree_; }
  /// m = sum of edge weights, each undirected edge counted once.
  double total_weight() const noexcept { return total_; }

  /// Same structure, every edge weight multiplied by `factor` (>= 0).
  ProximityGraph scaled(double factor) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> degree_;
  double total_ = 0.0;
};

/// Community assignment with dense ids in [0, community_count).
struct Partition {
  std::vector<std::size_t> community_of;
  std::size_t community_count = 0;

  /// Relabels arbitrary labels densely, numbering communities by their
  /// smallest vertex.
  static Partition from_labels(std::span<const std::size_t> labels);
  static Partition singletons(std::size_t n);
  static Partition single_community(std::size_t n);

  std::size_t size() const noexcept { return community_of.size(); }
};

/// Family of subsets of flat weight indices, each used as a crossover mask.
struct Fos {
  std::vector<std::vector<std::size_t>> subsets;

  std::size_t size() const noexcept { return subsets.size(); }
  bool empty() const noexcept { return subsets.empty(); }
};

Fos univariate_fos(std::size_t n);

/// Links every weight into a neuron with every weight out of it, with edge
/// weight |w_in * w_out|. Bias weights count as weights into their neuron.
/// Edges of weight zero are kept, so the edge list depends only on the
/// architecture.
ProximityGraph weight_proximity(const Network& net);

/// Q = 1/(2m) sum_ij (A_ij - k_i k_j / 2m) delta(c_i, c_j).
/// Throws DegenerateGraphError if m = 0, std::invalid_argument on a size
/// mismatch.
double modularity(const ProximityGraph& g, const Partition& p);

/// Edgewise A0 + (m0 / m1) A1. Both graphs must share one edge list
/// (std::invalid_argument otherwise); m1 = 0 raises DegenerateGraphError.
ProximityGraph combine_graphs(const ProximityGraph& g0, const ProximityGraph& g1);

/// Weight-space pairing: rescales net1's weights by sum(w0)/sum(w1), averages
/// with net0 and builds one proximity graph. sum(w1) = 0 raises
/// DegenerateGraphError.
ProximityGraph literal_pair_graph(const Network& net0, const Network& net1);

/// One subset per community, ordered by smallest member.
Fos fos_from_partition(const Partition& p);

/// `u v weight` per line.
void write_edge_list(std::ostream& out, const ProximityGraph& g);

}  // namespace modlink
