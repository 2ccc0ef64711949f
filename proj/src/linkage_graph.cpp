#include "modlink/linkage_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace modlink {

ProximityGraph::ProximityGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : edges_(std::move(edges)), degree_(vertex_count, 0.0) {
  std::vector<std::size_t> count(vertex_count, 0);
  for (const Edge& e : edges_) {
    if (e.u >= vertex_count || e.v >= vertex_count) {
      throw std::invalid_argument("ProximityGraph: edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("ProximityGraph: self-loops are not supported");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw std::invalid_argument("ProximityGraph: edge weights must be finite and >= 0");
    }
    ++count[e.u];
    ++count[e.v];
    degree_[e.u] += e.weight;
    degree_[e.v] += e.weight;
    total_ += e.weight;
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t u = 0; u < vertex_count; ++u) offsets_[u + 1] = offsets_[u] + count[u];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[e.u]++] = {e.v, e.weight};
    adjacency_[fill[e.v]++] = {e.u, e.weight};
  }
}

ProximityGraph ProximityGraph::scaled(double factor) const {
  std::vector<Edge> edges = edges_;
  for (Edge& e : edges) e.weight *= factor;
  return ProximityGraph(vertex_count(), std::move(edges));
}

Partition Partition::from_labels(std::span<const std::size_t> labels) {
  Partition p;
  p.community_of.resize(labels.size());
  std::vector<std::size_t> seen;  // label -> dense id + 1
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const std::size_t label = labels[v];
    if (label >= seen.size()) seen.resize(label + 1, 0);
    if (seen[label] == 0) seen[label] = ++p.community_count;
    p.community_of[v] = seen[label] - 1;
  }
  return p;
}

Partition Partition::singletons(std::size_t n) {
  Partition p;
  p.community_of.resize(n);
  std::iota(p.community_of.begin(), p.community_of.end(), std::size_t{0});
  p.community_count = n;
  return p;
}

Partition Partition::single_community(std::size_t n) {
  Partition p;
  p.community_of.assign(n, 0);
  p.community_count = n == 0 ? 0 : 1;
  return p;
}

Fos univariate_fos(std::size_t n) {
  Fos fos;
  fos.subsets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) fos.subsets.push_back({i});
  return fos;
}

ProximityGraph weight_proximity(const Network& net) {
  const LayerSpec& spec = net.spec();
  const auto w = net.weights();
  std::vector<Edge> edges;
  for (std::size_t l = 0; l + 2 < spec.layer_count(); ++l) {
    const std::size_t mid = spec.size(l + 1);
    const std::size_t next = spec.size(l + 2);
    for (std::size_t i = 0; i < spec.rows(l); ++i) {
      for (std::size_t j = 0; j < mid; ++j) {
        const std::size_t in = spec.offset(l) + i * mid + j;
        for (std::size_t k = 0; k < next; ++k) {
          const std::size_t out = spec.offset(l + 1) + j * next + k;
          edges.push_back({in, out, std::abs(w[in] * w[out])});
        }
      }
    }
  }
  return ProximityGraph(spec.weight_count(), std::move(edges));
}

double modularity(const ProximityGraph& g, const Partition& p) {
  if (p.size() != g.vertex_count()) throw std::invalid_argument("modularity: partition size mismatch");
  const double m = g.total_weight();
  if (!(m > 0.0)) throw DegenerateGraphError("modularity: graph has zero total edge weight");
  std::vector<double> internal(p.community_count, 0.0);
  std::vector<double> volume(p.community_count, 0.0);
  for (const Edge& e : g.edges()) {
    if (p.community_of[e.u] == p.community_of[e.v]) internal[p.community_of[e.u]] += 2.0 * e.weight;
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) volume[p.community_of[v]] += g.degree(v);
  double q = 0.0;
  for (std::size_t c = 0; c < p.community_count; ++c) {
    const double frac = volume[c] / (2.0 * m);
    q += internal[c] / (2.0 * m) - frac * frac;
  }
  return q;
}

ProximityGraph combine_graphs(const ProximityGraph& g0, const ProximityGraph& g1) {
  if (g0.vertex_count() != g1.vertex_count() || g0.edges().size() != g1.edges().size()) {
    throw std::invalid_argument("combine_graphs: graphs come from different architectures");
  }
  if (!(g1.total_weight() > 0.0)) throw DegenerateGraphError("combine_graphs: second graph has m = 0");
  const double factor = g0.total_weight() / g1.total_weight();
  std::vector<Edge> edges = g0.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& other = g1.edges()[e];
    if (other.u != edges[e].u || other.v != edges[e].v) {
      throw std::invalid_argument("combine_graphs: edge sets differ");
    }
    edges[e].weight += factor * other.weight;
  }
  return ProximityGraph(g0.vertex_count(), std::move(edges));
}

ProximityGraph literal_pair_graph(const Network& net0, const Network& net1) {
  if (!(net0.spec() == net1.spec())) throw std::invalid_argument("literal_pair_graph: architecture mismatch");
  const auto w0 = net0.weights();
  const auto w1 = net1.weights();
  const double s0 = std::accumulate(w0.begin(), w0.end(), 0.0);
  const double s1 = std::accumulate(w1.begin(), w1.end(), 0.0);
  if (s1 == 0.0) throw DegenerateGraphError("literal_pair_graph: second weight vector sums to zero");
  std::vector<double> avg(w0.size());
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = 0.5 * (w0[i] + (s0 / s1) * w1[i]);
  return weight_proximity(Network(net0.spec(), std::move(avg)));
}

Fos fos_from_partition(const Partition& p) {
  // Canonicalize first so community ids follow smallest members.
  const Partition canon = Partition::from_labels(p.community_of);
  Fos fos;
  fos.subsets.resize(canon.community_count);
  for (std::size_t v = 0; v < canon.size(); ++v) fos.subsets[canon.community_of[v]].push_back(v);
  return fos;
}

void write_edge_list(std::ostream& out, const ProximityGraph& g) {
  char buf[64];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << e.u << ' ' << e.v << ' ' << buf << '\n';
  }
}

}  // namespace modlink
