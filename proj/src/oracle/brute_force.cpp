#include "modlink/oracle/brute_force.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace modlink::oracle {

DenseGraph to_dense(const ProximityGraph& g) {
  DenseGraph d;
  d.n = g.vertex_count();
  d.a.assign(d.n * d.n, 0.0);
  for (const Edge& e : g.edges()) {
    d.a[e.u * d.n + e.v] += e.weight;
    d.a[e.v * d.n + e.u] += e.weight;
  }
  return d;
}

double dense_modularity(const DenseGraph& g, const std::vector<std::size_t>& labels) {
  std::vector<double> k(g.n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) k[i] += g.at(i, j);
    two_m += k[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) {
      if (labels[i] == labels[j]) q += g.at(i, j) - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

Optimum exhaustive_modularity(const DenseGraph& g) {
  if (g.n == 0 || g.n > 12) throw std::invalid_argument("exhaustive_modularity: need 1 <= n <= 12");
  Optimum best;
  best.quality = -std::numeric_limits<double>::infinity();
  // Restricted growth string: rgs[0] = 0, rgs[i] <= max(rgs[0..i)) + 1.
  std::vector<std::size_t> rgs(g.n, 0);
  std::vector<std::size_t> prefix_max(g.n, 0);
  while (true) {
    ++best.partitions_checked;
    const double q = dense_modularity(g, rgs);
    if (q > best.quality) {
      best.quality = q;
      best.labels = rgs;
    }
    // Advance to the next string.
    std::size_t i = g.n - 1;
    while (i > 0 && rgs[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < g.n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }
  return best;
}

ProximityGraph random_connected_graph(std::size_t n, double extra_edge_probability, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto weight = [&] { return 1.0 - unit(rng); };  // (0, 1]
  std::vector<std::vector<bool>> linked(n, std::vector<bool>(n, false));
  std::vector<Edge> edges;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t parent = order[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)];
    const std::size_t u = std::min(parent, order[i]);
    const std::size_t v = std::max(parent, order[i]);
    linked[u][v] = true;
    edges.push_back({u, v, weight()});
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (!linked[u][v] && unit(rng) < extra_edge_probability) edges.push_back({u, v, weight()});
    }
  }
  return ProximityGraph(n, std::move(edges));
}

}  // namespace modlink::oracle
