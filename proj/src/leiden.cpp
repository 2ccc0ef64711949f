#include "modlink/leiden.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace modlink {
namespace {

// Aggregated graph. Neighbor lists exclude self-loops; self_loop[v] holds
// sum_{a,b in v} A_ab so that degree[v] = sum of neighbor weights + self_loop[v].
struct WorkGraph {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> target;
  std::vector<double> weight;
  std::vector<double> self_loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t begin(std::size_t v) const { return offsets[v]; }
  std::size_t end(std::size_t v) const { return offsets[v + 1]; }
};

WorkGraph from_proximity(const ProximityGraph& g) {
  WorkGraph w;
  w.n = g.vertex_count();
  w.offsets.assign(w.n + 1, 0);
  for (std::size_t v = 0; v < w.n; ++v) w.offsets[v + 1] = w.offsets[v] + g.neighbors(v).size();
  w.target.reserve(w.offsets.back());
  w.weight.reserve(w.offsets.back());
  for (std::size_t v = 0; v < w.n; ++v) {
    for (const auto& nb : g.neighbors(v)) {
      w.target.push_back(nb.vertex);
      w.weight.push_back(nb.weight);
    }
  }
  w.self_loop.assign(w.n, 0.0);
  w.degree = g.degrees();
  w.two_m = 2.0 * g.total_weight();
  return w;
}

// Collapses each group of `group_of` into one node.
WorkGraph aggregate(const WorkGraph& g, const std::vector<std::size_t>& group_of, std::size_t groups) {
  std::vector<std::vector<std::size_t>> members(groups);
  for (std::size_t v = 0; v < g.n; ++v) members[group_of[v]].push_back(v);

  WorkGraph a;
  a.n = groups;
  a.offsets.assign(groups + 1, 0);
  a.self_loop.assign(groups, 0.0);
  a.degree.assign(groups, 0.0);
  a.two_m = g.two_m;

  std::vector<double> acc(groups, 0.0);
  std::vector<std::uint8_t> listed(groups, 0);
  std::vector<std::size_t> touched;
  for (std::size_t r = 0; r < groups; ++r) {
    touched.clear();
    for (std::size_t v : members[r]) {
      a.self_loop[r] += g.self_loop[v];
      a.degree[r] += g.degree[v];
      for (std::size_t e = g.begin(v); e < g.end(v); ++e) {
        const std::size_t s = group_of[g.target[e]];
        if (s == r) {
          a.self_loop[r] += g.weight[e];
          continue;
        }
        if (!listed[s]) {
          listed[s] = 1;
          touched.push_back(s);
        }
        acc[s] += g.weight[e];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t s : touched) {
      a.target.push_back(s);
      a.weight.push_back(acc[s]);
      acc[s] = 0.0;
      listed[s] = 0;
    }
    a.offsets[r + 1] = a.target.size();
  }
  return a;
}

std::size_t relabel(std::vector<std::size_t>& labels) {
  std::vector<std::size_t> map(labels.size(), labels.size());
  std::size_t next = 0;
  for (std::size_t& c : labels) {
    if (map[c] == labels.size()) map[c] = next++;
    c = map[c];
  }
  return next;
}

class LeidenRun {
 public:
  LeidenRun(Rng& rng, const LeidenOptions& options) : rng_(rng), options_(options) {}

  // Fast local moving. Returns true if any node changed community.
  bool move_nodes(const WorkGraph& g, std::vector<std::size_t>& comm) {
    const double eps = 1e-13 * g.two_m;
    std::vector<double> volume(g.n, 0.0);
    std::vector<std::size_t> members(g.n, 0);
    for (std::size_t v = 0; v < g.n; ++v) {
      volume[comm[v]] += g.degree[v];
      ++members[comm[v]];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < g.n; ++c) {
      if (members[c] == 0) empty.push_back(c);
    }

    std::vector<std::size_t> order(g.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng_);
    std::deque<std::size_t> queue(order.begin(), order.end());
    std::vector<std::uint8_t> queued(g.n, 1);

    std::vector<double> link(g.n, 0.0);
    std::vector<std::uint8_t> listed(g.n, 0);
    std::vector<std::size_t> touched;
    bool moved = false;

    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      queued[v] = 0;

      const std::size_t old = comm[v];
      const double kv = g.degree[v];
      volume[old] -= kv;
      if (--members[old] == 0) empty.push_back(old);

      touched.clear();
      for (std::size_t e = g.begin(v); e < g.end(v); ++e) {
        const std::size_t c = comm[g.target[e]];
        if (!listed[c]) {
          listed[c] = 1;
          touched.push_back(c);
        }
        link[c] += g.weight[e];
      }

      std::size_t best = old;
      double best_gain = link[old] - kv * volume[old] / g.two_m;
      for (std::size_t c : touched) {
        const double gain = link[c] - kv * volume[c] / g.two_m;
        if (gain > best_gain + eps) {
          best = c;
          best_gain = gain;
        }
      }
      if (best_gain < -eps) {
        // Stale entries (refilled since being pushed) are skipped lazily.
        while (members[empty.back()] != 0) empty.pop_back();
        best = empty.back();
      }
      for (std::size_t c : touched) {
        link[c] = 0.0;
        listed[c] = 0;
      }

      comm[v] = best;
      volume[best] += kv;
      ++members[best];

      if (best != old) {
        moved = true;
        for (std::size_t e = g.begin(v); e < g.end(v); ++e) {
          const std::size_t u = g.target[e];
          if (!queued[u] && comm[u] != best) {
            queued[u] = 1;
            queue.push_back(u);
          }
        }
      }
    }
    relabel(comm);
    return moved;
  }

  // Merges nodes within each community of `comm` into well-connected
  // sub-communities. Returns refined labels (not densified).
  std::vector<std::size_t> refine(const WorkGraph& g, const std::vector<std::size_t>& comm,
                                  std::size_t community_count) {
    std::vector<std::size_t> refined(g.n);
    std::iota(refined.begin(), refined.end(), std::size_t{0});
    std::vector<double> volume(g.degree);        // per refined cluster
    std::vector<double> external(g.n, 0.0);      // edge weight to rest of its community
    std::vector<std::uint8_t> singleton(g.n, 1);

    std::vector<std::vector<std::size_t>> groups(community_count);
    for (std::size_t v = 0; v < g.n; ++v) groups[comm[v]].push_back(v);

    std::vector<double> link(g.n, 0.0);
    std::vector<std::uint8_t> listed(g.n, 0);
    std::vector<std::size_t> touched;
    std::vector<double> weights;

    for (auto& group : groups) {
      if (group.size() < 2) continue;
      const std::size_t c = comm[group.front()];
      double group_volume = 0.0;
      for (std::size_t v : group) {
        group_volume += g.degree[v];
        double inside = 0.0;
        for (std::size_t e = g.begin(v); e < g.end(v); ++e) {
          if (comm[g.target[e]] == c) inside += g.weight[e];
        }
        external[v] = inside;
      }
      auto well_connected = [&](double ext, double vol) {
        return ext >= vol * (group_volume - vol) / g.two_m;
      };

      std::shuffle(group.begin(), group.end(), rng_);
      for (std::size_t v : group) {
        if (!singleton[v] || !well_connected(external[v], g.degree[v])) continue;
        const double kv = g.degree[v];
        volume[v] = 0.0;
        external[v] = 0.0;

        touched.clear();
        touched.push_back(v);
        listed[v] = 1;
        double to_rest = 0.0;
        for (std::size_t e = g.begin(v); e < g.end(v); ++e) {
          const std::size_t u = g.target[e];
          if (comm[u] != c) continue;
          to_rest += g.weight[e];
          const std::size_t r = refined[u];
          if (!listed[r]) {
            listed[r] = 1;
            touched.push_back(r);
          }
          link[r] += g.weight[e];
        }

        std::size_t chosen = v;
        double max_gain = 0.0;
        weights.assign(touched.size(), -1.0);
        for (std::size_t t = 0; t < touched.size(); ++t) {
          const std::size_t r = touched[t];
          if (!well_connected(external[r], volume[r])) continue;
          const double gain = link[r] - kv * volume[r] / g.two_m;
          if (gain < 0.0) continue;
          weights[t] = gain;
          if (gain > max_gain) {
            max_gain = gain;
            chosen = r;
          }
        }
        if (options_.randomness > 0.0) {
          double total = 0.0;
          for (double& w : weights) {
            w = w < 0.0 ? 0.0 : std::exp((w - max_gain) / options_.randomness);
            total += w;
          }
          double pick = std::uniform_real_distribution<double>(0.0, total)(rng_);
          for (std::size_t t = 0; t < touched.size(); ++t) {
            if (weights[t] <= 0.0) continue;
            chosen = touched[t];
            pick -= weights[t];
            if (pick < 0.0) break;
          }
        }

        refined[v] = chosen;
        volume[chosen] += kv;
        external[chosen] += to_rest - 2.0 * link[chosen];
        if (chosen != v) singleton[chosen] = 0;
        singleton[v] = 0;

        for (std::size_t r : touched) {
          link[r] = 0.0;
          listed[r] = 0;
        }
      }
    }
    return refined;
  }

 private:
  Rng& rng_;
  const LeidenOptions& options_;
};

// Splits every community into its positive-weight connected components.
void split_disconnected(const ProximityGraph& g, std::vector<std::size_t>& comm) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> label(n, n);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    label[s] = next;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (nb.weight > 0.0 && label[nb.vertex] == n && comm[nb.vertex] == comm[v]) {
          label[nb.vertex] = next;
          stack.push_back(nb.vertex);
        }
      }
    }
    ++next;
  }
  comm = std::move(label);
}

}  // namespace

LeidenResult leiden(const ProximityGraph& g, Rng& rng, const LeidenOptions& options) {
  if (!(g.total_weight() > 0.0)) throw DegenerateGraphError("leiden: graph has zero total edge weight");

  LeidenRun run(rng, options);
  LeidenResult result;
  WorkGraph work = from_proximity(g);
  std::vector<std::size_t> comm(work.n);
  std::iota(comm.begin(), comm.end(), std::size_t{0});
  std::vector<std::size_t> node_of(g.vertex_count());  // original vertex -> aggregate node
  std::iota(node_of.begin(), node_of.end(), std::size_t{0});

  auto flat = [&] {
    std::vector<std::size_t> labels(node_of.size());
    for (std::size_t v = 0; v < labels.size(); ++v) labels[v] = comm[node_of[v]];
    return labels;
  };

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    ++result.iterations;
    run.move_nodes(work, comm);
    const std::size_t communities = *std::max_element(comm.begin(), comm.end()) + 1;
    result.quality_trace.push_back(modularity(g, Partition::from_labels(flat())));
    if (communities == work.n) break;

    std::vector<std::size_t> refined = run.refine(work, comm, communities);
    std::size_t refined_count = relabel(refined);
    if (refined_count == work.n) {
      // No merge happened; aggregate on the unrefined partition instead.
      refined = comm;
      refined_count = communities;
    }
    std::vector<std::size_t> next_comm(refined_count);
    for (std::size_t v = 0; v < work.n; ++v) next_comm[refined[v]] = comm[v];
    work = aggregate(work, refined, refined_count);
    for (std::size_t& node : node_of) node = refined[node];
    comm = std::move(next_comm);
  }

  std::vector<std::size_t> labels = flat();
  split_disconnected(g, labels);
  result.partition = Partition::from_labels(labels);
  result.quality_trace.push_back(modularity(g, result.partition));
  return result;
}

}  // namespace modlink
