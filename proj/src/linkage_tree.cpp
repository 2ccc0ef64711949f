#include "modlink/linkage_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace modlink {

MiMatrix pairwise_mi(kernels::RowsView samples) {
  if (samples.rows < 3) throw std::invalid_argument("pairwise_mi: need at least 3 samples");
  MiMatrix mi;
  mi.size = samples.cols;
  mi.values = kernels::gaussian_mutual_information(
      samples, kernels::choose_exec(samples.cols * samples.cols * samples.rows / 2, 1 << 20));
  return mi;
}

MiMatrix pairwise_mi(const Population& pop) {
  if (pop.size() < 3) throw std::invalid_argument("pairwise_mi: need at least 3 individuals");
  const std::size_t l = pop.front().network.weight_count();
  std::vector<double> data;
  data.reserve(pop.size() * l);
  for (const Individual& ind : pop) {
    const auto w = ind.network.weights();
    data.insert(data.end(), w.begin(), w.end());
  }
  return pairwise_mi(kernels::RowsView{data, pop.size(), l});
}

Fos LinkageTreeFos::traversal(std::size_t max_subset_size) const {
  Fos fos;
  if (nodes.empty()) return fos;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (max_subset_size == 0 || nodes[i].size() <= max_subset_size) fos.subsets.push_back(nodes[i]);
  }
  return fos;
}

LinkageTreeFos build_linkage_tree(const MiMatrix& mi) {
  const std::size_t l = mi.size;
  LinkageTreeFos tree;
  if (l == 0) return tree;
  const std::size_t total = 2 * l - 1;
  tree.nodes.reserve(total);
  tree.children.reserve(total);
  for (std::size_t i = 0; i < l; ++i) {
    tree.nodes.push_back({i});
    tree.children.emplace_back(LinkageTreeFos::npos, LinkageTreeFos::npos);
  }

  // Similarity between node ids; only active pairs are meaningful.
  std::vector<double> sim(total * total, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) sim[i * total + j] = mi.at(i, j);
  }
  // Active clusters kept ordered by smallest member.
  std::vector<std::size_t> active(l);
  for (std::size_t i = 0; i < l; ++i) active[i] = i;

  while (active.size() > 1) {
    std::size_t best_p = 0;
    std::size_t best_q = 1;
    double best = sim[active[0] * total + active[1]];
    for (std::size_t p = 0; p < active.size(); ++p) {
      const double* row = sim.data() + active[p] * total;
      for (std::size_t q = p + 1; q < active.size(); ++q) {
        if (row[active[q]] > best) {
          best = row[active[q]];
          best_p = p;
          best_q = q;
        }
      }
    }
    const std::size_t a = active[best_p];
    const std::size_t b = active[best_q];
    const std::size_t merged = tree.nodes.size();
    std::vector<std::size_t> members = tree.nodes[a];
    members.insert(members.end(), tree.nodes[b].begin(), tree.nodes[b].end());
    std::sort(members.begin(), members.end());
    const double wa = static_cast<double>(tree.nodes[a].size());
    const double wb = static_cast<double>(tree.nodes[b].size());
    tree.nodes.push_back(std::move(members));
    tree.children.emplace_back(a, b);

    for (std::size_t c : active) {
      if (c == a || c == b) continue;
      const double s = (wa * sim[a * total + c] + wb * sim[b * total + c]) / (wa + wb);
      sim[merged * total + c] = s;
      sim[c * total + merged] = s;
    }
    active[best_p] = merged;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_q));
  }
  return tree;
}

}  // namespace modlink
