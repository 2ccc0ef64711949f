#include "modlink/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "modlink/kernels.hpp"

namespace modlink {

double population_cosine_similarity(const Population& pop) {
  if (pop.size() < 2) throw std::invalid_argument("population_cosine_similarity: need >= 2 individuals");
  const std::size_t l = pop.front().network.weight_count();
  std::vector<double> data;
  data.reserve(pop.size() * l);
  for (const Individual& ind : pop) {
    const auto w = ind.network.weights();
    data.insert(data.end(), w.begin(), w.end());
  }
  const std::size_t pairs = pop.size() * (pop.size() - 1) / 2;
  return kernels::mean_pairwise_cosine(kernels::RowsView{data, pop.size(), l},
                                       kernels::choose_exec(pairs * l, 1 << 18));
}

double behavior_difference(const Individual& a, const Individual& b) {
  if (!a.evaluated() || !b.evaluated()) throw std::invalid_argument("behavior_difference: unevaluated individual");
  if (a.outputs.size() != b.outputs.size()) throw std::invalid_argument("behavior_difference: output count differs");
  double sum = 0.0;
  for (std::size_t p = 0; p < a.outputs.size(); ++p) sum += std::abs(a.outputs[p] - b.outputs[p]);
  return sum / static_cast<double>(a.outputs.size());
}

double behavior_difference(const Network& a, const Network& b, int n_bits) {
  if (!(a.spec() == b.spec())) throw std::invalid_argument("behavior_difference: architectures differ");
  const auto exec = kernels::choose_exec(std::size_t{1} << n_bits);
  Individual ia{a, 0.0, kernels::sweep_parity(a, n_bits, false, exec).outputs, std::nullopt};
  Individual ib{b, 0.0, kernels::sweep_parity(b, n_bits, false, exec).outputs, std::nullopt};
  return behavior_difference(ia, ib);
}

double parent_child_diff(const Individual& child, const Individual& p0, const Individual& p1) {
  return 0.5 * (behavior_difference(child, p0) + behavior_difference(child, p1));
}

}  // namespace modlink
