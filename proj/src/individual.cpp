#include "modlink/individual.hpp"

#include "modlink/kernels.hpp"

namespace modlink {

void Evaluator::evaluate(Individual& ind) {
  const std::size_t patterns = std::size_t{1} << n_bits_;
  auto sweep = kernels::sweep_parity(ind.network, n_bits_, keep_activations_,
                                     kernels::choose_exec(patterns));
  ind.fitness = sweep.fitness();
  ind.outputs = std::move(sweep.outputs);
  if (keep_activations_) {
    ind.activations = std::move(sweep.activations);
  } else {
    ind.activations.reset();
  }
  counter_.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace modlink
