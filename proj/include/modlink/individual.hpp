#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "modlink/network.hpp"

namespace modlink {

/// A network plus everything cached by its last evaluation.
struct Individual {
  Network network;
  double fitness = 0.0;
  std::vector<double> outputs;                // raw output per input pattern
  std::optional<ActivationTable> activations;  // kept only when requested

  bool evaluated() const noexcept { return !outputs.empty(); }
  /// Drops cached results after the weights changed.
  void invalidate() noexcept {
    outputs.clear();
    activations.reset();
  }
};

using Population = std::vector<Individual>;

/// Parity fitness evaluation with a shared evaluation counter. Every call to
/// evaluate() counts exactly once.
class Evaluator {
 public:
  Evaluator(int n_bits, bool keep_activations) : n_bits_(n_bits), keep_activations_(keep_activations) {}

  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  void evaluate(Individual& ind);

  int n_bits() const noexcept { return n_bits_; }
  bool keeps_activations() const noexcept { return keep_activations_; }
  std::uint64_t evaluations() const noexcept { return counter_.load(std::memory_order_relaxed); }

 private:
  int n_bits_;
  bool keep_activations_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace modlink
