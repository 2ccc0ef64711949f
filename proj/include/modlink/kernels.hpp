#pragma once

// Data-parallel inner loops. Each kernel has a serial reference path and an
// OpenMP path; both produce bit-identical results (per-item work is
// independent and reductions are combined in a fixed order).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "modlink/network.hpp"

namespace modlink::kernels {

enum class Exec { serial, parallel };

/// Serial when already inside a parallel region, when only one thread is
/// available, or when `work_items` is below `min_parallel_items`.
Exec choose_exec(std::size_t work_items, std::size_t min_parallel_items = 512);

/// Canonical per-neuron summation order for one network: incoming terms sorted
/// by weight. Neurons whose fan-in has duplicate weights fall back to sorting
/// (weight, activation) pairs per pattern.
class SummationPlan {
 public:
  explicit SummationPlan(const Network& net);

  const LayerSpec& spec() const noexcept { return spec_; }

  /// Forward pass for one input vector. `hidden` receives all hidden
  /// activations concatenated (may be empty to skip), `outputs` the output
  /// layer. `scratch` is reused across calls.
  void run(std::span<const double> input, std::span<double> hidden, std::span<double> outputs,
           std::vector<double>& scratch) const;

 private:
  struct Layer {
    std::vector<std::uint32_t> source;  // rows(l) entries per target neuron
    std::vector<double> weight;
    std::vector<std::uint8_t> tied;     // one flag per target neuron
  };
  LayerSpec spec_;
  std::vector<Layer> layers_;
  std::size_t max_width_ = 0;
};

struct ParitySweep {
  std::vector<double> outputs;  // raw output per pattern
  ActivationTable activations;  // empty unless requested
  std::size_t correct = 0;

  double fitness() const {
    return outputs.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(outputs.size());
  }
};

/// Runs every n-bit pattern through `net`.
ParitySweep sweep_parity(const Network& net, int n_bits, bool keep_activations, Exec exec);

/// Row-major matrix view: `rows` vectors of length `cols`.
struct RowsView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

/// Mean of cos(row_i, row_j) over all unordered pairs; a pair with a
/// zero-norm row contributes 0.
double mean_pairwise_cosine(RowsView rows, Exec exec);

/// Gaussian mutual information between columns, -0.5 ln(1 - rho^2) with
/// |rho| clamped to 1 - 1e-12; zero-variance columns have rho = 0. Returns a
/// cols x cols row-major matrix with a zero diagonal.
std::vector<double> gaussian_mutual_information(RowsView rows, Exec exec);

}  // namespace modlink::kernels
