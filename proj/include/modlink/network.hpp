#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "modlink/rng.hpp"

namespace modlink {

/// Position of one connection: from neuron `from` of layer `layer` to neuron
/// `to` of layer `layer + 1`. When the architecture carries biases,
/// `from == sizes[layer]` addresses the bias pseudo-input of neuron `to`.
struct WeightIndex {
  std::size_t layer = 0;
  std::size_t from = 0;
  std::size_t to = 0;

  friend bool operator==(const WeightIndex&, const WeightIndex&) = default;
};

/// Fixed feedforward architecture and the flat weight index map.
///
/// Flat layout is layer-major, then source row, then target column:
/// flat(l, i, j) = offset(l) + i * sizes[l + 1] + j. The bias row of layer l
/// (when present) is the last row, i = sizes[l].
class LayerSpec {
 public:
  LayerSpec() = default;
  /// Throws std::invalid_argument unless there are >= 2 layers, all >= 1.
  explicit LayerSpec(std::vector<int> sizes, bool bias = true);

  const std::vector<int>& sizes() const noexcept { return sizes_; }
  bool has_bias() const noexcept { return bias_; }
  std::size_t layer_count() const noexcept { return sizes_.size(); }
  std::size_t size(std::size_t layer) const { return static_cast<std::size_t>(sizes_[layer]); }
  std::size_t input_size() const { return size(0); }
  std::size_t output_size() const { return size(layer_count() - 1); }
  std::size_t hidden_layer_count() const noexcept { return sizes_.size() - 2; }

  /// Source rows feeding layer + 1 (neurons of `layer` plus the bias row).
  std::size_t rows(std::size_t layer) const { return size(layer) + (bias_ ? 1 : 0); }
  std::size_t offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t weight_count() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }

  std::size_t flat_index(const WeightIndex& w) const;
  WeightIndex weight_index(std::size_t flat) const;

  friend bool operator==(const LayerSpec& a, const LayerSpec& b) {
    return a.sizes_ == b.sizes_ && a.bias_ == b.bias_;
  }

 private:
  std::vector<int> sizes_;
  bool bias_ = true;
  std::vector<std::size_t> offsets_;  // layer_count() entries, last = total
};

class Network {
 public:
  Network() = default;
  /// All-zero network.
  explicit Network(LayerSpec spec);
  /// Throws std::invalid_argument on a count mismatch or a non-finite weight.
  Network(LayerSpec spec, std::vector<double> weights);

  const LayerSpec& spec() const noexcept { return spec_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }
  std::size_t weight_count() const noexcept { return weights_.size(); }

  double weight(const WeightIndex& w) const { return weights_[spec_.flat_index(w)]; }
  double& weight(const WeightIndex& w) { return weights_[spec_.flat_index(w)]; }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  LayerSpec spec_;
  std::vector<double> weights_;
};

/// Hidden-layer activations for every input pattern, patterns in
/// lexicographic bitstring order (pattern p has bit i = (p >> (n-1-i)) & 1).
class ActivationTable {
 public:
  ActivationTable() = default;
  ActivationTable(const LayerSpec& spec, std::size_t patterns);

  std::size_t patterns() const noexcept { return patterns_; }
  std::size_t hidden_layers() const noexcept { return layer_offset_.size() - 1; }
  std::size_t layer_width(std::size_t hidden_layer) const {
    return layer_offset_[hidden_layer + 1] - layer_offset_[hidden_layer];
  }
  /// Total hidden neurons, i.e. the length of one pattern row.
  std::size_t width() const noexcept { return layer_offset_.back(); }

  double at(std::size_t pattern, std::size_t hidden_layer, std::size_t neuron) const {
    return values_[pattern * width() + layer_offset_[hidden_layer] + neuron];
  }
  std::span<double> row(std::size_t pattern) {
    return {values_.data() + pattern * width(), width()};
  }
  std::span<const double> row(std::size_t pattern) const {
    return {values_.data() + pattern * width(), width()};
  }
  std::size_t layer_offset(std::size_t hidden_layer) const { return layer_offset_[hidden_layer]; }

  friend bool operator==(const ActivationTable&, const ActivationTable&) = default;

 private:
  std::size_t patterns_ = 0;
  std::vector<std::size_t> layer_offset_{0};
  std::vector<double> values_;
};

struct ForwardResult {
  std::vector<double> outputs;              // activations of the output layer
  std::vector<std::vector<double>> hidden;  // one vector per hidden layer

  double output() const { return outputs.front(); }
};

/// Every weight i.i.d. Normal(0, sigma^2), drawn in flat index order.
Network init_network(const LayerSpec& spec, Rng& rng, double sigma = 3.0);

/// tanh feedforward pass. Throws std::invalid_argument if
/// input.size() != spec.input_size() or an entry is not 0/1.
///
/// The incoming terms of each neuron are summed in an order that depends only
/// on the multiset of (weight, activation) pairs, so reordering hidden neurons
/// leaves every output bit-identical.
ForwardResult forward(const Network& net, std::span<const std::uint8_t> input);

/// Input bits of pattern `p` for an n-bit problem.
std::vector<std::uint8_t> pattern_bits(std::size_t p, int n_bits);

/// Fraction of all 2^n inputs whose thresholded output (> 0 means 1) matches
/// the parity of the number of ones.
double evaluate_parity(const Network& net, int n_bits);

ActivationTable record_activations(const Network& net, int n_bits);

}  // namespace modlink
