#include "modlink/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "modlink/kernels.hpp"

namespace modlink {

LayerSpec::LayerSpec(std::vector<int> sizes, bool bias) : sizes_(std::move(sizes)), bias_(bias) {
  if (sizes_.size() < 2) throw std::invalid_argument("LayerSpec: need at least two layers");
  for (int s : sizes_) {
    if (s < 1) throw std::invalid_argument("LayerSpec: layer sizes must be >= 1");
  }
  offsets_.resize(sizes_.size());
  offsets_[0] = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_[l + 1] = offsets_[l] + rows(l) * size(l + 1);
  }
}

std::size_t LayerSpec::flat_index(const WeightIndex& w) const {
  if (w.layer + 1 >= layer_count() || w.from >= rows(w.layer) || w.to >= size(w.layer + 1)) {
    throw std::out_of_range("LayerSpec::flat_index: index outside architecture");
  }
  return offsets_[w.layer] + w.from * size(w.layer + 1) + w.to;
}

WeightIndex LayerSpec::weight_index(std::size_t flat) const {
  if (flat >= weight_count()) throw std::out_of_range("LayerSpec::weight_index: flat index too large");
  std::size_t l = 0;
  while (offsets_[l + 1] <= flat) ++l;
  const std::size_t local = flat - offsets_[l];
  return {l, local / size(l + 1), local % size(l + 1)};
}

Network::Network(LayerSpec spec) : spec_(std::move(spec)), weights_(spec_.weight_count(), 0.0) {}

Network::Network(LayerSpec spec, std::vector<double> weights)
    : spec_(std::move(spec)), weights_(std::move(weights)) {
  if (weights_.size() != spec_.weight_count()) {
    throw std::invalid_argument("Network: expected " + std::to_string(spec_.weight_count()) +
                                " weights, got " + std::to_string(weights_.size()));
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("Network: non-finite weight");
  }
}

ActivationTable::ActivationTable(const LayerSpec& spec, std::size_t patterns) : patterns_(patterns) {
  layer_offset_.assign(1, 0);
  for (std::size_t h = 0; h < spec.hidden_layer_count(); ++h) {
    layer_offset_.push_back(layer_offset_.back() + spec.size(h + 1));
  }
  values_.assign(patterns_ * width(), 0.0);
}

Network init_network(const LayerSpec& spec, Rng& rng, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> w(spec.weight_count());
  for (double& x : w) x = normal(rng);
  return Network(spec, std::move(w));
}

ForwardResult forward(const Network& net, std::span<const std::uint8_t> input) {
  const LayerSpec& spec = net.spec();
  if (input.size() != spec.input_size()) {
    throw std::invalid_argument("forward: input has " + std::to_string(input.size()) +
                                " entries, network expects " + std::to_string(spec.input_size()));
  }
  std::vector<double> x(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i] > 1) throw std::invalid_argument("forward: input entries must be 0 or 1");
    x[i] = input[i];
  }

  std::size_t hidden_total = 0;
  for (std::size_t l = 1; l + 1 < spec.layer_count(); ++l) hidden_total += spec.size(l);
  std::vector<double> hidden(hidden_total);
  ForwardResult result;
  result.outputs.resize(spec.output_size());

  std::vector<double> scratch;
  kernels::SummationPlan(net).run(x, hidden, result.outputs, scratch);

  std::size_t pos = 0;
  for (std::size_t l = 1; l + 1 < spec.layer_count(); ++l) {
    result.hidden.emplace_back(hidden.begin() + static_cast<std::ptrdiff_t>(pos),
                               hidden.begin() + static_cast<std::ptrdiff_t>(pos + spec.size(l)));
    pos += spec.size(l);
  }
  return result;
}

std::vector<std::uint8_t> pattern_bits(std::size_t p, int n_bits) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_bits));
  for (int i = 0; i < n_bits; ++i) bits[static_cast<std::size_t>(i)] = (p >> (n_bits - 1 - i)) & 1U;
  return bits;
}

double evaluate_parity(const Network& net, int n_bits) {
  if (static_cast<std::size_t>(n_bits) != net.spec().input_size()) {
    throw std::invalid_argument("evaluate_parity: input layer size differs from n_bits");
  }
  return kernels::sweep_parity(net, n_bits, false, kernels::choose_exec(std::size_t{1} << n_bits)).fitness();
}

ActivationTable record_activations(const Network& net, int n_bits) {
  if (static_cast<std::size_t>(n_bits) != net.spec().input_size()) {
    throw std::invalid_argument("record_activations: input layer size differs from n_bits");
  }
  return kernels::sweep_parity(net, n_bits, true, kernels::choose_exec(std::size_t{1} << n_bits))
      .activations;
}

}  // namespace modlink
