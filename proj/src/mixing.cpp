#include "modlink/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace modlink {

double cross_rate(std::size_t subset_size, std::size_t total) {
  if (total == 0) throw std::invalid_argument("cross_rate: total must be positive");
  if (subset_size > total) throw std::invalid_argument("cross_rate: subset larger than total");
  return static_cast<double>(std::min(subset_size, total - subset_size)) / static_cast<double>(total);
}

Individual cross_with_mask(const Individual& p0, const Individual& p1, std::span<const std::size_t> subset) {
  if (!(p0.network.spec() == p1.network.spec())) {
    throw std::invalid_argument("cross_with_mask: parents have different architectures");
  }
  Individual child;
  child.network = p0.network;
  auto dst = child.network.weights();
  const auto src = p1.network.weights();
  for (std::size_t i : subset) {
    if (i >= dst.size()) {
      throw std::out_of_range("cross_with_mask: index " + std::to_string(i) + " out of range");
    }
    dst[i] = src[i];
  }
  return child;
}

namespace {

std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

template <typename DonorFn>
std::pair<Individual, MixingStats> optimal_mixing(const Individual& p0, const Fos& fos, Evaluator& evaluator,
                                                  Rng& rng, DonorFn&& donor) {
  MixingStats stats;
  Individual working = p0;
  const std::size_t total = p0.network.weight_count();
  for (std::size_t idx : shuffled_order(fos.size(), rng)) {
    const auto& subset = fos.subsets[idx];
    const Individual& p1 = donor();
    Individual candidate = cross_with_mask(working, p1, subset);
    evaluator.evaluate(candidate);
    ++stats.evaluations_used;
    if (candidate.fitness > working.fitness) {
      working = std::move(candidate);
      stats.accepted_masks.push_back({subset, cross_rate(subset.size(), total)});
      stats.final_improved = true;
    }
  }
  return {std::move(working), std::move(stats)};
}

}  // namespace

std::pair<Individual, MixingStats> rom(const Individual& p0, const Individual& p1, const Fos& fos,
                                       Evaluator& evaluator, Rng& rng) {
  return optimal_mixing(p0, fos, evaluator, rng, [&]() -> const Individual& { return p1; });
}

std::pair<Individual, MixingStats> gom(const Individual& p0, const Population& pop, std::size_t p0_index,
                                       const Fos& fos, Evaluator& evaluator, Rng& rng) {
  const bool member = p0_index < pop.size();
  const std::size_t donors = pop.size() - (member ? 1 : 0);
  if (donors == 0) throw std::invalid_argument("gom: population has no donor besides p0");
  return optimal_mixing(p0, fos, evaluator, rng, [&]() -> const Individual& {
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, donors - 1)(rng);
    if (member && pick >= p0_index) ++pick;
    return pop[pick];
  });
}

NeuronPermutation match_neurons(const ActivationTable& recipient, const ActivationTable& donor) {
  if (recipient.patterns() != donor.patterns() || recipient.width() != donor.width() ||
      recipient.hidden_layers() != donor.hidden_layers()) {
    throw std::invalid_argument("match_neurons: activation tables differ in shape");
  }
  NeuronPermutation perm;
  const std::size_t patterns = recipient.patterns();
  for (std::size_t h = 0; h < recipient.hidden_layers(); ++h) {
    const std::size_t width = recipient.layer_width(h);
    // distance[j * width + i] = sum_p |a0(p, i) - a1(p, j)|
    std::vector<double> distance(width * width, 0.0);
    for (std::size_t p = 0; p < patterns; ++p) {
      const auto a0 = recipient.row(p).subspan(recipient.layer_offset(h), width);
      const auto a1 = donor.row(p).subspan(donor.layer_offset(h), width);
      for (std::size_t j = 0; j < width; ++j) {
        for (std::size_t i = 0; i < width; ++i) distance[j * width + i] += std::abs(a0[i] - a1[j]);
      }
    }
    std::vector<std::uint8_t> taken(width, 0);
    std::vector<std::size_t> position(width);
    for (std::size_t j = 0; j < width; ++j) {
      std::size_t best = width;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < width; ++i) {
        if (taken[i]) continue;
        if (best == width || distance[j * width + i] < best_d) {
          best = i;
          best_d = distance[j * width + i];
        }
      }
      taken[best] = 1;
      position[j] = best;
    }
    perm.position.push_back(std::move(position));
  }
  return perm;
}

Network apply_permutation(const Network& net, const NeuronPermutation& perm) {
  const LayerSpec& spec = net.spec();
  if (perm.position.size() != spec.hidden_layer_count()) {
    throw std::invalid_argument("apply_permutation: one permutation per hidden layer required");
  }
  std::vector<double> w(net.weights().begin(), net.weights().end());
  for (std::size_t h = 0; h < perm.position.size(); ++h) {
    const std::size_t l = h + 1;  // layer being permuted
    const auto& pos = perm.position[h];
    if (pos.size() != spec.size(l)) throw std::invalid_argument("apply_permutation: permutation size mismatch");
    std::vector<double> next = w;
    // Incoming: columns of the (l-1 -> l) block, bias row included.
    const std::size_t in_rows = spec.rows(l - 1);
    const std::size_t width = spec.size(l);
    for (std::size_t i = 0; i < in_rows; ++i) {
      for (std::size_t j = 0; j < width; ++j) {
        next[spec.offset(l - 1) + i * width + pos[j]] = w[spec.offset(l - 1) + i * width + j];
      }
    }
    // Outgoing: rows of the (l -> l+1) block; the bias row stays.
    const std::size_t out_cols = spec.size(l + 1);
    for (std::size_t j = 0; j < width; ++j) {
      for (std::size_t k = 0; k < out_cols; ++k) {
        next[spec.offset(l) + pos[j] * out_cols + k] = w[spec.offset(l) + j * out_cols + k];
      }
    }
    w = std::move(next);
  }
  return Network(spec, std::move(w));
}

Individual neuron_similarity_rearrange(const Individual& p0, const Individual& p1, NeuronPermutation* applied) {
  if (!p0.activations || !p1.activations) {
    throw std::invalid_argument("neuron_similarity_rearrange: both parents need cached activations");
  }
  if (!(p0.network.spec() == p1.network.spec())) {
    throw std::invalid_argument("neuron_similarity_rearrange: parents have different architectures");
  }
  NeuronPermutation perm = match_neurons(*p0.activations, *p1.activations);

  Individual out;
  out.network = apply_permutation(p1.network, perm);
  out.fitness = p1.fitness;
  out.outputs = p1.outputs;
  const ActivationTable& src = *p1.activations;
  ActivationTable table = src;
  for (std::size_t p = 0; p < src.patterns(); ++p) {
    auto dst_row = table.row(p);
    const auto src_row = src.row(p);
    for (std::size_t h = 0; h < src.hidden_layers(); ++h) {
      const std::size_t off = src.layer_offset(h);
      for (std::size_t j = 0; j < src.layer_width(h); ++j) dst_row[off + perm.position[h][j]] = src_row[off + j];
    }
  }
  out.activations = std::move(table);
  if (applied) *applied = std::move(perm);
  return out;
}

UniformChild uniform_crossover(const Individual& p0, const Individual& p1, Rng& rng) {
  if (!(p0.network.spec() == p1.network.spec())) {
    throw std::invalid_argument("uniform_crossover: parents have different architectures");
  }
  UniformChild result;
  result.child.network = p0.network;
  auto dst = result.child.network.weights();
  const auto src = p1.network.weights();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if ((rng() >> 63) != 0) {
      dst[i] = src[i];
      result.from_donor.push_back(i);
    }
  }
  return result;
}

std::vector<double> mutate(std::span<const double> weights, double rate, double sigma, Rng& rng) {
  std::vector<double> out(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& w : out) {
    if (unit(rng) < rate) w += noise(rng);
  }
  return out;
}

}  // namespace modlink
