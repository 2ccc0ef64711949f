#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "modlink/individual.hpp"
#include "modlink/linkage_graph.hpp"
#include "modlink/rng.hpp"

namespace modlink {

struct AcceptedMask {
  std::vector<std::size_t> subset;
  double exchanged_fraction = 0.0;  // cross_rate(subset), folded into [0, 0.5]
};

struct MixingStats {
  std::vector<AcceptedMask> accepted_masks;
  std::uint64_t evaluations_used = 0;
  bool final_improved = false;
};

/// Per hidden layer, position[h][j] is where donor neuron j is moved to.
struct NeuronPermutation {
  std::vector<std::vector<std::size_t>> position;
};

/// Fraction of `total` positions covered by a subset of size `subset_size`,
/// folded to min(r, 1 - r).
double cross_rate(std::size_t subset_size, std::size_t total);

/// Copy of p0 with the positions in `subset` taken from p1. The child carries
/// no evaluation. Throws std::out_of_range for an index past the weight count
/// and std::invalid_argument for mismatched architectures.
Individual cross_with_mask(const Individual& p0, const Individual& p1, std::span<const std::size_t> subset);

/// Recombinative optimal mixing: walks a shuffled copy of `fos`, crossing the
/// working copy of p0 with the fixed donor p1 and keeping a masked child only
/// when its fitness is strictly higher. One evaluation per subset.
std::pair<Individual, MixingStats> rom(const Individual& p0, const Individual& p1, const Fos& fos,
                                       Evaluator& evaluator, Rng& rng);

/// Gene-pool optimal mixing: like rom() but the donor is drawn uniformly from
/// `pop` for every subset, skipping position `p0_index` (pass pop.size() when
/// p0 is not a member). Throws std::invalid_argument when no donor exists.
std::pair<Individual, MixingStats> gom(const Individual& p0, const Population& pop, std::size_t p0_index,
                                       const Fos& fos, Evaluator& evaluator, Rng& rng);

/// Greedy neuron matching by L1 distance between activation profiles: donor
/// neurons in ascending order each take the closest still-free recipient
/// position (ties to the lowest position). Throws std::invalid_argument when
/// an activation table is missing.
NeuronPermutation match_neurons(const ActivationTable& recipient, const ActivationTable& donor);

/// Moves hidden neurons of `net` per `perm`: incoming columns (bias
/// included) and outgoing rows travel with their neuron.
Network apply_permutation(const Network& net, const NeuronPermutation& perm);

/// Reorders p1's hidden neurons to line up with p0's. The result computes the
/// same function as p1, so its cached outputs and fitness carry over and its
/// activation table is permuted alongside.
Individual neuron_similarity_rearrange(const Individual& p0, const Individual& p1,
                                       NeuronPermutation* applied = nullptr);

struct UniformChild {
  Individual child;
  std::vector<std::size_t> from_donor;  // positions taken from p1
};

/// Each position independently from p0 or p1 with probability 1/2.
UniformChild uniform_crossover(const Individual& p0, const Individual& p1, Rng& rng);

/// Each position independently, with probability `rate`, gets Normal(0, sigma^2)
/// added. Draw order per position: one uniform, then one normal on a hit.
std::vector<double> mutate(std::span<const double> weights, double rate, double sigma, Rng& rng);

}  // namespace modlink
