#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "modlink/individual.hpp"

namespace modlink {

/// One row of per-generation statistics. The first ten fields are the CSV
/// columns; the rest feed run-level aggregates.
struct GenerationRecord {
  std::size_t trial_id = 0;
  std::string setup;
  std::size_t generation = 0;
  std::uint64_t evaluations_used = 0;  // cumulative trial counter
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double mean_pairwise_cosine = 0.0;
  double mean_parent_child_behavior_diff = 0.0;  // over all offspring produced
  double mean_cross_rate_accepted = 0.0;         // 0 when nothing was accepted
  double fos_subset_count_mean = 0.0;            // 0 for setups without a FOS

  std::size_t offspring = 0;
  std::size_t accepted_masks = 0;
  double cross_rate_sum = 0.0;
  std::uint64_t offspring_evaluations = 0;  // sum of per-offspring reported evaluations
  double mean_parent_child_behavior_diff_accepted = 0.0;  // offspring that changed only
};

/// Mean pairwise cosine similarity of the flat weight vectors.
double population_cosine_similarity(const Population& pop);

/// Mean |out_a(x) - out_b(x)| over all inputs, from cached raw outputs.
/// Throws std::invalid_argument if either side is unevaluated or sizes differ.
double behavior_difference(const Individual& a, const Individual& b);
double behavior_difference(const Network& a, const Network& b, int n_bits);

double parent_child_diff(const Individual& child, const Individual& p0, const Individual& p1);

/// Accepted-mask cross-rate average, weighted by mask count.
struct CrossRateTally {
  double sum = 0.0;
  std::size_t count = 0;

  void add(const GenerationRecord& r) {
    sum += r.cross_rate_sum;
    count += r.accepted_masks;
  }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

}  // namespace modlink
