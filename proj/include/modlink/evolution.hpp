#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "modlink/individual.hpp"
#include "modlink/metrics.hpp"
#include "modlink/mixing.hpp"
#include "modlink/rng.hpp"

namespace modlink {

enum class SetupKind { MOD, MOD_NS, UNIFORM, UNIFORM_NS, NO, LT };

inline constexpr SetupKind kAllSetups[] = {SetupKind::MOD,        SetupKind::MOD_NS, SetupKind::UNIFORM,
                                           SetupKind::UNIFORM_NS, SetupKind::NO,     SetupKind::LT};

std::string_view to_string(SetupKind s);
/// Case-insensitive; accepts the names printed by to_string().
std::optional<SetupKind> parse_setup(std::string_view name);
bool uses_neuron_similarity(SetupKind s);

struct RunConfig {
  int n_bits = 8;
  std::vector<int> layer_sizes{8, 8, 8, 8, 1};
  bool bias = true;
  SetupKind setup = SetupKind::MOD;
  std::size_t pop_size = 100;
  double elitism_rate = 0.01;
  double mutation_rate = 0.3;
  double mutation_sigma = 0.2;
  double init_sigma = 3.0;
  std::uint64_t max_evaluations = 1'000'000;
  std::uint64_t seed = 1;
  /// Build the MOD linkage graph from rescaled averaged weights instead of
  /// combining two proximity graphs.
  bool averaged_weight_linkage = false;
  double leiden_randomness = 0.01;
  /// LT: drop tree subsets larger than this (0 = keep all).
  std::size_t lt_max_subset_size = 0;

  LayerSpec layer_spec() const { return LayerSpec(layer_sizes, bias); }
  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

/// One accepted crossover mask, for the mask log.
struct MaskRecord {
  std::size_t trial_id = 0;
  std::size_t generation = 0;
  SetupKind setup = SetupKind::MOD;
  std::vector<std::size_t> indices;
  double cross_rate = 0.0;
};

/// Index into `pop` drawn with linear rank weights: after a stable ascending
/// sort by fitness, rank r (1 = worst) has probability r / sum(ranks).
/// Individuals with equal fitness share the mean of their ranks.
std::size_t rank_proportional_select(const Population& pop, Rng& rng);

/// Number of elites copied verbatim: ceil(rate * size).
std::size_t elite_count(double elitism_rate, std::size_t pop_size);

struct GenerationOutput {
  Population population;
  GenerationRecord record;  // setup-specific statistics; trial/generation fields left to the caller
  std::vector<MaskRecord> masks;
};

/// Produces the next population from an evaluated one.
GenerationOutput run_generation(const Population& pop, const RunConfig& cfg, Rng& rng, Evaluator& evaluator);

struct TrialResult {
  Population population;
  std::vector<GenerationRecord> records;
  std::uint64_t evaluations = 0;  // final counter
  CrossRateTally cross_rate;

  double best_fitness() const;
};

using GenerationSink = std::function<void(const GenerationRecord&, std::span<const MaskRecord>)>;

/// Runs generations until the evaluation counter reaches max_evaluations or
/// a perfect individual appears. Generation 0 describes the initial
/// population. `sink` (optional) sees every generation as it completes.
TrialResult run_trial(const RunConfig& cfg, std::size_t trial_id = 0, const GenerationSink& sink = {});

}  // namespace modlink
