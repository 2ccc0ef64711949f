#include "modlink/evolution.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "modlink/leiden.hpp"
#include "modlink/linkage_graph.hpp"
#include "modlink/linkage_tree.hpp"

namespace modlink {

std::string_view to_string(SetupKind s) {
  switch (s) {
    case SetupKind::MOD: return "MOD";
    case SetupKind::MOD_NS: return "MOD_NS";
    case SetupKind::UNIFORM: return "UNIFORM";
    case SetupKind::UNIFORM_NS: return "UNIFORM_NS";
    case SetupKind::NO: return "NO";
    case SetupKind::LT: return "LT";
  }
  return "?";
}

std::optional<SetupKind> parse_setup(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (SetupKind s : kAllSetups) {
    if (to_string(s) == upper) return s;
  }
  return std::nullopt;
}

bool uses_neuron_similarity(SetupKind s) { return s == SetupKind::MOD_NS || s == SetupKind::UNIFORM_NS; }

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("RunConfig: " + msg); };
  if (n_bits < 1 || n_bits > 24) fail("n_bits must be in [1, 24]");
  const LayerSpec spec = layer_spec();  // validates sizes
  if (static_cast<int>(spec.input_size()) != n_bits) fail("first layer size must equal n_bits");
  if (spec.output_size() != 1) fail("last layer size must be 1");
  if (pop_size < 2) fail("pop_size must be >= 2");
  if (setup == SetupKind::LT && pop_size < 3) fail("LT needs pop_size >= 3");
  if (!(elitism_rate >= 0.0 && elitism_rate < 1.0)) fail("elitism_rate must be in [0, 1)");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) fail("mutation_rate must be in [0, 1]");
  if (!(mutation_sigma > 0.0)) fail("mutation_sigma must be > 0");
  if (!(init_sigma > 0.0)) fail("init_sigma must be > 0");
  if (!(leiden_randomness >= 0.0)) fail("leiden_randomness must be >= 0");
  if (elite_count(elitism_rate, pop_size) >= pop_size) fail("elitism leaves no room for offspring");
}

std::size_t elite_count(double elitism_rate, std::size_t pop_size) {
  return static_cast<std::size_t>(std::ceil(elitism_rate * static_cast<double>(pop_size) - 1e-9));
}

namespace {

// Indices sorted by ascending fitness, ties in population order.
std::vector<std::size_t> ascending_order(const Population& pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });
  return order;
}

// Linear rank weights; a run of equal fitness shares its mean rank. Tickets
// are doubled ranks so every weight is an integer.
std::size_t select_by_rank(const Population& pop, const std::vector<std::size_t>& ascending, Rng& rng) {
  const std::uint64_t n = ascending.size();
  const std::uint64_t total = n * (n + 1);
  std::uint64_t ticket = std::uniform_int_distribution<std::uint64_t>(1, total)(rng);
  std::size_t first = 0;
  while (first < n) {
    std::size_t last = first;
    while (last + 1 < n && pop[ascending[last + 1]].fitness == pop[ascending[first]].fitness) ++last;
    const std::uint64_t each = (first + 1) + (last + 1);
    const std::uint64_t group = each * (last - first + 1);
    if (ticket <= group) return ascending[first + (ticket - 1) / each];
    ticket -= group;
    first = last + 1;
  }
  return ascending.back();
}

Fos modularity_fos(const Individual& p0, const Individual& p1, const RunConfig& cfg, Rng& rng) {
  try {
    const ProximityGraph g = cfg.averaged_weight_linkage
                                 ? literal_pair_graph(p0.network, p1.network)
                                 : combine_graphs(weight_proximity(p0.network), weight_proximity(p1.network));
    return fos_from_partition(leiden_partition(g, rng, {cfg.leiden_randomness}));
  } catch (const DegenerateGraphError&) {
    return univariate_fos(p0.network.weight_count());
  }
}

Individual mutated(const Individual& ind, const RunConfig& cfg, Rng& rng) {
  Individual out;
  out.network = Network(ind.network.spec(), mutate(ind.network.weights(), cfg.mutation_rate, cfg.mutation_sigma, rng));
  return out;
}

}  // namespace

std::size_t rank_proportional_select(const Population& pop, Rng& rng) {
  if (pop.empty()) throw std::invalid_argument("rank_proportional_select: empty population");
  return select_by_rank(pop, ascending_order(pop), rng);
}

GenerationOutput run_generation(const Population& pop, const RunConfig& cfg, Rng& rng, Evaluator& evaluator) {
  const std::size_t n = pop.size();
  const std::size_t total_weights = pop.front().network.weight_count();
  GenerationOutput out;
  GenerationRecord& rec = out.record;
  rec.setup = std::string(to_string(cfg.setup));
  out.population.reserve(n);

  const std::vector<std::size_t> ascending = ascending_order(pop);
  // Elites: best first; equal fitness keeps population order.
  std::vector<std::size_t> best_first(ascending.rbegin(), ascending.rend());
  std::stable_sort(best_first.begin(), best_first.end(),
                   [&](std::size_t a, std::size_t b) { return pop[a].fitness > pop[b].fitness; });
  const std::size_t elites = std::min(elite_count(cfg.elitism_rate, n), n);
  for (std::size_t e = 0; e < elites; ++e) out.population.push_back(pop[best_first[e]]);

  Fos tree_fos;
  if (cfg.setup == SetupKind::LT) {
    tree_fos = build_linkage_tree(pairwise_mi(pop)).traversal(cfg.lt_max_subset_size);
  }

  double diff_sum = 0.0;
  double diff_accepted_sum = 0.0;
  std::size_t changed = 0;
  double fos_sizes = 0.0;

  while (out.population.size() < n) {
    const std::size_t i0 = select_by_rank(pop, ascending, rng);
    const std::size_t i1 = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const Individual& p0 = pop[i0];
    Individual p1 = pop[i1];

    Individual offspring;
    std::uint64_t evaluations = 0;
    std::vector<AcceptedMask> accepted;

    switch (cfg.setup) {
      case SetupKind::MOD:
      case SetupKind::MOD_NS: {
        if (cfg.setup == SetupKind::MOD_NS) p1 = neuron_similarity_rearrange(p0, p1);
        const Fos fos = modularity_fos(p0, p1, cfg, rng);
        fos_sizes += static_cast<double>(fos.size());
        auto [child, stats] = rom(p0, p1, fos, evaluator, rng);
        offspring = std::move(child);
        evaluations += stats.evaluations_used;
        accepted = std::move(stats.accepted_masks);
        break;
      }
      case SetupKind::LT: {
        fos_sizes += static_cast<double>(tree_fos.size());
        auto [child, stats] = gom(p0, pop, i0, tree_fos, evaluator, rng);
        offspring = std::move(child);
        evaluations += stats.evaluations_used;
        accepted = std::move(stats.accepted_masks);
        break;
      }
      case SetupKind::UNIFORM:
      case SetupKind::UNIFORM_NS: {
        if (cfg.setup == SetupKind::UNIFORM_NS) p1 = neuron_similarity_rearrange(p0, p1);
        UniformChild uc = uniform_crossover(p0, p1, rng);
        evaluator.evaluate(uc.child);
        ++evaluations;
        if (uc.child.fitness > p0.fitness) {
          const double rate = cross_rate(uc.from_donor.size(), total_weights);
          accepted.push_back({std::move(uc.from_donor), rate});
          offspring = std::move(uc.child);
        } else {
          offspring = p0;
        }
        break;
      }
      case SetupKind::NO: {
        Individual candidate = mutated(p0, cfg, rng);
        evaluator.evaluate(candidate);
        ++evaluations;
        offspring = candidate.fitness > p0.fitness ? std::move(candidate) : p0;
        break;
      }
    }

    if (cfg.setup != SetupKind::NO) {
      Individual candidate = mutated(offspring, cfg, rng);
      evaluator.evaluate(candidate);
      ++evaluations;
      if (candidate.fitness > offspring.fitness) offspring = std::move(candidate);
    }

    const double diff = cfg.setup == SetupKind::NO ? behavior_difference(offspring, p0)
                                                   : parent_child_diff(offspring, p0, p1);
    diff_sum += diff;
    if (!(offspring.network == p0.network)) {
      ++changed;
      diff_accepted_sum += diff;
    }

    for (AcceptedMask& m : accepted) {
      rec.cross_rate_sum += m.exchanged_fraction;
      ++rec.accepted_masks;
      MaskRecord mr;
      mr.setup = cfg.setup;
      mr.indices = std::move(m.subset);
      mr.cross_rate = m.exchanged_fraction;
      out.masks.push_back(std::move(mr));
    }
    rec.offspring_evaluations += evaluations;
    ++rec.offspring;
    out.population.push_back(std::move(offspring));
  }

  double best = 0.0;
  double sum = 0.0;
  for (const Individual& ind : out.population) {
    best = std::max(best, ind.fitness);
    sum += ind.fitness;
  }
  rec.best_fitness = best;
  rec.mean_fitness = sum / static_cast<double>(n);
  rec.mean_pairwise_cosine = population_cosine_similarity(out.population);
  if (rec.offspring > 0) {
    rec.mean_parent_child_behavior_diff = diff_sum / static_cast<double>(rec.offspring);
    rec.fos_subset_count_mean = fos_sizes / static_cast<double>(rec.offspring);
  }
  if (changed > 0) rec.mean_parent_child_behavior_diff_accepted = diff_accepted_sum / static_cast<double>(changed);
  if (rec.accepted_masks > 0) rec.mean_cross_rate_accepted = rec.cross_rate_sum / static_cast<double>(rec.accepted_masks);
  return out;
}

double TrialResult::best_fitness() const {
  double best = 0.0;
  for (const Individual& ind : population) best = std::max(best, ind.fitness);
  return best;
}

TrialResult run_trial(const RunConfig& cfg, std::size_t trial_id, const GenerationSink& sink) {
  cfg.validate();
  const LayerSpec spec = cfg.layer_spec();
  Rng rng(cfg.seed);
  Evaluator evaluator(cfg.n_bits, uses_neuron_similarity(cfg.setup));

  TrialResult result;
  result.population.reserve(cfg.pop_size);
  for (std::size_t i = 0; i < cfg.pop_size; ++i) {
    Individual ind;
    ind.network = init_network(spec, rng, cfg.init_sigma);
    evaluator.evaluate(ind);
    result.population.push_back(std::move(ind));
  }

  GenerationRecord initial;
  initial.trial_id = trial_id;
  initial.setup = std::string(to_string(cfg.setup));
  initial.generation = 0;
  initial.evaluations_used = evaluator.evaluations();
  initial.offspring_evaluations = evaluator.evaluations();
  double sum = 0.0;
  for (const Individual& ind : result.population) {
    initial.best_fitness = std::max(initial.best_fitness, ind.fitness);
    sum += ind.fitness;
  }
  initial.mean_fitness = sum / static_cast<double>(cfg.pop_size);
  initial.mean_pairwise_cosine = population_cosine_similarity(result.population);
  result.records.push_back(initial);
  if (sink) sink(initial, {});

  std::size_t generation = 0;
  while (evaluator.evaluations() < cfg.max_evaluations && result.records.back().best_fitness < 1.0) {
    GenerationOutput next = run_generation(result.population, cfg, rng, evaluator);
    ++generation;
    next.record.trial_id = trial_id;
    next.record.generation = generation;
    next.record.evaluations_used = evaluator.evaluations();
    for (MaskRecord& m : next.masks) {
      m.trial_id = trial_id;
      m.generation = generation;
    }
    result.cross_rate.add(next.record);
    if (sink) sink(next.record, next.masks);
    result.records.push_back(std::move(next.record));
    result.population = std::move(next.population);
  }
  result.evaluations = evaluator.evaluations();
  return result;
}

}  // namespace modlink
