#include "modlink/runner.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

namespace modlink {

using nlohmann::json;

namespace {

std::size_t setup_index(SetupKind s) {
  for (std::size_t i = 0; i < std::size(kAllSetups); ++i) {
    if (kAllSetups[i] == s) return i;
  }
  return 0;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

std::vector<ExperimentSpec::Run> ExperimentSpec::expand() const {
  std::vector<Run> runs;
  for (SetupKind s : setups) {
    for (std::size_t t = 0; t < trials; ++t) {
      RunConfig cfg = base;
      cfg.setup = s;
      cfg.seed = derive_seed(base_seed, setup_index(s), t);
      runs.push_back({cfg, t});
    }
  }
  return runs;
}

ExperimentSpec parse_experiment(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentSpec spec;
  RunConfig& c = spec.base;
  bool sizes_given = false;

  for (const auto& [key, value] : doc.items()) {
    if (key == "n_bits") c.n_bits = get_as<int>(value, key);
    else if (key == "layer_sizes") {
      c.layer_sizes = get_as<std::vector<int>>(value, key);
      sizes_given = true;
    } else if (key == "bias") c.bias = get_as<bool>(value, key);
    else if (key == "pop_size") c.pop_size = get_as<std::size_t>(value, key);
    else if (key == "elitism_rate") c.elitism_rate = get_as<double>(value, key);
    else if (key == "mutation_rate") c.mutation_rate = get_as<double>(value, key);
    else if (key == "mutation_sigma") c.mutation_sigma = get_as<double>(value, key);
    else if (key == "init_sigma") c.init_sigma = get_as<double>(value, key);
    else if (key == "max_evaluations") c.max_evaluations = get_as<std::uint64_t>(value, key);
    else if (key == "averaged_weight_linkage") c.averaged_weight_linkage = get_as<bool>(value, key);
    else if (key == "leiden_randomness") c.leiden_randomness = get_as<double>(value, key);
    else if (key == "lt_max_subset_size") c.lt_max_subset_size = get_as<std::size_t>(value, key);
    else if (key == "trials") spec.trials = get_as<std::size_t>(value, key);
    else if (key == "base_seed") spec.base_seed = get_as<std::uint64_t>(value, key);
    else if (key == "output_dir") spec.output_dir = get_as<std::string>(value, key);
    else if (key == "setups") {
      spec.setups.clear();
      for (const auto& name : get_as<std::vector<std::string>>(value, key)) {
        const auto s = parse_setup(name);
        if (!s) throw ConfigError("unknown setup '" + name + "'");
        spec.setups.push_back(*s);
      }
      if (spec.setups.empty()) throw ConfigError("'setups' must not be empty");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (!sizes_given) c.layer_sizes = {c.n_bits, c.n_bits, c.n_bits, c.n_bits, 1};
  if (spec.trials == 0) throw ConfigError("'trials' must be >= 1");
  try {
    for (SetupKind s : spec.setups) {
      RunConfig probe = c;
      probe.setup = s;
      probe.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_experiment(doc);
}

json to_json(const ExperimentSpec& spec) {
  const RunConfig& c = spec.base;
  json setups = json::array();
  for (SetupKind s : spec.setups) setups.push_back(std::string(to_string(s)));
  return json{{"n_bits", c.n_bits},
              {"layer_sizes", c.layer_sizes},
              {"bias", c.bias},
              {"setups", setups},
              {"trials", spec.trials},
              {"pop_size", c.pop_size},
              {"elitism_rate", c.elitism_rate},
              {"mutation_rate", c.mutation_rate},
              {"mutation_sigma", c.mutation_sigma},
              {"init_sigma", c.init_sigma},
              {"max_evaluations", c.max_evaluations},
              {"base_seed", spec.base_seed},
              {"averaged_weight_linkage", c.averaged_weight_linkage},
              {"leiden_randomness", c.leiden_randomness},
              {"lt_max_subset_size", c.lt_max_subset_size},
              {"output_dir", spec.output_dir.string()}};
}

std::string csv_header() {
  return "trial_id,setup,generation,evaluations_used,best_fitness,mean_fitness,mean_pairwise_cosine,"
         "mean_parent_child_behavior_diff,mean_cross_rate_accepted,fos_subset_count_mean";
}

std::string csv_row(const GenerationRecord& r) {
  std::string row;
  row += std::to_string(r.trial_id) + ',' + r.setup + ',' + std::to_string(r.generation) + ',' +
         std::to_string(r.evaluations_used);
  for (double v : {r.best_fitness, r.mean_fitness, r.mean_pairwise_cosine, r.mean_parent_child_behavior_diff,
                   r.mean_cross_rate_accepted, r.fos_subset_count_mean}) {
    row += ',' + fmt_double(v);
  }
  return row;
}

std::string mask_json_line(const MaskRecord& m) {
  json j{{"trial_id", m.trial_id},
         {"generation", m.generation},
         {"setup", std::string(to_string(m.setup))},
         {"indices", m.indices},
         {"cross_rate", m.cross_rate}};
  return j.dump();
}

OrderedWriter::OrderedWriter(std::ostream& records, std::ostream& masks, std::size_t runs)
    : records_(records), masks_(masks), pending_records_(runs), pending_masks_(runs), finished_(runs, false) {}

void OrderedWriter::push(std::size_t run, const std::string& records_chunk, const std::string& masks_chunk,
                         bool finished) {
  std::lock_guard lock(mutex_);
  pending_records_[run] += records_chunk;
  pending_masks_[run] += masks_chunk;
  if (finished) finished_[run] = true;
  drain();
}

void OrderedWriter::drain() {
  while (head_ < finished_.size()) {
    if (!pending_records_[head_].empty() || !pending_masks_[head_].empty()) {
      records_ << pending_records_[head_];
      masks_ << pending_masks_[head_];
      records_.flush();
      masks_.flush();
      pending_records_[head_].clear();
      pending_masks_[head_].clear();
    }
    if (!finished_[head_]) break;
    ++head_;
  }
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, std::size_t jobs, std::ostream* progress) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.output_dir);
  const auto runs = spec.expand();

  json meta;
  meta["version"] = MODLINK_VERSION;
  meta["git_revision"] = MODLINK_GIT_REVISION;
  meta["started_at"] = utc_timestamp();
  meta["config"] = to_json(spec);
  meta["seed_derivation"] = "seed = mix64(mix64(mix64(base_seed) ^ setup_index) ^ trial), "
                            "setup_index in order MOD, MOD_NS, UNIFORM, UNIFORM_NS, NO, LT; mix64 = SplitMix64";
  meta["mutation_placement"] =
      "every setup except NO: after recombination, mutate the offspring once and keep the mutant only if "
      "strictly fitter; NO: mutation of the first parent is the only variation, kept only if strictly fitter";
  meta["metrics"] = {
      {"mean_parent_child_behavior_diff",
       "mean over all offspring produced; second parent is the donor actually used (neuron-similarity "
       "rearranged for *_NS); NO compares with the first parent only"},
      {"mean_cross_rate_accepted", "mean of min(r, 1-r) over masks accepted in the generation, 0 if none"}};
  json seeds = json::array();
  for (const auto& r : runs) {
    seeds.push_back({{"setup", std::string(to_string(r.config.setup))}, {"trial_id", r.trial_id}, {"seed", r.config.seed}});
  }
  meta["runs"] = seeds;
  {
    std::ofstream(spec.output_dir / "meta.json") << meta.dump(2) << '\n';
  }

  std::ofstream records(spec.output_dir / "records.csv");
  std::ofstream masks(spec.output_dir / "masks.jsonl");
  if (!records || !masks) throw std::runtime_error("cannot create output files in " + spec.output_dir.string());
  records << kRecordsSchemaLine << '\n' << csv_header() << '\n';
  records.flush();
  OrderedWriter writer(records, masks, runs.size());

  std::vector<TrialResult> results(runs.size());
  std::exception_ptr failure;
  std::mutex progress_mutex;
  const int threads = static_cast<int>(std::max<std::size_t>(1, jobs));

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t i = 0; i < runs.size(); ++i) {
    try {
      auto sink = [&](const GenerationRecord& rec, std::span<const MaskRecord> ms) {
        std::string mask_lines;
        for (const auto& m : ms) mask_lines += mask_json_line(m) + '\n';
        writer.push(i, csv_row(rec) + '\n', mask_lines, false);
      };
      TrialResult r = run_trial(runs[i].config, runs[i].trial_id, sink);
      writer.push(i, "", "", true);
      if (progress) {
        std::lock_guard lock(progress_mutex);
        *progress << to_string(runs[i].config.setup) << " trial " << runs[i].trial_id << ": best "
                  << r.best_fitness() << " after " << r.evaluations << " evaluations\n";
      }
      r.population.clear();
      results[i] = std::move(r);
    } catch (...) {
#pragma omp critical(modlink_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentSummary summary;
  std::map<std::string, CrossRateTally> tallies;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string name(to_string(runs[i].config.setup));
    SetupSummary& s = summary.by_setup[name];
    ++s.trials;
    s.mean_final_best_fitness += results[i].records.back().best_fitness;
    s.evaluations += results[i].evaluations;
    tallies[name].sum += results[i].cross_rate.sum;
    tallies[name].count += results[i].cross_rate.count;
  }
  json summary_json = json::object();
  for (auto& [name, s] : summary.by_setup) {
    s.mean_final_best_fitness /= static_cast<double>(s.trials);
    s.mean_cross_rate_accepted = tallies[name].mean();
    summary_json[name] = {{"trials", s.trials},
                          {"mean_final_best_fitness", s.mean_final_best_fitness},
                          {"mean_cross_rate_accepted", s.mean_cross_rate_accepted},
                          {"evaluations", s.evaluations}};
  }
  meta["finished_at"] = utc_timestamp();
  meta["summary"] = summary_json;
  std::ofstream(spec.output_dir / "meta.json") << meta.dump(2) << '\n';
  return summary;
}

}  // namespace modlink
