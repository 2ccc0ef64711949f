#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "modlink/evolution.hpp"

namespace modlink {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cartesian product of setups x trials over one base configuration.
struct ExperimentSpec {
  RunConfig base;  // `setup` and `seed` are filled per run
  std::vector<SetupKind> setups{std::begin(kAllSetups), std::end(kAllSetups)};
  std::size_t trials = 20;
  std::uint64_t base_seed = 1;
  std::filesystem::path output_dir = "runs/experiment";

  struct Run {
    RunConfig config;
    std::size_t trial_id;
  };
  /// Setup-major, trial-minor. Trial i of setup s is seeded with
  /// derive_seed(base_seed, index of s in kAllSetups, i).
  std::vector<Run> expand() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec load_experiment(const std::filesystem::path& file);
nlohmann::json to_json(const ExperimentSpec& spec);

inline constexpr const char* kRecordsSchemaLine = "# modlink records v1";
std::string csv_header();
std::string csv_row(const GenerationRecord& r);
std::string mask_json_line(const MaskRecord& m);

/// Serializes per-run output chunks into a fixed (run index) order no matter
/// which worker finishes first. The run at the head of the queue streams
/// straight through and is flushed per chunk; later runs are buffered.
class OrderedWriter {
 public:
  OrderedWriter(std::ostream& records, std::ostream& masks, std::size_t runs);

  void push(std::size_t run, const std::string& records_chunk, const std::string& masks_chunk, bool finished);

 private:
  void drain();

  std::mutex mutex_;
  std::ostream& records_;
  std::ostream& masks_;
  std::vector<std::string> pending_records_;
  std::vector<std::string> pending_masks_;
  std::vector<bool> finished_;
  std::size_t head_ = 0;
};

struct SetupSummary {
  std::size_t trials = 0;
  double mean_final_best_fitness = 0.0;
  double mean_cross_rate_accepted = 0.0;  // weighted by accepted-mask count
  std::uint64_t evaluations = 0;
};

struct ExperimentSummary {
  std::map<std::string, SetupSummary> by_setup;
};

/// Runs every (setup, trial) pair with up to `jobs` concurrent trials and
/// writes records.csv, masks.jsonl and meta.json into spec.output_dir.
ExperimentSummary run_experiment(const ExperimentSpec& spec, std::size_t jobs, std::ostream* progress = nullptr);

}  // namespace modlink
