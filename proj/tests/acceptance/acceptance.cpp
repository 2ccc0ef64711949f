// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "modlink/evolution.hpp"
#include "modlink/kernels.hpp"
#include "modlink/leiden.hpp"
#include "modlink/linkage_graph.hpp"
#include "modlink/metrics.hpp"
#include "modlink/mixing.hpp"
#include "modlink/runner.hpp"

using namespace modlink;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& text) {
  std::printf("      %s\n", text.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

Individual evaluated(Network net, int n_bits) {
  Individual ind;
  ind.network = std::move(net);
  Evaluator ev(n_bits, true);
  ev.evaluate(ind);
  return ind;
}

NeuronPermutation random_permutation(const LayerSpec& spec, Rng& rng) {
  NeuronPermutation perm;
  for (std::size_t h = 0; h < spec.hidden_layer_count(); ++h) {
    std::vector<std::size_t> p(spec.size(h + 1));
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::shuffle(p.begin(), p.end(), rng);
    perm.position.push_back(std::move(p));
  }
  return perm;
}

int jobs() { return std::max(1, omp_get_max_threads()); }

// Matrix printed by inspect-proximity: rows of label followed by values.
std::vector<std::vector<double>> parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> m;
  bool header_seen = false;
  for (const auto& line : lines_of(text)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string label;
    row >> label;
    std::vector<double> values;
    for (double v; row >> v;) values.push_back(v);
    m.push_back(values);
  }
  return m;
}

void small_network_proximity() {
  const fs::path dir = fs::temp_directory_path() / "modlink_acceptance" / "proximity";
  fs::create_directories(dir);
  const std::vector<std::vector<double>> weight_sets = {{1, 1, 1, 1, 0.2, 0.3},
                                                        {0.5, -1.5, 0.4, 0.6, 0.4, -0.5},
                                                        {-2.25, 0.125, 3.5, -0.75, 1.3, -0.7}};
  // In a bias-free 2-2-1 net, w000 and w010 link to w100; w001 and w011 link to w110.
  const std::vector<std::pair<std::size_t, std::size_t>> links{{0, 4}, {2, 4}, {1, 5}, {3, 5}};
  bool ok = true;
  double worst = 0;
  for (const auto& w : weight_sets) {
    {
      std::ofstream out(dir / "weights.txt");
      for (double x : w) out << fmt("%.17g ", x);
    }
    std::ostringstream out, err;
    const int code = cli::run({"inspect-proximity", "--spec", "2,2,1", "--weights", (dir / "weights.txt").string()},
                              out, err);
    const auto m = parse_matrix(out.str());
    if (code != 0 || m.size() != 6) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < 6; ++i) {
      if (m[i].size() != 6) ok = false;
      for (std::size_t j = 0; j < 6 && j < m[i].size(); ++j) {
        bool linked = false;
        for (auto [a, b] : links) linked = linked || (a == i && b == j) || (a == j && b == i);
        if (!linked) {
          ok = ok && m[i][j] == 0.0;
          continue;
        }
        const std::size_t in = std::min(i, j), outw = std::max(i, j);
        const double expect = std::abs(w[in] * w[outw]);
        ok = ok && m[i][j] != 0.0;
        worst = std::max(worst, std::abs(m[i][j] - expect));
      }
    }
    if (w == weight_sets[0]) ok = ok && m[0][4] == 0.2 && m[1][5] == 0.3 && m[4][2] == 0.2 && m[5][3] == 0.3;
  }
  ok = ok && worst <= 1e-12;
  report(ok, "2-2-1 proximity matrix",
         fmt("%zu weight sets, zero pattern exact, max |entry - |w_in*w_out|| = %.3g", weight_sets.size(), worst));
}

void linearity() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(2024, 1, 0));
  std::uniform_int_distribution<int> width(1, 6), hidden(1, 3), coin(0, 1), groups(1, 8);
  double worst = 0, worst_corrected = 0;
  std::size_t violations = 0;
  const int pairs = 1000;
  for (int k = 0; k < pairs; ++k) {
    std::vector<int> sizes{width(rng)};
    for (int h = hidden(rng); h > 0; --h) sizes.push_back(width(rng));
    sizes.push_back(1);
    const LayerSpec spec(sizes, coin(rng) == 1);
    const ProximityGraph g0 = weight_proximity(init_network(spec, rng));
    const ProximityGraph g1 = weight_proximity(init_network(spec, rng));
    if (g0.total_weight() <= 0 || g1.total_weight() <= 0) {
      --k;
      continue;
    }
    std::uniform_int_distribution<std::size_t> label(0, static_cast<std::size_t>(groups(rng)) - 1);
    std::vector<std::size_t> labels(spec.weight_count());
    for (auto& l : labels) l = label(rng);
    const Partition p = Partition::from_labels(labels);

    const double m = g0.total_weight();
    const ProximityGraph g1s = g1.scaled(m / g1.total_weight());
    const double lhs = modularity(g0, p) + modularity(g1s, p);
    const double rhs = 2 * modularity(combine_graphs(g0, g1), p);
    const double dev = std::abs(lhs - rhs);
    worst = std::max(worst, dev);
    if (dev > 1e-9) ++violations;

    std::vector<double> k0(p.community_count, 0), k1(p.community_count, 0);
    for (std::size_t v = 0; v < p.size(); ++v) {
      k0[p.community_of[v]] += g0.degree(v);
      k1[p.community_of[v]] += g1s.degree(v);
    }
    double gap = 0;
    for (std::size_t c = 0; c < p.community_count; ++c) gap += (k0[c] - k1[c]) * (k0[c] - k1[c]);
    worst_corrected = std::max(worst_corrected, std::abs(lhs - rhs + gap / (8 * m * m)));
  }
  const double secs = seconds_since(t0);
  report(violations == 0 && secs < 10.0, "two-graph modularity linearity",
         fmt("%zu/%d pairs exceed 1e-9, max |Q0 + Q1' - 2 Qc| = %.3g, %.2f s", violations, pairs, worst, secs));
  info(fmt("with the null-model term -sum_c (K0c - K1c)^2 / 8m^2 included the max residual is %.3g", worst_corrected));
}

void leiden_vs_oracle() {
  const auto t0 = Clock::now();
  std::ostringstream out, err;
  const int code = cli::run({"bench-leiden", "--vertices", "8", "--graphs", "100", "--seed", "1"}, out, err);
  const double secs = seconds_since(t0);
  std::size_t within = 0, total = 0, above = 0;
  for (const auto& line : lines_of(out.str())) {
    std::sscanf(line.c_str(), "within 0.02 of optimum: %zu/%zu", &within, &total);
    std::sscanf(line.c_str(), "above optimum: %zu", &above);
  }
  report(code == 0 && total == 100 && within >= 95 && above == 0 && secs < 60.0, "Leiden vs exhaustive optimum",
         fmt("%zu/%zu within 0.02, %zu above optimum, %.2f s", within, total, above, secs));
}

void ns_recovery() {
  Rng rng(derive_seed(2024, 4, 0));
  std::uniform_int_distribution<int> bits(3, 8), width(2, 8), hidden(1, 3), coin(0, 3);
  int recovered = 0, preserved = 0;
  const int nets = 100;
  for (int k = 0; k < nets; ++k) {
    const int n = bits(rng);
    std::vector<int> sizes{n};
    for (int h = hidden(rng); h > 0; --h) sizes.push_back(width(rng));
    sizes.push_back(1);
    const LayerSpec spec(sizes, coin(rng) != 0);
    const Individual orig = evaluated(init_network(spec, rng), n);
    const Individual scrambled = evaluated(apply_permutation(orig.network, random_permutation(spec, rng)), n);
    const Individual r = neuron_similarity_rearrange(orig, scrambled);
    recovered += r.network == orig.network;
    const auto sweep = kernels::sweep_parity(r.network, n, false, kernels::Exec::serial);
    preserved += sweep.outputs == scrambled.outputs && r.outputs == scrambled.outputs;
  }
  report(recovered == nets && preserved == nets, "neuron-similarity permutation recovery",
         fmt("%d/%d recovered bit-exactly, %d/%d donor functions preserved", recovered, nets, preserved, nets));
}

ExperimentSummary run_desk(const std::string& name, int n_bits, std::vector<SetupKind> setups, double& secs) {
  ExperimentSpec spec;
  spec.base.n_bits = n_bits;
  spec.base.layer_sizes = {n_bits, n_bits, n_bits, n_bits, 1};
  spec.base.max_evaluations = 200000;
  spec.setups = std::move(setups);
  spec.trials = 5;
  spec.base_seed = 1;
  spec.output_dir = fs::temp_directory_path() / "modlink_acceptance" / name;
  const auto t0 = Clock::now();
  ExperimentSummary s = run_experiment(spec, static_cast<std::size_t>(jobs()));
  secs = seconds_since(t0);
  return s;
}

void cross_rate_separation() {
  double secs = 0;
  const ExperimentSummary s = run_desk("desk8", 8, {SetupKind::MOD, SetupKind::LT}, secs);
  const double mod = s.by_setup.at("MOD").mean_cross_rate_accepted;
  const double lt = s.by_setup.at("LT").mean_cross_rate_accepted;
  report(mod >= 3 * lt && mod > 0, "cross-rate separation, 8-bit",
         fmt("MOD %.2f%% vs LT %.2f%% (ratio %.2f, need >= 3), %.0f s", 100 * mod, 100 * lt, lt > 0 ? mod / lt : INFINITY,
             secs));
}

void performance_ordering() {
  double secs = 0;
  const ExperimentSummary s =
      run_desk("desk6", 6, {SetupKind::MOD_NS, SetupKind::UNIFORM, SetupKind::NO}, secs);
  const double ns = s.by_setup.at("MOD_NS").mean_final_best_fitness;
  const double no = s.by_setup.at("NO").mean_final_best_fitness;
  const double uni = s.by_setup.at("UNIFORM").mean_final_best_fitness;
  report(ns > no && ns > uni, "performance ordering, 6-bit",
         fmt("mean final best MOD_NS %.4f, NO %.4f, UNIFORM %.4f, %.0f s", ns, no, uni, secs));
}

void behavior_sanity() {
  Rng rng(derive_seed(2024, 7, 0));
  bool clone_ok = true, perm_ok = true;
  for (int k = 0; k < 50; ++k) {
    const LayerSpec spec({5, 6, 6, 6, 1}, k % 2 == 0);
    const Individual p0 = evaluated(init_network(spec, rng), 5);
    const Individual clone = p0;
    clone_ok = clone_ok && parent_child_diff(clone, p0, p0) == 0.0;
    for (std::size_t h = 0; h < spec.hidden_layer_count(); ++h) {
      NeuronPermutation perm;
      for (std::size_t g = 0; g < spec.hidden_layer_count(); ++g) {
        std::vector<std::size_t> p(spec.size(g + 1));
        std::iota(p.begin(), p.end(), std::size_t{0});
        if (g == h) std::shuffle(p.begin(), p.end(), rng);
        perm.position.push_back(std::move(p));
      }
      perm_ok = perm_ok && behavior_difference(p0.network, apply_permutation(p0.network, perm), 5) == 0.0;
    }
  }
  report(clone_ok && perm_ok, "behavior-difference sanity",
         fmt("clone offspring diff 0: %s; single hidden-layer permutation diff 0: %s", clone_ok ? "yes" : "no",
             perm_ok ? "yes" : "no"));
}

std::vector<std::string> data_rows(const fs::path& csv) {
  auto lines = lines_of(slurp(csv));
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (!lines[i].empty() && lines[i][0] != '#' && lines[i] != csv_header()) rows.push_back(lines[i]);
  return rows;
}

ExperimentSpec all_setups_spec(const std::string& name, int n_bits, std::size_t trials, std::uint64_t budget) {
  ExperimentSpec spec;
  spec.base.n_bits = n_bits;
  spec.base.layer_sizes = {n_bits, n_bits, n_bits, 1};
  spec.base.pop_size = 40;
  spec.base.max_evaluations = budget;
  spec.trials = trials;
  spec.base_seed = 99;
  spec.output_dir = fs::temp_directory_path() / "modlink_acceptance" / name;
  return spec;
}

void determinism() {
  ExperimentSpec a = all_setups_spec("determinism_a", 5, 2, 8000);
  ExperimentSpec b = a;
  b.output_dir = fs::temp_directory_path() / "modlink_acceptance" / "determinism_b";
  run_experiment(a, 1);
  run_experiment(b, static_cast<std::size_t>(std::max(2, jobs())));
  const auto ra = data_rows(a.output_dir / "records.csv");
  const auto rb = data_rows(b.output_dir / "records.csv");
  report(!ra.empty() && ra == rb, "determinism",
         fmt("%zu data rows, 6 setups x 2 trials, serial vs %d workers: %s", ra.size(), std::max(2, jobs()),
             ra == rb ? "byte-identical" : "DIFFERENT"));
}

void budget_accounting() {
  const ExperimentSpec spec = all_setups_spec("budget", 4, 3, 6000);
  run_experiment(spec, static_cast<std::size_t>(jobs()));
  std::map<std::string, std::uint64_t> last_used;
  for (const auto& row : data_rows(spec.output_dir / "records.csv")) {
    std::istringstream in(row);
    std::string trial, setup, generation, used;
    std::getline(in, trial, ',');
    std::getline(in, setup, ',');
    std::getline(in, generation, ',');
    std::getline(in, used, ',');
    last_used[setup + "/" + trial] = std::stoull(used);
  }
  std::size_t ok = 0, trials = 0;
  for (const auto& run : spec.expand()) {
    ++trials;
    const TrialResult r = run_trial(run.config, run.trial_id);
    std::uint64_t sum = 0;
    for (const auto& rec : r.records) sum += rec.offspring_evaluations;
    const std::string key = std::string(to_string(run.config.setup)) + "/" + std::to_string(run.trial_id);
    ok += sum == r.evaluations && last_used[key] == r.evaluations;
  }
  report(ok == trials, "budget accounting",
         fmt("%zu/%zu trials with sum of per-offspring evaluations = final counter = last CSV evaluations_used", ok,
             trials));
}

}  // namespace

int main() {
  std::printf("acceptance run, %d worker thread(s)\n", jobs());
  const std::vector<std::function<void()>> criteria{
      small_network_proximity, linearity,         leiden_vs_oracle,      ns_recovery,         behavior_sanity,
      determinism,             budget_accounting, cross_rate_separation, performance_ordering};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report(false, "criterion raised", e.what());
    }
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
