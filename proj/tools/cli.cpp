#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "modlink/leiden.hpp"
#include "modlink/linkage_graph.hpp"
#include "modlink/oracle/brute_force.hpp"
#include "modlink/runner.hpp"

namespace modlink::cli {
namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw std::invalid_argument("bad layer size '" + item + "'");
    }
    sizes.push_back(v);
  }
  return sizes;
}

std::string weight_label(const LayerSpec& spec, std::size_t flat) {
  const WeightIndex w = spec.weight_index(flat);
  const std::string from = w.from == spec.size(w.layer) ? "b" : std::to_string(w.from);
  return "w_{" + std::to_string(w.layer) + "," + from + "," + std::to_string(w.to) + "}";
}

int cmd_run(const std::string& config, std::size_t jobs, const std::string& output_dir, bool quiet,
            std::ostream& out, std::ostream& err) {
  try {
    ExperimentSpec spec = load_experiment(config);
    if (const char* seed = std::getenv("MODLINK_SEED"); seed && *seed) {
      std::uint64_t v = 0;
      const std::string s(seed);
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        err << "error: MODLINK_SEED is not an unsigned integer\n";
        return 2;
      }
      spec.base_seed = v;
    }
    if (!output_dir.empty()) spec.output_dir = output_dir;
    const ExperimentSummary summary = run_experiment(spec, jobs, quiet ? nullptr : &out);
    out << "wrote " << (spec.output_dir / "records.csv").string() << '\n';
    for (const auto& [name, s] : summary.by_setup) {
      out << std::left << std::setw(11) << name << " trials " << s.trials << "  mean final best "
          << s.mean_final_best_fitness << "  mean accepted cross rate " << s.mean_cross_rate_accepted << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_bench_leiden(std::size_t vertices, std::size_t graphs, std::uint64_t seed, double density,
                     double tolerance, std::ostream& out, std::ostream& err) {
  if (vertices < 2 || vertices > 12) {
    err << "error: --vertices must be in [2, 12] for the exhaustive oracle\n";
    return 2;
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> found(graphs), best(graphs);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < graphs; ++k) {
    Rng graph_rng(derive_seed(seed, 0, k));
    const ProximityGraph g = oracle::random_connected_graph(vertices, density, graph_rng);
    Rng leiden_rng(derive_seed(seed, 1, k));
    found[k] = modularity(g, leiden_partition(g, leiden_rng));
    best[k] = oracle::exhaustive_modularity(oracle::to_dense(g)).quality;
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::size_t within = 0, above = 0;
  double max_gap = 0.0, gap_sum = 0.0;
  for (std::size_t k = 0; k < graphs; ++k) {
    const double gap = best[k] - found[k];
    if (gap <= tolerance) ++within;
    if (found[k] > best[k] + 1e-12) ++above;
    max_gap = std::max(max_gap, gap);
    gap_sum += gap;
  }
  out << "graphs " << graphs << "  vertices " << vertices << "  density " << density << '\n'
      << "within " << tolerance << " of optimum: " << within << "/" << graphs << '\n'
      << "above optimum: " << above << '\n'
      << "max gap " << max_gap << "  mean gap " << (graphs ? gap_sum / static_cast<double>(graphs) : 0.0) << '\n'
      << "elapsed " << ms << " ms\n";
  return above == 0 ? 0 : 1;
}

int cmd_inspect(const std::string& sizes_text, const std::string& weights_file, const std::string& edges_out,
                std::ostream& out, std::ostream& err) {
  try {
    const std::vector<int> sizes = parse_sizes(sizes_text);
    std::ifstream in(weights_file);
    if (!in) {
      err << "error: cannot open " << weights_file << '\n';
      return 2;
    }
    std::vector<double> w;
    for (double x; in >> x;) w.push_back(x);
    if (!in.eof()) {
      err << "error: weights file contains a non-numeric token\n";
      return 2;
    }
    const LayerSpec with_bias(sizes, true);
    const LayerSpec without_bias(sizes, false);
    const LayerSpec* spec = nullptr;
    if (w.size() == without_bias.weight_count()) spec = &without_bias;
    else if (w.size() == with_bias.weight_count()) spec = &with_bias;
    if (!spec) {
      err << "error: expected " << without_bias.weight_count() << " (bias-free) or " << with_bias.weight_count()
          << " (with biases) weights, got " << w.size() << '\n';
      return 2;
    }
    const Network net(*spec, w);
    const ProximityGraph g = weight_proximity(net);
    const std::size_t n = g.vertex_count();
    std::vector<double> dense(n * n, 0.0);
    for (const Edge& e : g.edges()) {
      dense[e.u * n + e.v] = e.weight;
      dense[e.v * n + e.u] = e.weight;
    }

    std::vector<std::string> labels(n);
    std::size_t width = 1;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = weight_label(*spec, i);
      width = std::max(width, labels[i].size());
    }
    std::vector<std::string> cells(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
      cells[i] = shortest(dense[i]);
      width = std::max(width, cells[i].size());
    }
    out << "# proximity matrix: " << n << " weights, " << (spec->has_bias() ? "with biases" : "bias-free") << ", "
        << g.edges().size() << " linked pairs\n";
    out << std::setw(static_cast<int>(width)) << "";
    for (std::size_t j = 0; j < n; ++j) out << ' ' << std::setw(static_cast<int>(width)) << labels[j];
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      out << std::setw(static_cast<int>(width)) << labels[i];
      for (std::size_t j = 0; j < n; ++j) out << ' ' << std::setw(static_cast<int>(width)) << cells[i * n + j];
      out << '\n';
    }
    if (!edges_out.empty()) {
      std::ofstream edges(edges_out);
      if (!edges) {
        err << "error: cannot write " << edges_out << '\n';
        return 1;
      }
      write_edge_list(edges, g);
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modularity-linkage neuroevolution experiments"};
  app.name("modlink");
  app.require_subcommand(1);

  std::string config, output_dir;
  std::size_t jobs = 1;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("--config", config, "Experiment config file")->required();
  run_cmd->add_option("--jobs", jobs, "Concurrent trials")->check(CLI::PositiveNumber);
  run_cmd->add_option("--output-dir", output_dir, "Override output_dir from the config");
  run_cmd->add_flag("--quiet", quiet, "No per-trial progress lines");

  std::size_t vertices = 8, graphs = 100;
  std::uint64_t seed = 1;
  double density = 0.4, tolerance = 0.02;
  auto* bench_cmd = app.add_subcommand("bench-leiden", "Compare Leiden with exhaustive search on random graphs");
  bench_cmd->add_option("--vertices", vertices, "Vertices per graph (<= 12)");
  bench_cmd->add_option("--graphs", graphs, "Number of random graphs");
  bench_cmd->add_option("--seed", seed, "Random seed");
  bench_cmd->add_option("--density", density, "Probability of each non-tree edge")->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--tolerance", tolerance, "Allowed modularity gap");

  std::string sizes, weights, edges_out;
  auto* inspect_cmd = app.add_subcommand("inspect-proximity", "Print the weight proximity matrix of a network");
  inspect_cmd->add_option("--spec", sizes, "Layer sizes, e.g. 2,2,1")->required();
  inspect_cmd->add_option("--weights", weights, "Whitespace-separated weights in flat index order")->required();
  inspect_cmd->add_option("--edges-out", edges_out, "Also write the graph as a `u v weight` edge list");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return 2;
  }

  if (run_cmd->parsed()) return cmd_run(config, jobs, output_dir, quiet, out, err);
  if (bench_cmd->parsed()) return cmd_bench_leiden(vertices, graphs, seed, density, tolerance, out, err);
  return cmd_inspect(sizes, weights, edges_out, out, err);
}

}  // namespace modlink::cli
