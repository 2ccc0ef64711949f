#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "modlink/individual.hpp"
#include "modlink/linkage_graph.hpp"
#include "modlink/mixing.hpp"
#include "modlink/network.hpp"
#include "modlink/rng.hpp"

namespace modlink::test {

/// Unevaluated individual.
inline Individual bare(Network net) {
  Individual ind;
  ind.network = std::move(net);
  return ind;
}

Individual evaluated(Network net, int n_bits, bool keep_activations = true);

/// Uniformly random permutation of every hidden layer.
NeuronPermutation random_permutation(const LayerSpec& spec, Rng& rng);

/// Random labels in [0, k).
std::vector<std::size_t> random_labels(std::size_t n, std::size_t k, Rng& rng);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string slurp(const std::filesystem::path& file);

}  // namespace modlink::test
