#include "helpers.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace modlink::test {

Individual evaluated(Network net, int n_bits, bool keep_activations) {
  Individual ind;
  ind.network = std::move(net);
  Evaluator ev(n_bits, keep_activations);
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

std::vector<std::size_t> random_labels(std::size_t n, std::size_t k, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::vector<std::size_t> labels(n);
  for (auto& l : labels) l = pick(rng);
  return labels;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("modlink_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace modlink::test
