#include "modlink/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <utility>

namespace modlink::kernels {

Exec choose_exec(std::size_t work_items, std::size_t min_parallel_items) {
  if (omp_in_parallel() || omp_get_max_threads() < 2 || work_items < min_parallel_items) {
    return Exec::serial;
  }
  return Exec::parallel;
}

SummationPlan::SummationPlan(const Network& net) : spec_(net.spec()) {
  const auto w = net.weights();
  layers_.resize(spec_.layer_count() - 1);
  for (std::size_t l = 0; l + 1 < spec_.layer_count(); ++l) {
    const std::size_t rows = spec_.rows(l);
    const std::size_t targets = spec_.size(l + 1);
    Layer& layer = layers_[l];
    layer.source.resize(rows * targets);
    layer.weight.resize(rows * targets);
    layer.tied.assign(targets, 0);
    std::vector<std::uint32_t> order(rows);
    for (std::size_t j = 0; j < targets; ++j) {
      std::iota(order.begin(), order.end(), 0U);
      auto weight_of = [&](std::uint32_t i) { return w[spec_.offset(l) + i * targets + j]; };
      std::stable_sort(order.begin(), order.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return weight_of(a) < weight_of(b); });
      for (std::size_t t = 0; t < rows; ++t) {
        layer.source[j * rows + t] = order[t];
        layer.weight[j * rows + t] = weight_of(order[t]);
        if (t > 0 && !(weight_of(order[t - 1]) < weight_of(order[t]))) layer.tied[j] = 1;
      }
    }
    max_width_ = std::max(max_width_, spec_.rows(l));
  }
  max_width_ = std::max(max_width_, spec_.output_size());
}

void SummationPlan::run(std::span<const double> input, std::span<double> hidden,
                        std::span<double> outputs, std::vector<double>& scratch) const {
  const std::size_t stride = max_width_ + 1;
  scratch.resize(2 * stride);
  double* prev = scratch.data();
  double* cur = scratch.data() + stride;
  std::copy(input.begin(), input.end(), prev);
  if (spec_.has_bias()) prev[input.size()] = 1.0;

  thread_local std::vector<std::pair<double, double>> terms;
  std::size_t hidden_pos = 0;
  for (std::size_t l = 0; l + 1 < spec_.layer_count(); ++l) {
    const Layer& layer = layers_[l];
    const std::size_t rows = spec_.rows(l);
    const std::size_t targets = spec_.size(l + 1);
    for (std::size_t j = 0; j < targets; ++j) {
      const std::uint32_t* src = layer.source.data() + j * rows;
      const double* w = layer.weight.data() + j * rows;
      double acc = 0.0;
      if (!layer.tied[j]) {
        for (std::size_t t = 0; t < rows; ++t) acc += w[t] * prev[src[t]];
      } else {
        terms.resize(rows);
        for (std::size_t t = 0; t < rows; ++t) terms[t] = {w[t], prev[src[t]]};
        std::sort(terms.begin(), terms.end());
        for (const auto& [wt, a] : terms) acc += wt * a;
      }
      cur[j] = std::tanh(acc);
    }
    if (l + 2 < spec_.layer_count()) {
      if (!hidden.empty()) std::copy(cur, cur + targets, hidden.begin() + static_cast<std::ptrdiff_t>(hidden_pos));
      hidden_pos += targets;
      if (spec_.has_bias()) cur[targets] = 1.0;
    }
    std::swap(prev, cur);
  }
  std::copy(prev, prev + outputs.size(), outputs.begin());
}

namespace {

struct PatternWorker {
  const SummationPlan& plan;
  int n_bits;
  std::vector<double> input;
  std::vector<double> scratch;
  std::vector<double> out;

  PatternWorker(const SummationPlan& p, int n)
      : plan(p), n_bits(n), input(static_cast<std::size_t>(n)), out(p.spec().output_size()) {}

  // Returns 1 if the thresholded output matches the parity of pattern p.
  std::size_t operator()(std::size_t p, std::span<double> hidden, double& raw) {
    for (int i = 0; i < n_bits; ++i) input[static_cast<std::size_t>(i)] = static_cast<double>((p >> (n_bits - 1 - i)) & 1U);
    plan.run(input, hidden, out, scratch);
    raw = out[0];
    const std::size_t predicted = raw > 0.0 ? 1 : 0;
    const std::size_t target = static_cast<std::size_t>(std::popcount(p) & 1);
    return predicted == target ? 1 : 0;
  }
};

}  // namespace

ParitySweep sweep_parity(const Network& net, int n_bits, bool keep_activations, Exec exec) {
  const std::size_t patterns = std::size_t{1} << n_bits;
  const SummationPlan plan(net);
  ParitySweep sweep;
  sweep.outputs.assign(patterns, 0.0);
  if (keep_activations) sweep.activations = ActivationTable(net.spec(), patterns);

  auto hidden_row = [&](std::size_t p) -> std::span<double> {
    return keep_activations ? sweep.activations.row(p) : std::span<double>{};
  };

  std::size_t correct = 0;
  if (exec == Exec::serial) {
    PatternWorker worker(plan, n_bits);
    for (std::size_t p = 0; p < patterns; ++p) correct += worker(p, hidden_row(p), sweep.outputs[p]);
  } else {
#pragma omp parallel reduction(+ : correct)
    {
      PatternWorker worker(plan, n_bits);
#pragma omp for schedule(static)
      for (std::size_t p = 0; p < patterns; ++p) correct += worker(p, hidden_row(p), sweep.outputs[p]);
    }
  }
  sweep.correct = correct;
  return sweep;
}

double mean_pairwise_cosine(RowsView rows, Exec exec) {
  const std::size_t n = rows.rows;
  if (n < 2) return 1.0;
  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rows.row(i);
    norm[i] = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
  }
  std::vector<double> row_sum(n, 0.0);
  auto row_body = [&](std::size_t i) {
    const auto a = rows.row(i);
    double s = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norm[i] == 0.0 || norm[j] == 0.0) continue;
      const auto b = rows.row(j);
      s += std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / (norm[i] * norm[j]);
    }
    row_sum[i] = s;
  };
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) row_body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t i = 0; i < n; ++i) row_body(i);
  }
  const double total = std::accumulate(row_sum.begin(), row_sum.end(), 0.0);
  return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

std::vector<double> gaussian_mutual_information(RowsView rows, Exec exec) {
  const std::size_t n = rows.rows;
  const std::size_t l = rows.cols;
  constexpr double kMaxRho = 1.0 - 1e-12;

  // Centered columns, stored column-major.
  std::vector<double> centered(n * l);
  std::vector<double> scale(l, 0.0);  // 0 marks a constant column
  for (std::size_t c = 0; c < l; ++c) {
    double mean = 0.0;
    bool constant = true;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = rows.data[r * l + c];
      mean += v;
      if (v != rows.data[c]) constant = false;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = rows.data[r * l + c] - mean;
      centered[c * n + r] = d;
      ss += d * d;
    }
    scale[c] = (constant || ss == 0.0) ? 0.0 : 1.0 / std::sqrt(ss);
  }

  std::vector<double> mi(l * l, 0.0);
  auto row_body = [&](std::size_t i) {
    if (scale[i] == 0.0) return;
    const double* a = centered.data() + i * n;
    for (std::size_t j = i + 1; j < l; ++j) {
      if (scale[j] == 0.0) continue;
      const double* b = centered.data() + j * n;
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += a[r] * b[r];
      const double rho = std::clamp(dot * scale[i] * scale[j], -kMaxRho, kMaxRho);
      const double v = -0.5 * std::log((1.0 - rho) * (1.0 + rho));
      mi[i * l + j] = v;
      mi[j * l + i] = v;
    }
  };
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < l; ++i) row_body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < l; ++i) row_body(i);
  }
  return mi;
}

}  // namespace modlink::kernels
