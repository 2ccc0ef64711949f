#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "modlink/mixing.hpp"
#include "modlink/network.hpp"

using namespace modlink;

namespace {

// Plain nested-loop forward pass, summing in source order.
std::vector<double> naive_forward(const Network& net, const std::vector<std::uint8_t>& bits) {
  const LayerSpec& s = net.spec();
  std::vector<double> act(bits.begin(), bits.end());
  for (std::size_t l = 0; l + 1 < s.layer_count(); ++l) {
    std::vector<double> next(s.size(l + 1));
    for (std::size_t j = 0; j < next.size(); ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < s.size(l); ++i) sum += net.weight({l, i, j}) * act[i];
      if (s.has_bias()) sum += net.weight({l, s.size(l), j});
      next[j] = std::tanh(sum);
    }
    act = std::move(next);
  }
  return act;
}

Network xor_network() {
  Network net(LayerSpec({2, 2, 1}));
  net.weight({0, 0, 0}) = 10;
  net.weight({0, 1, 0}) = 10;
  net.weight({0, 2, 0}) = -5;
  net.weight({0, 0, 1}) = 10;
  net.weight({0, 1, 1}) = 10;
  net.weight({0, 2, 1}) = -15;
  net.weight({1, 0, 0}) = 10;
  net.weight({1, 1, 0}) = -10;
  net.weight({1, 2, 0}) = -5;
  return net;
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("weight counts") {
    CHECK(LayerSpec({2, 2, 1}).weight_count() == 9);
    CHECK(LayerSpec({2, 2, 1}, false).weight_count() == 6);
    CHECK(LayerSpec({8, 8, 8, 8, 1}).weight_count() == 3 * 9 * 8 + 9);
    CHECK(LayerSpec({8, 8, 8, 8, 1}).hidden_layer_count() == 3);
  }

  TEST_CASE("invalid specs") {
    CHECK_THROWS_AS(LayerSpec({3}), std::invalid_argument);
    CHECK_THROWS_AS(LayerSpec({3, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(LayerSpec({-1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Network(LayerSpec({1, 1}), {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Network(LayerSpec({1, 1}), {1.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(Network(LayerSpec({1, 1}), {1.0, INFINITY}), std::invalid_argument);
  }

  TEST_CASE("flat index layout and round trip") {
    const LayerSpec s({2, 2, 1}, false);
    CHECK(s.flat_index({0, 0, 0}) == 0);
    CHECK(s.flat_index({0, 0, 1}) == 1);
    CHECK(s.flat_index({0, 1, 0}) == 2);
    CHECK(s.flat_index({0, 1, 1}) == 3);
    CHECK(s.flat_index({1, 0, 0}) == 4);
    CHECK(s.flat_index({1, 1, 0}) == 5);

    Rng rng(7);
    std::uniform_int_distribution<int> width(1, 5), depth(2, 5);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> sizes(static_cast<std::size_t>(depth(rng)));
      for (int& x : sizes) x = width(rng);
      for (bool bias : {false, true}) {
        const LayerSpec spec(sizes, bias);
        for (std::size_t f = 0; f < spec.weight_count(); ++f) {
          const WeightIndex w = spec.weight_index(f);
          REQUIRE(w.from < spec.rows(w.layer));
          REQUIRE(w.to < spec.size(w.layer + 1));
          REQUIRE(spec.flat_index(w) == f);
        }
      }
    }
    CHECK_THROWS(LayerSpec({2, 2, 1}).weight_index(9));
    CHECK_THROWS(LayerSpec({2, 2, 1}).flat_index({0, 3, 0}));
  }

  TEST_CASE("init is deterministic and N(0, sigma^2)") {
    const LayerSpec spec({2, 2, 1});
    Rng a(42), b(42);
    CHECK(init_network(spec, a) == init_network(spec, b));

    const LayerSpec one({1, 1});
    Rng rng(3);
    const int samples = 100000;
    double sum = 0, sq = 0;
    for (int k = 0; k < samples; ++k) {
      const double w = init_network(one, rng).weights()[1];
      sum += w;
      sq += w * w;
    }
    const double mean = sum / samples;
    const double sd = std::sqrt(sq / samples - mean * mean);
    CHECK(std::abs(mean) < 0.1);
    CHECK(std::abs(sd - 3.0) < 0.1);
  }

  TEST_CASE("forward closed forms") {
    const Network zero(LayerSpec({3, 4, 2}));
    const std::vector<std::uint8_t> in{1, 0, 1};
    const ForwardResult r = forward(zero, in);
    for (double o : r.outputs) CHECK(o == 0.0);
    for (const auto& layer : r.hidden)
      for (double a : layer) CHECK(a == 0.0);

    volatile double w = 0.7;  // keeps tanh out of constant folding
    Network single(LayerSpec({1, 1}), {w, 0.0});
    const std::vector<std::uint8_t> one{1};
    CHECK(forward(single, one).output() == std::tanh(w));
  }

  TEST_CASE("forward matches a naive loop") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const LayerSpec spec({5, 4, 3, 1}, trial % 2 == 0);
      const Network net = init_network(spec, rng);
      for (std::size_t p = 0; p < 32; ++p) {
        const auto bits = pattern_bits(p, 5);
        const auto expect = naive_forward(net, bits);
        const auto got = forward(net, bits);
        REQUIRE(got.outputs.size() == expect.size());
        CHECK(got.output() == doctest::Approx(expect[0]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("forward input validation") {
    const Network net(LayerSpec({2, 1}));
    const std::vector<std::uint8_t> short_in{1};
    const std::vector<std::uint8_t> bad{1, 2};
    CHECK_THROWS_AS(forward(net, short_in), std::invalid_argument);
    CHECK_THROWS_AS(forward(net, bad), std::invalid_argument);
  }

  TEST_CASE("pattern order is lexicographic") {
    CHECK(pattern_bits(0, 3) == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(pattern_bits(1, 3) == std::vector<std::uint8_t>{0, 0, 1});
    CHECK(pattern_bits(4, 3) == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(pattern_bits(6, 3) == std::vector<std::uint8_t>{1, 1, 0});
  }

  TEST_CASE("parity fitness") {
    for (int n = 1; n <= 6; ++n) {
      const Network zero(LayerSpec({n, n, 1}));
      CHECK(evaluate_parity(zero, n) == 0.5);
    }
    CHECK(evaluate_parity(xor_network(), 2) == 1.0);
    CHECK_THROWS(evaluate_parity(xor_network(), 3));

    Rng rng(5);
    double sum = 0;
    const int nets = 400;
    for (int k = 0; k < nets; ++k) sum += evaluate_parity(init_network(LayerSpec({4, 4, 4, 4, 1}), rng), 4);
    CHECK(std::abs(sum / nets - 0.5) < 0.05);
  }

  TEST_CASE("activation table") {
    const Network zero(LayerSpec({3, 2, 2, 1}));
    const ActivationTable zt = record_activations(zero, 3);
    for (std::size_t p = 0; p < zt.patterns(); ++p)
      for (double a : zt.row(p)) CHECK(a == 0.0);

    Rng rng(9);
    const Network net = init_network(LayerSpec({8, 8, 8, 8, 1}), rng);
    const ActivationTable t = record_activations(net, 8);
    CHECK(t.patterns() == 256);
    CHECK(t.hidden_layers() == 3);
    for (std::size_t h = 0; h < 3; ++h) CHECK(t.layer_width(h) == 8);
    for (std::size_t p : {0u, 17u, 128u, 255u}) {
      const ForwardResult r = forward(net, pattern_bits(p, 8));
      for (std::size_t h = 0; h < 3; ++h)
        for (std::size_t j = 0; j < 8; ++j) {
          CHECK(t.at(p, h, j) == r.hidden[h][j]);
          CHECK(std::abs(t.at(p, h, j)) <= 1.0);
        }
    }
  }

  TEST_CASE("hidden permutations leave outputs bit-identical") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      const LayerSpec spec({5, 6, 4, 5, 1}, trial % 3 != 0);
      const Network net = init_network(spec, rng);
      const Network perm = apply_permutation(net, test::random_permutation(spec, rng));
      CHECK(evaluate_parity(perm, 5) == evaluate_parity(net, 5));
      for (std::size_t p = 0; p < 32; ++p) {
        const auto bits = pattern_bits(p, 5);
        REQUIRE(forward(perm, bits).output() == forward(net, bits).output());
      }
    }
  }
}
