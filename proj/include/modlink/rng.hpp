#pragma once

#include <cstdint>
#include <random>

namespace modlink {

/// Every stochastic operation draws from one of these, seeded per trial.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// seed(trial i of setup s) = mix64(mix64(mix64(base) ^ s) ^ i)
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t setup,
                                    std::uint64_t trial) noexcept {
  return mix64(mix64(mix64(base) ^ setup) ^ trial);
}

}  // namespace modlink
