#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ovtrack {

/// Deterministic random source. A fixed seed reproduces the exact draw
/// sequence within one process, which is what the file-level determinism
/// guarantees of the CLI rest on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal(double mean = 0.0, double stdev = 1.0) {
    return mean + stdev * normal_(gen_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

  bool bernoulli(double p) {
    return std::bernoulli_distribution(p)(gen_);
  }

  std::vector<double> gaussian_vector(int dim, double stdev = 1.0) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) x = normal(0.0, stdev);
    return v;
  }

  /// Uniform draw on the unit sphere.
  std::vector<double> unit_vector(int dim);

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derives an independent stream seed, used to give each video its own
/// generator during scenario synthesis.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ovtrack
