#pragma once

#include <cstdint>
#include <random>

#include "cascade/common.hpp"

namespace cascade {

// Counter-based seed derivation: adding a new consumer stream never perturbs
// existing ones. SplitMix64 finalizer over (master, stream, counter).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter = 0) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1) +
                    0xbf58476d1ce4e5b9ull * (counter + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Stream identifiers used by the harness; keep stable across releases so
// traces reproduce.
enum class Stream : std::uint64_t {
  InitialDesign = 1,
  BaseSamples = 2,
  InnerOpt = 3,
  Benchmark = 4,
  HyperFit = 5,
  Method = 6,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return uni_(engine_); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() { return normal_(engine_); }

  Vector uniform_in(const Box& box) {
    Vector x(box.dim());
    for (Eigen::Index i = 0; i < box.dim(); ++i)
      x[i] = uniform(box.lower[i], box.upper[i]);
    return x;
  }

  Vector normal_vector(Eigen::Index n) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix z(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) z(i, j) = normal();
    return z;
  }

  double gamma(double shape, double scale) {
    std::gamma_distribution<double> g(shape, scale);
    return g(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cascade
