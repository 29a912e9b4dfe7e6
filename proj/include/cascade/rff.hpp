#pragma once

#include <cstdint>

#include "cascade/kernel.hpp"

namespace cascade {

/// One function drawn from the GP prior via random Fourier features with the
/// paired cos/sin convention, so the feature map satisfies
/// <z(p), z(p)> = sigma_f exactly. Deterministic given the seed.
class RFFSample {
 public:
  RFFSample(const KernelSpec& kernel, int n_features, std::uint64_t seed);

  double operator()(const Vector& p) const;

  /// Batched evaluation; rows of P are points.
  Vector eval_batch(const Matrix& P) const;

  /// Kernel estimate implied by the feature map.
  double kernel_estimate(const Vector& p, const Vector& q) const;

  int n_features() const { return static_cast<int>(freq_.rows()); }
  std::uint64_t seed() const { return seed_; }

 private:
  Vector features(const Vector& p) const;  // 2 * n_features entries

  Matrix freq_;     // n_features x input_dim
  Vector weights_;  // 2 * n_features, standard normal draws
  double amplitude_;
  std::uint64_t seed_;
};

}  // namespace cascade
