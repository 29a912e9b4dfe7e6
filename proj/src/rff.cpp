#include "cascade/rff.hpp"

#include <cmath>

#include "cascade/rng.hpp"

namespace cascade {

RFFSample::RFFSample(const KernelSpec& kernel, int n_features, std::uint64_t seed)
    : amplitude_(kernel.amplitude), seed_(seed) {
  require(n_features >= 1, "RFFSample: n_features must be >= 1");
  kernel.validate();
  require(kernel.kind == KernelKind::GaussianArd || kernel.kind == KernelKind::Matern,
          "RFFSample: only Gaussian and Matern kernels have RFF support here");
  const Eigen::Index d = kernel.input_dim();
  const Vector inv_l = kernel.all_lengthscales().cwiseInverse();
  Rng rng(seed);
  freq_.resize(n_features, d);
  for (int i = 0; i < n_features; ++i) {
    Vector w = rng.normal_vector(d).cwiseProduct(inv_l);
    if (kernel.kind == KernelKind::Matern) {
      // Spectral frequencies of a Matern kernel follow a multivariate t with
      // 2*nu degrees of freedom.
      const double chi2 = 2.0 * rng.gamma(kernel.nu, 1.0);
      w /= std::sqrt(chi2 / (2.0 * kernel.nu));
    }
    freq_.row(i) = w;
  }
  weights_ = rng.normal_vector(2 * n_features);
}

Vector RFFSample::features(const Vector& p) const {
  const int m = n_features();
  const Vector phase = freq_ * p;
  Vector z(2 * m);
  const double scale = std::sqrt(amplitude_ / m);
  for (int i = 0; i < m; ++i) {
    z[2 * i] = scale * std::cos(phase[i]);
    z[2 * i + 1] = scale * std::sin(phase[i]);
  }
  return z;
}

double RFFSample::operator()(const Vector& p) const {
  require(p.size() == freq_.cols(), "RFFSample: dimension mismatch");
  return weights_.dot(features(p));
}

Vector RFFSample::eval_batch(const Matrix& P) const {
  require(P.cols() == freq_.cols(), "RFFSample: dimension mismatch");
  const int m = n_features();
  const Matrix phase = P * freq_.transpose();  // |P| x m
  const double scale = std::sqrt(amplitude_ / m);
  Vector wc(m), ws(m);
  for (int i = 0; i < m; ++i) {
    wc[i] = weights_[2 * i];
    ws[i] = weights_[2 * i + 1];
  }
  return scale * (phase.array().cos().matrix() * wc +
                  phase.array().sin().matrix() * ws);
}

double RFFSample::kernel_estimate(const Vector& p, const Vector& q) const {
  // cos^2 + sin^2 collapses pairwise, so the self-covariance is the amplitude
  // exactly; skip the roundoff of summing it term by term.
  if (p == q) return amplitude_;
  return features(p).dot(features(q));
}

}  // namespace cascade
