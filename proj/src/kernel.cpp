#include "cascade/kernel.hpp"

#include <cmath>

namespace cascade {

void KernelSpec::validate() const {
  require(amplitude > 0.0, "KernelSpec: amplitude must be positive");
  for (Eigen::Index i = 0; i < lengthscales_w.size(); ++i)
    require(lengthscales_w[i] > 0.0, "KernelSpec: lengthscale_w must be positive");
  for (Eigen::Index i = 0; i < lengthscales_x.size(); ++i)
    require(lengthscales_x[i] > 0.0, "KernelSpec: lengthscale_x must be positive");
  if (kind == KernelKind::Matern)
    require(nu > 1.0, "KernelSpec: Matern requires nu > 1");
}

namespace {

double matern_unit(double r, double nu) {
  // Unit-amplitude Matern at scaled distance r (lengthscale already applied).
  if (r <= 0.0) return 1.0;
  const double s = std::sqrt(2.0 * nu) * r;
  const double c = std::pow(2.0, 1.0 - nu) / std::tgamma(nu);
  return c * std::pow(s, nu) * std::cyl_bessel_k(nu, s);
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Vector& p, const Vector& q) {
  require(p.size() == spec.input_dim() && q.size() == spec.input_dim(),
          "kernel_eval: point dimension does not match kernel spec");
  switch (spec.kind) {
    case KernelKind::Linear:
      return spec.amplitude * p.dot(q);
    case KernelKind::GaussianArd: {
      const Vector l = spec.all_lengthscales();
      const Vector d = (p - q).cwiseQuotient(l);
      return spec.amplitude * std::exp(-0.5 * d.squaredNorm());
    }
    case KernelKind::Matern: {
      const Vector l = spec.all_lengthscales();
      const double r = (p - q).cwiseQuotient(l).norm();
      return spec.amplitude * matern_unit(r, spec.nu);
    }
  }
  throw std::logic_error("kernel_eval: unhandled kernel kind");
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& P) {
  const Eigen::Index n = P.rows();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = kernel_eval(spec, P.row(i), P.row(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      K(i, j) = kernel_eval(spec, P.row(i), P.row(j));
      K(j, i) = K(i, j);
    }
  }
  return K;
}

Vector kernel_vector(const KernelSpec& spec, const Matrix& P, const Vector& p) {
  Vector k(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) k[i] = kernel_eval(spec, P.row(i), p);
  return k;
}

Matrix kernel_cross(const KernelSpec& spec, const Matrix& Q, const Matrix& P) {
  if (spec.kind == KernelKind::GaussianArd) {
    // Batched form: scale coordinates, then use the squared-distance identity.
    const Vector inv_l = spec.all_lengthscales().cwiseInverse();
    const Matrix Qs = Q * inv_l.asDiagonal();
    const Matrix Ps = P * inv_l.asDiagonal();
    const Vector qn = Qs.rowwise().squaredNorm();
    const Vector pn = Ps.rowwise().squaredNorm();
    Matrix D = -2.0 * Qs * Ps.transpose();
    D.colwise() += qn;
    D.rowwise() += pn.transpose();
    return spec.amplitude * (-0.5 * D.cwiseMax(0.0)).array().exp().matrix();
  }
  Matrix K(Q.rows(), P.rows());
  for (Eigen::Index i = 0; i < Q.rows(); ++i)
    for (Eigen::Index j = 0; j < P.rows(); ++j)
      K(i, j) = kernel_eval(spec, Q.row(i), P.row(j));
  return K;
}

}  // namespace cascade
