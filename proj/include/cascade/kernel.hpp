#pragma once

#include "cascade/common.hpp"

namespace cascade {

enum class KernelKind { GaussianArd, Linear, Matern };

/// Covariance on joint points (w, x): the first prev_dim() coordinates are the
/// previous-stage output, the rest are the stage controls. The amplitude
/// multiplies the unit-scale kernel directly, i.e. k(p,p) = amplitude.
struct KernelSpec {
  KernelKind kind = KernelKind::GaussianArd;
  double amplitude = 1.0;       // output-variance scale sigma_f
  Vector lengthscales_w;        // one per previous-output coordinate (may be empty)
  Vector lengthscales_x;        // one per control coordinate
  double nu = 2.5;              // Matern degrees of freedom, must exceed 1

  Eigen::Index prev_dim() const { return lengthscales_w.size(); }
  Eigen::Index control_dim() const { return lengthscales_x.size(); }
  Eigen::Index input_dim() const { return prev_dim() + control_dim(); }

  void validate() const;

  /// All lengthscales stacked (w first, then x).
  Vector all_lengthscales() const {
    Vector l(input_dim());
    l.head(prev_dim()) = lengthscales_w;
    l.tail(control_dim()) = lengthscales_x;
    return l;
  }

  static KernelSpec gaussian(double sigma_f, Vector lw, Vector lx) {
    KernelSpec s;
    s.kind = KernelKind::GaussianArd;
    s.amplitude = sigma_f;
    s.lengthscales_w = std::move(lw);
    s.lengthscales_x = std::move(lx);
    s.validate();
    return s;
  }

  static KernelSpec gaussian_iso(double sigma_f, Eigen::Index prev_dim,
                                 Eigen::Index control_dim, double ell) {
    return gaussian(sigma_f, Vector::Constant(prev_dim, ell),
                    Vector::Constant(control_dim, ell));
  }
};

double kernel_eval(const KernelSpec& spec, const Vector& p, const Vector& q);

/// Gram matrix of a point set (rows of P are joint points).
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& P);

/// Cross-covariance vector between one point and the rows of P.
Vector kernel_vector(const KernelSpec& spec, const Matrix& P, const Vector& p);

/// Cross-covariance between the rows of Q and the rows of P (|Q| x |P|).
Matrix kernel_cross(const KernelSpec& spec, const Matrix& Q, const Matrix& P);

}  // namespace cascade
