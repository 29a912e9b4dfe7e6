#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box constraint [lower, upper] componentwise.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector up) : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.size() != upper.size())
      throw std::invalid_argument("Box: lower/upper size mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (!(lower[i] <= upper[i]))
        throw std::invalid_argument("Box: lower > upper at coordinate " + std::to_string(i));
  }

  static Box cube(int dim, double lo, double up) {
    return Box(Vector::Constant(dim, lo), Vector::Constant(dim, up));
  }

  Eigen::Index dim() const { return lower.size(); }
  Vector width() const { return upper - lower; }

  bool contains(const Vector& x, double tol = 1e-12) const {
    if (x.size() != dim()) return false;
    for (Eigen::Index i = 0; i < dim(); ++i)
      if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    return true;
  }

  Vector clip(const Vector& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }

  /// Cartesian product of boxes, in order.
  static Box concat(const std::vector<Box>& boxes) {
    Eigen::Index d = 0;
    for (const auto& b : boxes) d += b.dim();
    Vector lo(d), up(d);
    Eigen::Index off = 0;
    for (const auto& b : boxes) {
      lo.segment(off, b.dim()) = b.lower;
      up.segment(off, b.dim()) = b.upper;
      off += b.dim();
    }
    return Box(std::move(lo), std::move(up));
  }
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace cascade
