#include "cascade/inner_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascade/rng.hpp"

namespace cascade {

Matrix lhs_sample(const Box& box, int n, std::uint64_t seed) {
  require(n >= 1, "lhs_sample: n must be >= 1");
  const Eigen::Index d = box.dim();
  Rng rng(seed);
  Matrix X(n, d);
  std::vector<int> perm(n);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    const double lo = box.lower[j];
    const double w = box.upper[j] - box.lower[j];
    for (int i = 0; i < n; ++i)
      X(i, j) = lo + w * ((perm[i] + rng.uniform()) / n);
  }
  return X;
}

namespace {

// Local refinement: quasi-Newton on -f with central finite differences,
// falling back to a compass poll when the line search stalls. Every iterate
// is clipped to the box.
class Refiner {
 public:
  Refiner(const Objective& f, const Box& box, int* evals, int cap)
      : f_(f), box_(box), evals_(evals), cap_(cap) {}

  // Returns (x, f(x)) with f(x) >= f0.
  std::pair<Vector, double> run(Vector x, double fx, double tol) {
    if (*evals_ >= cap_) return {x, fx};
    const Eigen::Index d = box_.dim();
    const Vector width = box_.width();
    const Vector h = (1e-6 * width).cwiseMax(1e-12);
    Matrix H = Matrix::Identity(d, d);
    Vector g = grad(x, h);
    double compass_step = 0.05;
    int stalls = 0;

    for (int iter = 0; iter < 200 && *evals_ < cap_; ++iter) {
      Vector dir = H * g;  // ascent direction
      if (dir.dot(g) <= 0.0) dir = g;
      const double dn = dir.norm();
      if (dn < 1e-15) break;

      // Backtracking line search, initial step bounded by a box fraction.
      double alpha = std::min(1.0, 0.25 * width.norm() / dn);
      Vector xn;
      double fn = fx;
      bool accepted = false;
      for (int ls = 0; ls < 14 && *evals_ < cap_; ++ls, alpha *= 0.5) {
        xn = box_.clip(x + alpha * dir);
        if ((xn - x).norm() < 1e-15) continue;
        fn = eval(xn);
        if (fn > fx + 1e-15) {
          accepted = true;
          break;
        }
      }

      if (!accepted) {
        // Compass poll at the current scale, shrinking until progress.
        bool polled = false;
        while (!polled && compass_step * width.maxCoeff() > 1e-12 && *evals_ < cap_) {
          for (Eigen::Index j = 0; j < d && !polled; ++j) {
            for (int sgn : {1, -1}) {
              Vector xc = x;
              xc[j] = x[j] + sgn * compass_step * width[j];
              xc = box_.clip(xc);
              if ((xc - x).norm() < 1e-15) continue;
              const double fc = eval(xc);
              if (fc > fx + 1e-15) {
                xn = xc;
                fn = fc;
                polled = true;
                break;
              }
              if (*evals_ >= cap_) break;
            }
          }
          if (!polled) compass_step *= 0.5;
        }
        if (!polled) break;
      }

      const double gain = fn - fx;
      Vector gn = grad(xn, h);
      const Vector s = xn - x;
      const Vector y = g - gn;  // gradient-of-(-f) difference
      const double sy = s.dot(y);
      if (sy > 1e-12) {
        const Matrix I = Matrix::Identity(d, d);
        const Matrix V = I - (s * y.transpose()) / sy;
        H = V * H * V.transpose() + (s * s.transpose()) / sy;
      }
      x = xn;
      fx = fn;
      g = gn;

      if (gain < tol * (1.0 + std::abs(fx))) {
        if (++stalls >= 2) break;
      } else {
        stalls = 0;
      }
    }
    return {x, fx};
  }

 private:
  double eval(const Vector& x) {
    ++*evals_;
    try {
      const double v = f_(x);
      return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (...) {
      return -std::numeric_limits<double>::infinity();
    }
  }

  Vector grad(const Vector& x, const Vector& h) {
    Vector g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (*evals_ + 2 > cap_) {
        g[j] = 0.0;
        continue;
      }
      Vector xp = x, xm = x;
      xp[j] = std::min(x[j] + h[j], box_.upper[j]);
      xm[j] = std::max(x[j] - h[j], box_.lower[j]);
      const double denom = xp[j] - xm[j];
      g[j] = denom > 0.0 ? (eval(xp) - eval(xm)) / denom : 0.0;
    }
    return g;
  }

  const Objective& f_;
  const Box& box_;
  int* evals_;
  int cap_;
};

}  // namespace

OptResult maximize(const Objective& f, const Box& box, const OptBudget& budget) {
  require(budget.n_top >= 1 && budget.n_top <= budget.n_space_filling,
          "maximize: need 1 <= n_top <= n_space_filling");
  const Matrix cands = lhs_sample(box, budget.n_space_filling, budget.seed);
  int evals = 0;

  struct Scored {
    int idx;
    double value;
  };
  std::vector<Scored> scored;
  scored.reserve(cands.rows());
  for (Eigen::Index i = 0; i < cands.rows(); ++i) {
    ++evals;
    try {
      const double v = f(cands.row(i));
      if (std::isfinite(v)) scored.push_back({static_cast<int>(i), v});
    } catch (...) {
      // candidate skipped
    }
  }
  if (scored.empty()) throw std::runtime_error("maximize: all candidates failed");

  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    return a.value > b.value;
  });

  const int n_top = std::min<int>(budget.n_top, static_cast<int>(scored.size()));
  Vector best_x = cands.row(scored[0].idx);
  double best_v = scored[0].value;

  int refine_evals = 0;
  std::vector<std::pair<Vector, double>> refined;
  for (int k = 0; k < n_top; ++k) {
    Refiner r(f, box, &refine_evals, budget.max_refine_evals);
    refined.push_back(
        r.run(cands.row(scored[k].idx), scored[k].value, budget.coarse_tol));
  }
  for (const auto& [x, v] : refined) {
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  {
    Refiner r(f, box, &refine_evals, budget.max_refine_evals);
    auto [x, v] = r.run(best_x, best_v, budget.fine_tol);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return {box.clip(best_x), best_v, evals + refine_evals};
}

}  // namespace cascade
