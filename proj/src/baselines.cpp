#include "cascade/baselines.hpp"

#include <cmath>

#include "cascade/rng.hpp"

namespace cascade {

Box widen_range(const Box& range, double factor) {
  const Vector mid = 0.5 * (range.lower + range.upper);
  const Vector half = 0.5 * factor * (range.upper - range.lower);
  return Box(mid - half, mid + half);
}

std::vector<Vector> random_select(const std::vector<Box>& boxes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector> xs;
  for (const Box& b : boxes) xs.push_back(rng.uniform_in(b));
  return xs;
}

Vector fb_select(const GPPosterior& fb_posterior, const Box& joint_box, FbMode mode,
                 double f_best, const OptBudget& budget) {
  Objective obj = [&](const Vector& x) {
    auto [mu, var] = fb_posterior.mean_var(x);
    const double sigma = std::sqrt(var[0]);
    return mode == FbMode::Ei ? ei_scalar(mu[0], sigma, f_best)
                              : mu[0] + 2.0 * sigma;
  };
  return maximize(obj, joint_box, budget).x;
}

std::vector<Vector> cbo_select(const std::vector<const GPPosterior*>& posteriors,
                               const std::vector<Box>& stage_boxes,
                               const std::vector<Box>& output_ranges,
                               const CboParams& params, double f_best,
                               const OptBudget& budget) {
  params.validate();
  const int N = static_cast<int>(posteriors.size());
  require(static_cast<int>(stage_boxes.size()) == N &&
              static_cast<int>(output_ranges.size()) == N - 1,
          "cbo_select: stage count mismatch");

  std::vector<Vector> controls(N);
  Vector y_desire;  // target output for the stage below

  for (int n = N; n >= 1; --n) {
    const Box& xbox = stage_boxes[n - 1];
    const bool has_prev = n > 1;
    const Box ybox =
        has_prev ? widen_range(output_ranges[n - 2], params.widen_factor) : Box();
    const Box joint = has_prev ? Box::concat({ybox, xbox}) : xbox;
    const Eigen::Index yd = has_prev ? ybox.dim() : 0;

    Objective obj = [&](const Vector& z) {
      const Vector y_prev = z.head(yd);
      const Vector x = z.tail(z.size() - yd);
      auto [m, v] = posteriors[n - 1]->mean_var(joint_input(y_prev, x));
      if (n == N)
        return ei_scalar(m[0], std::sqrt(v[0]), f_best);
      // Earlier stages: minimize the variance-weighted distance to the
      // desired output (diagonal-covariance quadratic form), so maximize
      // its negation.
      double q = 0.0;
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double vi = std::max(v[i], 1e-12);
        const double d = m[i] - y_desire[i];
        q += (params.kappa1 / vi + params.kappa2 * vi) * d * d;
      }
      if (params.cost) q += params.cost(z);
      return -q;
    };

    const OptResult res =
        maximize(obj, joint, budget.with_seed(derive_seed(budget.seed, n)));
    controls[n - 1] = res.x.tail(res.x.size() - yd);
    if (has_prev) y_desire = res.x.head(yd);
  }
  return controls;
}

}  // namespace cascade
