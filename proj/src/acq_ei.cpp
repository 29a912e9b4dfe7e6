#include "cascade/acq_ei.hpp"

#include <cmath>

#include "cascade/rng.hpp"

namespace cascade {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Order-independent mean via pairwise reduction.
double pairwise_mean(std::vector<double>& v) {
  const std::size_t count = v.size();
  std::size_t n = count;
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n % 2 == 1) v[half] = v[n - 1];
    n = half + n % 2;
  }
  return v[0] / static_cast<double>(count);
}

}  // namespace

BaseSamples BaseSamples::generate(const std::vector<int>& middle_output_dims, int S,
                                  std::uint64_t seed) {
  BaseSamples b;
  b.seed = seed;
  Rng rng(seed);
  for (std::size_t m = 0; m < middle_output_dims.size(); ++m)
    b.by_stage.push_back(rng.normal_matrix(S, middle_output_dims[m]));
  return b;
}

double ei_scalar(double mu, double sigma, double f_best) {
  require(sigma >= 0.0, "ei_scalar: sigma must be nonnegative");
  const double delta = mu - f_best;
  if (sigma < 1e-12) return std::max(0.0, delta);
  const double z = delta / sigma;
  return std::max(0.0, sigma * normal_pdf(z) + delta * normal_cdf(z));
}

double u_tilde(const EIContext& ctx, int n, const Vector& y_prev,
               const std::vector<Vector>& controls) {
  const int N = ctx.n_stages();
  require(n >= 1 && n <= N, "u_tilde: bad stage index");
  require(static_cast<int>(controls.size()) == N - n + 1,
          "u_tilde: need controls for stages n..N");

  if (n == N) {
    // No middle stages: the final-stage EI is analytic, no sampling.
    auto [mu, var] = ctx.posteriors[N - 1]->mean_var(joint_input(y_prev, controls[0]));
    return ei_scalar(mu[0], std::sqrt(var[0]), ctx.f_best);
  }

  const int S = ctx.n_samples;
  // Replicate states, one row per sample. All rows start at y_prev, so the
  // first middle-stage query collapses to a single point.
  {
    auto [mu, var] =
        ctx.posteriors[n - 1]->mean_var(joint_input(y_prev, controls[0]));
    const Vector sd = var.cwiseSqrt();
    Matrix Y(S, mu.size());
    const Matrix& omega = ctx.base.stage(n);
    for (int s = 0; s < S; ++s)
      Y.row(s) = mu.transpose() + sd.transpose().cwiseProduct(omega.row(s));

    for (int m = n + 1; m <= N - 1; ++m) {
      const Vector& x = controls[m - n];
      Matrix P(S, Y.cols() + x.size());
      P.leftCols(Y.cols()) = Y;
      P.rightCols(x.size()).rowwise() = x.transpose();
      auto [mus, vars] = ctx.posteriors[m - 1]->mean_var_batch(P);
      const Matrix sds = vars.cwiseSqrt();
      const Matrix& om = ctx.base.stage(m);
      Y = mus + sds.cwiseProduct(om.topRows(S));
    }

    const Vector& xN = controls[N - n];
    Matrix P(S, Y.cols() + xN.size());
    P.leftCols(Y.cols()) = Y;
    P.rightCols(xN.size()).rowwise() = xN.transpose();
    auto [mus, vars] = ctx.posteriors[N - 1]->mean_var_batch(P);
    std::vector<double> ei(S);
    for (int s = 0; s < S; ++s)
      ei[s] = ei_scalar(mus(s, 0), std::sqrt(vars(s, 0)), ctx.f_best);
    return pairwise_mean(ei);
  }
}

EISelection maximize_ei(const EIContext& ctx, const Vector& y_prev, int n,
                        const std::vector<Box>& stage_boxes, const OptBudget& budget) {
  const int N = ctx.n_stages();
  require(static_cast<int>(stage_boxes.size()) == N,
          "maximize_ei: need one box per stage");
  std::vector<Box> tail_boxes(stage_boxes.begin() + (n - 1), stage_boxes.end());
  const Box joint = Box::concat(tail_boxes);

  Objective obj = [&](const Vector& z) {
    std::vector<Vector> xs;
    Eigen::Index off = 0;
    for (const Box& b : tail_boxes) {
      xs.push_back(z.segment(off, b.dim()));
      off += b.dim();
    }
    return u_tilde(ctx, n, y_prev, xs);
  };

  const OptResult res = maximize(obj, joint, budget);

  EISelection sel;
  sel.value = res.value;
  Eigen::Index off = 0;
  sel.x = res.x.segment(off, tail_boxes[0].dim());
  off += tail_boxes[0].dim();
  for (std::size_t k = 1; k < tail_boxes.size(); ++k) {
    sel.tail.push_back(res.x.segment(off, tail_boxes[k].dim()));
    off += tail_boxes[k].dim();
  }
  return sel;
}

}  // namespace cascade
