#include <doctest.h>

#include <cmath>

#include "cascade/acq_ei.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

// Numeric quadrature of E[(X - f_best)^+], X ~ N(mu, sigma^2), Simpson rule
// on [max(f_best, mu - 12 sigma), mu + 12 sigma].
double ei_quadrature(double mu, double sigma, double f_best) {
  if (sigma < 1e-14) return std::max(0.0, mu - f_best);
  const double lo = std::max(f_best, mu - 12.0 * sigma);
  const double hi = mu + 12.0 * sigma;
  if (hi <= lo) return 0.0;
  const int n = 4000;  // even
  const double h = (hi - lo) / n;
  auto g = [&](double x) {
    const double z = (x - mu) / sigma;
    return (x - f_best) * std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
  };
  double s = g(lo) + g(hi);
  for (int i = 1; i < n; ++i) s += g(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Two independent single-stage GPs forming a 2-stage chain, scalar everywhere.
struct TwoStage {
  StageDataset d1, d2;
  KernelSpec k1 = KernelSpec::gaussian_iso(1.5, 0, 1, 0.8);
  KernelSpec k2 = KernelSpec::gaussian_iso(2.0, 1, 1, 1.0);
  std::vector<GPPosterior> gps;

  explicit TwoStage(std::uint64_t seed) {
    Rng rng(seed);
    d1.inputs = rng.normal_matrix(8, 1);
    d1.outputs = rng.normal_matrix(8, 1);
    d2.inputs = rng.normal_matrix(10, 2);
    d2.outputs = rng.normal_matrix(10, 1);
    gps.push_back(fit_posterior(d1, k1, 1e-4));
    gps.push_back(fit_posterior(d2, k2, 1e-4));
  }

  EIContext context(int S, std::uint64_t seed, double f_best) const {
    EIContext ctx;
    for (const auto& g : gps) ctx.posteriors.push_back(&g);
    ctx.f_best = f_best;
    ctx.n_samples = S;
    ctx.base = BaseSamples::generate({1}, S, seed);
    return ctx;
  }
};

}  // namespace

TEST_CASE("ei_scalar matches numeric quadrature") {
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const double mu = 4.0 * rng.normal();
    const double sigma = std::abs(rng.normal()) + 1e-3;
    const double fb = 4.0 * rng.normal();
    CHECK(ei_scalar(mu, sigma, fb) ==
          doctest::Approx(ei_quadrature(mu, sigma, fb)).epsilon(1e-6).scale(1.0));
  }
  // sigma -> 0 limit
  CHECK(ei_scalar(2.0, 0.0, 1.0) == 1.0);
  CHECK(ei_scalar(1.0, 0.0, 2.0) == 0.0);
}

TEST_CASE("ei_scalar monotonicity in f_best and mu") {
  const double mu = 0.3, sigma = 0.7;
  double prev = std::numeric_limits<double>::infinity();
  for (double fb = -3.0; fb <= 3.0; fb += 0.25) {
    const double v = ei_scalar(mu, sigma, fb);
    CHECK(v <= prev + 1e-12);
    CHECK(v >= 0.0);
    prev = v;
  }
  prev = 0.0;
  for (double m = -3.0; m <= 3.0; m += 0.25) {
    const double v = ei_scalar(m, sigma, 0.1);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("u_tilde at the final stage equals the analytic EI") {
  const TwoStage ts(3);
  const EIContext ctx = ts.context(16, 5, 0.4);
  const Vector y_prev = Vector::Constant(1, 0.2);
  const Vector x = Vector::Constant(1, -0.5);
  auto [mu, var] = ts.gps[1].mean_var(joint_input(y_prev, x));
  CHECK(u_tilde(ctx, 2, y_prev, {x}) ==
        doctest::Approx(ei_scalar(mu[0], std::sqrt(var[0]), 0.4)).epsilon(1e-12));
}

TEST_CASE("u_tilde matches a hand-rolled reparameterized MC oracle") {
  const TwoStage ts(9);
  const int S = 64;
  const EIContext ctx = ts.context(S, 11, 0.2);
  const Vector x1 = Vector::Constant(1, 0.3);
  const Vector x2 = Vector::Constant(1, -0.7);
  const double got = u_tilde(ctx, 1, Vector(0), {x1, x2});

  auto [mu1, var1] = ts.gps[0].mean_var(x1);
  const double sd1 = std::sqrt(var1[0]);
  double acc = 0.0;
  for (int s = 0; s < S; ++s) {
    const double y1 = mu1[0] + sd1 * ctx.base.stage(1)(s, 0);
    auto [mu2, var2] = ts.gps[1].mean_var(joint_input(Vector::Constant(1, y1), x2));
    acc += ei_scalar(mu2[0], std::sqrt(var2[0]), 0.2);
  }
  CHECK(got == doctest::Approx(acc / S).epsilon(1e-10));
}

TEST_CASE("u_tilde is deterministic given fixed base samples and nonnegative") {
  const TwoStage ts(5);
  const EIContext ctx = ts.context(128, 42, 0.0);
  const Vector x1 = Vector::Constant(1, 0.1), x2 = Vector::Constant(1, 0.9);
  const double a = u_tilde(ctx, 1, Vector(0), {x1, x2});
  const double b = u_tilde(ctx, 1, Vector(0), {x1, x2});
  CHECK(a == b);
  CHECK(a >= 0.0);
  // Small control perturbations move the value continuously, not in jumps.
  const double c = u_tilde(ctx, 1, Vector(0), {x1, Vector::Constant(1, 0.9 + 1e-7)});
  CHECK(std::abs(c - a) < 1e-4);
}

TEST_CASE("u_tilde vanishes when the incumbent is unreachable") {
  const TwoStage ts(7);
  const EIContext ctx = ts.context(64, 2, 1e6);  // incumbent far above any mean
  const double v =
      u_tilde(ctx, 1, Vector(0), {Vector::Constant(1, 0.0), Vector::Constant(1, 0.0)});
  CHECK(v >= 0.0);
  CHECK(v < 1e-12);
}

TEST_CASE("maximize_ei returns the best tail split and stage component") {
  const TwoStage ts(13);
  const EIContext ctx = ts.context(32, 8, -0.5);
  std::vector<Box> boxes = {Box::cube(1, -2.0, 2.0), Box::cube(1, -2.0, 2.0)};
  OptBudget budget;
  budget.n_space_filling = 60;
  budget.max_refine_evals = 80;
  budget.seed = 4;
  const EISelection sel = maximize_ei(ctx, Vector(0), 1, boxes, budget);
  REQUIRE(sel.tail.size() == 1);
  CHECK(sel.value ==
        doctest::Approx(u_tilde(ctx, 1, Vector(0), {sel.x, sel.tail[0]})).epsilon(1e-12));
  // The joint value should at least match a modest grid search.
  double grid_best = 0.0;
  for (double a = -2.0; a <= 2.0; a += 0.25)
    for (double b = -2.0; b <= 2.0; b += 0.25)
      grid_best = std::max(grid_best,
                           u_tilde(ctx, 1, Vector(0),
                                   {Vector::Constant(1, a), Vector::Constant(1, b)}));
  CHECK(sel.value >= grid_best - 0.05 * std::max(grid_best, 1e-12));
}

TEST_CASE("base samples are reproducible per seed and shaped per stage") {
  const BaseSamples a = BaseSamples::generate({2, 3}, 10, 5);
  const BaseSamples b = BaseSamples::generate({2, 3}, 10, 5);
  const BaseSamples c = BaseSamples::generate({2, 3}, 10, 6);
  REQUIRE(a.by_stage.size() == 2);
  CHECK(a.stage(1).rows() == 10);
  CHECK(a.stage(1).cols() == 2);
  CHECK(a.stage(2).cols() == 3);
  CHECK((a.stage(1).array() == b.stage(1).array()).all());
  CHECK(!(a.stage(2).array() == c.stage(2).array()).all());
}
