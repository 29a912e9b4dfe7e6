#pragma once

#include "cascade/cascade_model.hpp"

namespace cascade {

/// Fixed standard-normal draws for the reparameterized Monte-Carlo utility:
/// one S x M^(m) block per middle stage. Held fixed for the duration of one
/// acquisition optimization and regenerated between selections.
struct BaseSamples {
  std::vector<Matrix> by_stage;  // index m-1 holds stage m (stages 1..N-1)
  std::uint64_t seed = 0;

  static BaseSamples generate(const std::vector<int>& middle_output_dims, int S,
                              std::uint64_t seed);
  const Matrix& stage(int m) const { return by_stage.at(m - 1); }
};

/// Everything one EI-based selection needs: fitted per-stage posteriors, the
/// incumbent, and the pinned randomness.
struct EIContext {
  std::vector<const GPPosterior*> posteriors;  // index n-1 holds stage n
  double f_best = 0.0;
  int n_samples = 1000;
  BaseSamples base;

  int n_stages() const { return static_cast<int>(posteriors.size()); }
};

/// Analytic expected improvement E[(X - f_best)^+] for X ~ N(mu, sigma^2).
double ei_scalar(double mu, double sigma, double f_best);

/// Monte-Carlo lower-bound utility: propagate replicates through the middle
/// stages with the fixed base samples, then average the analytic final-stage
/// EI. `controls[k]` is x^(n+k).
double u_tilde(const EIContext& ctx, int n, const Vector& y_prev,
               const std::vector<Vector>& controls);

struct EISelection {
  Vector x;                  // stage-n component
  std::vector<Vector> tail;  // x^(n+1..N)
  double value = 0.0;
};

/// Jointly maximize u_tilde over x^(n..N); the stage-n component is the
/// selection.
EISelection maximize_ei(const EIContext& ctx, const Vector& y_prev, int n,
                        const std::vector<Box>& stage_boxes, const OptBudget& budget);

}  // namespace cascade
