#pragma once

#include "cascade/acq_ei.hpp"

namespace cascade {

/// CBO hyperparameters and the widened previous-output ranges it optimizes
/// over (one box per stage 1..N-1, widened around the true range midpoint).
struct CboParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double widen_factor = 2.0;
  std::function<double(const Vector&)> cost;  // defaults to zero

  void validate() const {
    require(kappa1 > 0.0 && kappa2 > 0.0, "CboParams: kappas must be positive");
  }
};

/// Widen [lo, hi] symmetrically about its midpoint by the given factor.
Box widen_range(const Box& range, double factor);

/// Uniform draw of a full control chain, one vector per stage.
std::vector<Vector> random_select(const std::vector<Box>& boxes, std::uint64_t seed);

enum class FbMode { Ei, Ucb };

/// Fully black-box selection on the concatenated control box: EI or GP-UCB
/// with beta^{1/2} = 2.
Vector fb_select(const GPPosterior& fb_posterior, const Box& joint_box, FbMode mode,
                 double f_best, const OptBudget& budget);

/// CBO: final stage picks (y_desire, x^N) by EI over the widened range, then
/// earlier stages chase their desired outputs in reverse order. Purely
/// model-based; the caller executes the returned chain afterwards.
std::vector<Vector> cbo_select(const std::vector<const GPPosterior*>& posteriors,
                               const std::vector<Box>& stage_boxes,
                               const std::vector<Box>& output_ranges,
                               const CboParams& params, double f_best,
                               const OptBudget& budget);

}  // namespace cascade
