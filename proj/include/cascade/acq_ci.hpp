#pragma once

#include "cascade/cascade_model.hpp"

namespace cascade {

/// Parameters of the credible-interval machinery.
struct CIParams {
  double beta_sqrt = 2.0;  // beta^{1/2}
  double l_f = 1.0;        // Lipschitz constant of the stage functions
  double c_eta = 1e-4;     // eta_t = c_eta * (1 + log t)^{-1}

  double eta(int t) const {
    require(t >= 1, "CIParams: eta needs t >= 1");
    return c_eta / (1.0 + std::log(static_cast<double>(t)));
  }

  void validate() const {
    require(beta_sqrt > 0.0 && l_f > 0.0 && c_eta > 0.0,
            "CIParams: all parameters must be positive");
  }
};

/// Result of the credible-interval recursion over stages n..m.
struct CIBounds {
  std::vector<Vector> mu_tilde;     // one vector per stage
  std::vector<Vector> sigma_tilde;  // per stage, per output, always >= 0
  double lcb = 0.0;
  double ucb = 0.0;

  const Vector& final_mu() const { return mu_tilde.back(); }
  double final_sigma() const { return sigma_tilde.back().sum(); }
};

/// Posteriors plus box structure for a full cascade chain; the unit the
/// CI operations work on.
struct CIChain {
  std::vector<const GPPosterior*> posteriors;  // index n-1 holds stage n
  std::vector<Box> boxes;                      // control boxes per stage
  Vector zero_prev;                            // y^(0)

  int n_stages() const { return static_cast<int>(posteriors.size()); }
  Box tail_box(int n) const {
    return Box::concat(std::vector<Box>(boxes.begin() + (n - 1), boxes.end()));
  }
  std::vector<Vector> split_tail(int n, const Vector& z) const {
    std::vector<Vector> xs;
    Eigen::Index off = 0;
    for (int m = n; m <= n_stages(); ++m) {
      xs.push_back(z.segment(off, boxes[m - 1].dim()));
      off += boxes[m - 1].dim();
    }
    return xs;
  }
};

/// Credible-interval recursion: mean chain through posterior means, widths
/// accumulated with the Lipschitz term. `controls[k]` is x^(n+k).
CIBounds ci_recursion(const CIChain& chain, int n, const Vector& y_prev,
                      const std::vector<Vector>& controls, const CIParams& params);

std::pair<double, double> lcb_ucb(const CIChain& chain, int n, const Vector& y_prev,
                                  const std::vector<Vector>& controls,
                                  const CIParams& params);

/// Pessimistic global maximum estimator Q_t = max over the full control box
/// of the LCB from stage 1.
OptResult q_t(const CIChain& chain, const CIParams& params, const OptBudget& budget);

/// Optimistic counterpart: max over the full control box of the UCB.
OptResult max_ucb(const CIChain& chain, const CIParams& params, const OptBudget& budget);

/// max over x^(n..N) of LCB given the previous output.
OptResult lcb_given_y(const CIChain& chain, const Vector& y_prev, int n,
                      const CIParams& params, const OptBudget& budget);

/// max over x^(n..N) of UCB given the previous output.
OptResult ucb_given_y(const CIChain& chain, const Vector& y_prev, int n,
                      const CIParams& params, const OptBudget& budget);

/// max over the tail x^(n+1..N) of UCB with x^(n) fixed.
double ucb_given_xy(const CIChain& chain, int n, const Vector& x_n,
                    const Vector& y_prev, const CIParams& params,
                    const OptBudget& budget);

/// max over the tail of the final-stage width sigma-tilde with x^(n) fixed.
double max_sigma_tail(const CIChain& chain, int n, const Vector& x_n,
                      const Vector& y_prev, const CIParams& params,
                      const OptBudget& budget);

struct CISelection {
  Vector x;
  double value = 0.0;  // c = max(a, eta_t * b) at the selection
};

/// CI-based acquisition: argmax over x^(n) of max(a, eta_t * b), with the
/// pessimistic baseline q_value = max(LCB(y), Q) precomputed per sweep.
CISelection ci_select(const CIChain& chain, const Vector& y_prev, int n, int t,
                      double q_value, const CIParams& params,
                      const OptBudget& outer_budget, const OptBudget& nested_budget);

/// Cascade UCB over the full chain from stage 1.
double cucb(const CIChain& chain, const std::vector<Vector>& controls,
            const CIParams& params);

/// Max 1-norm of a central-finite-difference gradient over random probes.
double estimate_lf(const std::function<double(const Vector&)>& f, const Box& domain,
                   int n_probes, std::uint64_t seed, double step_frac = 1e-4);

/// Lipschitz constant of the posterior standard deviation for supported
/// kernels; requires an isotropic lengthscale for Gaussian/Matern.
double sigma_lipschitz_bound(const KernelSpec& kernel);

struct RegretBoundConstants {
  double c0 = 0, c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  double l_sigma = 0;
  bool overflow = false;
};

RegretBoundConstants regret_bound_constants(int N, double l_f, double l_sigma,
                                     double beta_sqrt);

}  // namespace cascade
