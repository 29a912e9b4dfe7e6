#pragma once

#include <optional>

#include "cascade/inner_opt.hpp"
#include "cascade/kernel.hpp"

namespace cascade {

/// Training data for one stage: rows of `inputs` are joint points (w, x),
/// columns of `outputs` are the M output coordinates.
struct StageDataset {
  Matrix inputs;   // n x (prev_dim + control_dim)
  Matrix outputs;  // n x M

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index n_outputs() const { return outputs.cols(); }

  void validate() const {
    require(inputs.rows() == outputs.rows(), "StageDataset: row count mismatch");
    require(inputs.allFinite() && outputs.allFinite(),
            "StageDataset: non-finite values");
  }

  void append(const Vector& input, const Vector& output) {
    if (size() == 0 && inputs.cols() == 0) {
      inputs.resize(0, input.size());
      outputs.resize(0, output.size());
    }
    require(input.size() == inputs.cols() && output.size() == outputs.cols(),
            "StageDataset: append dimension mismatch");
    inputs.conservativeResize(inputs.rows() + 1, Eigen::NoChange);
    outputs.conservativeResize(outputs.rows() + 1, Eigen::NoChange);
    inputs.row(inputs.rows() - 1) = input;
    outputs.row(outputs.rows() - 1) = output;
  }
};

/// Fitted GP with a cached Cholesky factor of (K + sigma^2 I), shared across
/// the M independent output coordinates. Immutable after construction.
class GPPosterior {
 public:
  GPPosterior(KernelSpec kernel, double sigma2);  // prior (no data)
  GPPosterior(StageDataset data, KernelSpec kernel, double sigma2);

  const KernelSpec& kernel() const { return kernel_; }
  double sigma2() const { return sigma2_; }
  Eigen::Index n_train() const { return X_.rows(); }
  Eigen::Index n_outputs() const { return M_; }
  const Matrix& train_inputs() const { return X_; }

  /// Posterior mean and variance per output at one joint point.
  std::pair<Vector, Vector> mean_var(const Vector& p) const;

  /// Batched query: rows of P are joint points; returns (means, variances)
  /// each |P| x M.
  std::pair<Matrix, Matrix> mean_var_batch(const Matrix& P) const;

  double mean_scalar(const Vector& p) const { return mean_var(p).first[0]; }

 private:
  KernelSpec kernel_;
  double sigma2_;
  Eigen::Index M_;
  Matrix X_;      // training inputs
  Matrix L_;      // lower Cholesky of K + sigma^2 I (+ jitter)
  Matrix alpha_;  // (K + sigma^2 I)^{-1} Y, one column per output
};

GPPosterior fit_posterior(const StageDataset& data, const KernelSpec& kernel,
                          double sigma2);

double log_marginal_likelihood(const StageDataset& data, const KernelSpec& kernel,
                               double sigma2);

struct HyperFitResult {
  KernelSpec kernel;
  double lml = 0.0;
  bool fallback = false;  // true when all restarts failed numerically
};

/// Maximize the log marginal likelihood over log-amplitude and
/// log-lengthscales with multi-start search. Never returns a kernel whose
/// LML is below the initial one.
HyperFitResult fit_hyperparams(const StageDataset& data, const KernelSpec& init,
                               double sigma2, std::uint64_t seed = 0,
                               int n_restarts = 5,
                               std::optional<OptBudget> budget = std::nullopt);

/// 0.5 * log det(I + sigma^{-2} K); K must be symmetric PSD.
double information_gain(const Matrix& K, double sigma2);

}  // namespace cascade
