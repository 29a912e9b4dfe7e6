#include "cascade/gp.hpp"

#include <cmath>

#include "cascade/rng.hpp"

namespace cascade {

namespace {

// Cholesky with escalating diagonal jitter 1e-10 -> 1e-6 (x10 steps).
Matrix chol_with_jitter(const Matrix& A) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  for (double jitter = 1e-10; jitter <= 1e-6 * 1.0000001; jitter *= 10.0) {
    Matrix Aj = A;
    Aj.diagonal().array() += jitter;
    llt.compute(Aj);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw std::runtime_error(
      "GP factorization failed after jitter escalation (n=" +
      std::to_string(A.rows()) +
      ", max diag=" + std::to_string(A.diagonal().maxCoeff()) + ")");
}

}  // namespace

GPPosterior::GPPosterior(KernelSpec kernel, double sigma2)
    : kernel_(std::move(kernel)), sigma2_(sigma2), M_(1) {
  require(sigma2_ > 0.0, "GPPosterior: sigma2 must be positive");
  kernel_.validate();
  X_.resize(0, kernel_.input_dim());
  alpha_.resize(0, M_);
}

GPPosterior::GPPosterior(StageDataset data, KernelSpec kernel, double sigma2)
    : kernel_(std::move(kernel)), sigma2_(sigma2) {
  require(sigma2_ > 0.0, "GPPosterior: sigma2 must be positive");
  kernel_.validate();
  data.validate();
  require(data.size() == 0 || data.inputs.cols() == kernel_.input_dim(),
          "GPPosterior: data dimension does not match kernel");
  M_ = data.size() > 0 ? data.n_outputs() : 1;
  X_ = data.inputs;
  if (X_.cols() == 0) X_.resize(X_.rows(), kernel_.input_dim());
  if (data.size() == 0) {
    alpha_.resize(0, M_);
    return;
  }
  Matrix K = kernel_matrix(kernel_, X_);
  K.diagonal().array() += sigma2_;
  L_ = chol_with_jitter(K);
  alpha_ = L_.transpose().triangularView<Eigen::Upper>().solve(
      L_.triangularView<Eigen::Lower>().solve(data.outputs));
}

std::pair<Vector, Vector> GPPosterior::mean_var(const Vector& p) const {
  require(p.size() == kernel_.input_dim(), "mean_var: dimension mismatch");
  const double kpp = kernel_eval(kernel_, p, p);
  if (n_train() == 0)
    return {Vector::Zero(M_), Vector::Constant(M_, kpp)};
  const Vector k = kernel_vector(kernel_, X_, p);
  const Vector mu = alpha_.transpose() * k;
  const Vector v = L_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(kpp - v.squaredNorm(), 0.0);
  return {mu, Vector::Constant(M_, var)};
}

std::pair<Matrix, Matrix> GPPosterior::mean_var_batch(const Matrix& P) const {
  require(P.cols() == kernel_.input_dim(), "mean_var_batch: dimension mismatch");
  const Eigen::Index q = P.rows();
  if (n_train() == 0) {
    Matrix mu = Matrix::Zero(q, M_);
    Matrix var(q, M_);
    for (Eigen::Index i = 0; i < q; ++i)
      var.row(i).setConstant(kernel_eval(kernel_, P.row(i), P.row(i)));
    return {mu, var};
  }
  const Matrix Kx = kernel_cross(kernel_, P, X_);  // q x n
  const Matrix mu = Kx * alpha_;
  const Matrix V = L_.triangularView<Eigen::Lower>().solve(Kx.transpose());
  Matrix var(q, M_);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double kpp = kernel_eval(kernel_, P.row(i), P.row(i));
    var.row(i).setConstant(std::max(kpp - V.col(i).squaredNorm(), 0.0));
  }
  return {mu, var};
}

GPPosterior fit_posterior(const StageDataset& data, const KernelSpec& kernel,
                          double sigma2) {
  return GPPosterior(data, kernel, sigma2);
}

double log_marginal_likelihood(const StageDataset& data, const KernelSpec& kernel,
                               double sigma2) {
  require(sigma2 > 0.0, "log_marginal_likelihood: sigma2 must be positive");
  data.validate();
  const Eigen::Index n = data.size();
  if (n == 0) return 0.0;
  const Eigen::Index M = data.n_outputs();
  Matrix K = kernel_matrix(kernel, data.inputs);
  K.diagonal().array() += sigma2;
  const Matrix L = chol_with_jitter(K);
  const Matrix v = L.triangularView<Eigen::Lower>().solve(data.outputs);
  const double quad = v.squaredNorm();
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  return -0.5 * quad - 0.5 * M * logdet -
         0.5 * static_cast<double>(n * M) * std::log(2.0 * M_PI);
}

HyperFitResult fit_hyperparams(const StageDataset& data, const KernelSpec& init,
                               double sigma2, std::uint64_t seed, int n_restarts,
                               std::optional<OptBudget> budget) {
  init.validate();
  const Eigen::Index dw = init.prev_dim();
  const Eigen::Index dx = init.control_dim();
  const Eigen::Index np = 1 + dw + dx;  // log sigma_f, log lengthscales

  auto unpack = [&](const Vector& theta) {
    KernelSpec k = init;
    k.amplitude = std::exp(theta[0]);
    for (Eigen::Index i = 0; i < dw; ++i) k.lengthscales_w[i] = std::exp(theta[1 + i]);
    for (Eigen::Index i = 0; i < dx; ++i)
      k.lengthscales_x[i] = std::exp(theta[1 + dw + i]);
    return k;
  };
  Vector lo(np), hi(np);
  lo[0] = std::log(1e-3);
  hi[0] = std::log(1e4);
  lo.tail(np - 1).setConstant(std::log(1e-2));
  hi.tail(np - 1).setConstant(std::log(1e3));
  const Box box(lo, hi);

  const double init_lml = log_marginal_likelihood(data, init, sigma2);
  HyperFitResult best{init, init_lml, false};
  if (data.size() == 0) return best;

  Objective obj = [&](const Vector& theta) {
    return log_marginal_likelihood(data, unpack(theta), sigma2);
  };

  OptBudget b = budget.value_or([] {
    OptBudget d;
    d.n_space_filling = 40;
    d.n_top = 3;
    d.max_refine_evals = 250;
    d.fine_tol = 1e-5;
    return d;
  }());

  int failures = 0;
  for (int r = 0; r < n_restarts; ++r) {
    try {
      OptResult res = maximize(obj, box, b.with_seed(derive_seed(seed, r)));
      if (res.value > best.lml) {
        best.kernel = unpack(res.x);
        best.lml = res.value;
      }
    } catch (...) {
      ++failures;
    }
  }
  best.fallback = failures == n_restarts;
  return best;
}

double information_gain(const Matrix& K, double sigma2) {
  require(sigma2 > 0.0, "information_gain: sigma2 must be positive");
  const Eigen::Index n = K.rows();
  require(K.cols() == n, "information_gain: K must be square");
  if (n == 0) return 0.0;
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  require((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * scale,
          "information_gain: K not symmetric");
  Matrix A = Matrix::Identity(n, n) + (0.5 / sigma2) * (K + K.transpose());
  Eigen::LLT<Matrix> llt(A);
  require(llt.info() == Eigen::Success, "information_gain: K not PSD");
  const Matrix L = llt.matrixL();
  return L.diagonal().array().log().sum();
}

}  // namespace cascade
