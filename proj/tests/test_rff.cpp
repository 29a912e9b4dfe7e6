#include <doctest.h>

#include "cascade/rff.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

double mean_abs_error(const RFFSample& rff, const KernelSpec& k, int n_pairs,
                      std::uint64_t seed) {
  Rng rng(seed);
  const Box box = Box::cube(static_cast<int>(k.input_dim()), -10.0, 10.0);
  double err = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    const Vector p = rng.uniform_in(box), q = rng.uniform_in(box);
    err += std::abs(rff.kernel_estimate(p, q) - kernel_eval(k, p, q));
  }
  return err / n_pairs;
}

}  // namespace

TEST_CASE("self-covariance of the paired feature map is the amplitude exactly") {
  const KernelSpec k = KernelSpec::gaussian_iso(15.02, 0, 2, 3.0);
  const RFFSample rff(k, 400, 5);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Vector p = 10.0 * rng.normal_vector(2);
    CHECK(rff.kernel_estimate(p, p) == 15.02);
  }
}

TEST_CASE("gaussian RFF approximates the kernel") {
  const KernelSpec k = KernelSpec::gaussian_iso(15.02, 0, 2, 3.0);
  const RFFSample rff(k, 1000, 12);
  CHECK(mean_abs_error(rff, k, 100, 3) < 0.05 * 15.02);
}

TEST_CASE("doubling feature count does not worsen the approximation") {
  const KernelSpec k = KernelSpec::gaussian_iso(4.0, 0, 2, 2.0);
  // Average over several draws so the comparison is about the feature count,
  // not one lucky frequency sample.
  double e500 = 0.0, e2000 = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    e500 += mean_abs_error(RFFSample(k, 500, 100 + rep), k, 200, 9);
    e2000 += mean_abs_error(RFFSample(k, 2000, 200 + rep), k, 200, 9);
  }
  CHECK(e2000 <= e500);
}

TEST_CASE("matern RFF approximates the kernel") {
  KernelSpec k;
  k.kind = KernelKind::Matern;
  k.amplitude = 2.0;
  k.lengthscales_x = Vector::Constant(2, 3.0);
  k.nu = 2.5;
  const RFFSample rff(k, 4000, 21);
  CHECK(mean_abs_error(rff, k, 200, 4) < 0.05 * 2.0);
}

TEST_CASE("RFF evaluation is deterministic and batch-consistent") {
  const KernelSpec k = KernelSpec::gaussian_iso(1.0, 1, 1, 1.5);
  const RFFSample a(k, 64, 77), b(k, 64, 77), c(k, 64, 78);
  Rng rng(2);
  const Matrix P = rng.normal_matrix(10, 2);
  const Vector batch = a.eval_batch(P);
  bool differs = false;
  for (int i = 0; i < 10; ++i) {
    const Vector p = P.row(i).transpose();
    CHECK(a(p) == b(p));
    CHECK(batch[i] == doctest::Approx(a(p)).epsilon(1e-12));
    differs = differs || a(p) != c(p);
  }
  CHECK(differs);  // a different seed gives a different draw
}

TEST_CASE("RFF rejects unsupported kernels and bad dimensions") {
  KernelSpec lin;
  lin.kind = KernelKind::Linear;
  lin.lengthscales_x = Vector::Ones(2);
  CHECK_THROWS_AS(RFFSample(lin, 10, 0), std::invalid_argument);
  const KernelSpec k = KernelSpec::gaussian_iso(1.0, 0, 2, 1.0);
  const RFFSample rff(k, 10, 0);
  CHECK_THROWS_AS(rff(Vector::Zero(3)), std::invalid_argument);
}
