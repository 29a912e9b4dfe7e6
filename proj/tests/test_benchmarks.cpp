#include <doctest.h>

#include <cmath>

#include "cascade/benchmarks.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

TEST_CASE("base functions take their textbook values") {
  CHECK(base_function(BaseFunction::Rosenbrock, Vector::Ones(3)) == 0.0);
  CHECK(base_function(BaseFunction::Rosenbrock, Vector::Zero(2)) == -1.0);
  CHECK(base_function(BaseFunction::Sphere, Vector::Zero(4)) == 0.0);
  CHECK(base_function(BaseFunction::Sphere, (Vector(2) << 3.0, 4.0).finished()) ==
        -25.0);
  CHECK(base_function(BaseFunction::Matyas, Vector::Zero(2)) == 0.0);
  CHECK(base_function(BaseFunction::Matyas, (Vector(2) << 1.0, 1.0).finished()) ==
        doctest::Approx(-(0.26 * 2.0 - 0.48)));
  CHECK_THROWS_AS(base_function(BaseFunction::Matyas, Vector::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("scale_stage maps the sampled range onto the target interval") {
  StageEvaluator ev = [](const Vector&, const Vector& x) {
    return Vector::Constant(1, x[0] * x[0]);
  };
  const Box xbox = Box::cube(1, -2.0, 2.0);
  auto [scaled, s] = scale_stage(ev, Box(Vector(0), Vector(0)), xbox, -1.0, 1.0,
                                 5000, 3);
  Rng rng(4);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 2000; ++i) {
    const double y = scaled(Vector(0), rng.uniform_in(xbox))[0];
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  CHECK(lo >= -1.01);
  CHECK(hi <= 1.01);
  CHECK(hi - lo > 1.5);
  // Inverting the affine map recovers the original evaluator.
  for (int i = 0; i < 50; ++i) {
    const Vector x = rng.uniform_in(xbox);
    const double y = scaled(Vector(0), x)[0];
    CHECK((y - s.b) / s.a == doctest::Approx(ev(Vector(0), x)[0]).epsilon(1e-10));
  }
}

TEST_CASE("scale_stage rejects constant stages") {
  StageEvaluator ev = [](const Vector&, const Vector&) {
    return Vector::Constant(1, 3.0);
  };
  CHECK_THROWS_AS(scale_stage(ev, Box(Vector(0), Vector(0)), Box::cube(1, 0, 1),
                              -1.0, 1.0, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("every registered benchmark is finite, bounded, and deterministic") {
  for (const std::string& name : list_benchmarks()) {
    CAPTURE(name);
    const BenchmarkInstance a = build_cascade(name, 5, 3000);
    const BenchmarkInstance b = build_cascade(name, 5, 3000);
    const Box joint = a.spec.joint_box();
    Rng rng(6);
    for (int i = 0; i < 300; ++i) {
      const Vector z = rng.uniform_in(joint);
      const CascadeResult ra = eval_cascade(a.spec, a.spec.split_controls(z));
      const CascadeResult rb = eval_cascade(b.spec, b.spec.split_controls(z));
      CHECK(std::isfinite(ra.final_output));
      CHECK(std::abs(ra.final_output) < 1e9);  // unscaled chains compound fast
      CHECK(ra.final_output == rb.final_output);  // same seed, same instance
    }
  }
}

TEST_CASE("different seeds give different sample-path instances") {
  const BenchmarkInstance a = build_cascade("samplepath-3", 1, 2000);
  const BenchmarkInstance b = build_cascade("samplepath-3", 2, 2000);
  const Vector z = Vector::Zero(a.spec.joint_box().dim());
  CHECK(eval_cascade(a.spec, a.spec.split_controls(z)).final_output !=
        eval_cascade(b.spec, b.spec.split_controls(z)).final_output);
}

TEST_CASE("sample-path stage outputs stay inside the next stage's w-domain") {
  const BenchmarkInstance inst = build_cascade("samplepath-3", 9, 20000);
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    Vector y(0);
    for (int n = 1; n <= 3; ++n) {
      const Vector yn =
          eval_stage(inst.spec, n, y, rng.uniform_in(inst.spec.stage(n).control_box));
      if (n < 3) {
        CHECK(yn[0] >= -10.5);
        CHECK(yn[0] <= 10.5);
      }
      y = yn;
    }
  }
}

TEST_CASE("benchmark registry rejects unknown names") {
  CHECK_THROWS_AS(build_cascade("nonesuch-3", 1), std::invalid_argument);
  CHECK_THROWS_AS(build_cascade("rosenbrock-4", 1), std::invalid_argument);
  CHECK_THROWS_AS(build_cascade("rosenbrock-3-unscaled", 1), std::invalid_argument);
  CHECK_THROWS_AS(build_cascade("samplepath-3-unscaled", 1), std::invalid_argument);
}

TEST_CASE("unscaled sphere/matyas chains have analytic optimum zero") {
  for (const std::string name : {"sphere-3-unscaled", "matyas-3-unscaled"}) {
    CAPTURE(name);
    const BenchmarkInstance inst = build_cascade(name, 3, 2000);
    REQUIRE(inst.analytic_optimum.has_value());
    CHECK(*inst.analytic_optimum == 0.0);
    // The all-zero control chain attains it.
    std::vector<Vector> xs;
    for (const auto& s : inst.spec.stages) xs.push_back(Vector::Zero(s.control_box.dim()));
    CHECK(eval_cascade(inst.spec, xs).final_output == 0.0);
    // And the search-based oracle comes close from below.
    const OptResult opt = true_optimum(inst.spec, 7, 4000, 10);
    CHECK(opt.value <= 1e-9);
    CHECK(opt.value > -0.5);
  }
}

TEST_CASE("benchmark structure matches the declared dimensions") {
  const BenchmarkInstance r3 = build_cascade("rosenbrock-3", 1, 2000);
  REQUIRE(r3.spec.n_stages() == 3);
  CHECK(r3.spec.stage(1).control_box.dim() == 3);
  CHECK(r3.spec.stage(2).control_box.dim() == 2);
  CHECK(r3.spec.stage(3).control_box.dim() == 2);
  CHECK(r3.default_initial_points == 10);

  const BenchmarkInstance r5 = build_cascade("rosenbrock-5", 1, 2000);
  REQUIRE(r5.spec.n_stages() == 5);
  CHECK(r5.default_initial_points == 20);

  const BenchmarkInstance m3 = build_cascade("matyas-3", 1, 2000);
  CHECK(m3.spec.stage(1).control_box.dim() == 2);
  CHECK(m3.spec.stage(2).control_box.dim() == 1);
  CHECK(m3.spec.stage(1).control_box.lower[0] == -10.0);

  const BenchmarkInstance s3 = build_cascade("sphere-3", 1, 2000);
  CHECK(s3.spec.stage(1).control_box.upper[0] == 5.12);
}
