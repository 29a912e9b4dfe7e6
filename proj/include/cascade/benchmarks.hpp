#pragma once

#include <optional>

#include "cascade/cascade_model.hpp"
#include "cascade/rff.hpp"

namespace cascade {

enum class BaseFunction { Rosenbrock, Sphere, Matyas };

/// Negated standard test function.
double base_function(BaseFunction kind, const Vector& v);

struct AffineScale {
  double a = 1.0;
  double b = 0.0;
};

/// Affine-rescale a scalar-output stage so its empirical range over uniform
/// inputs lands on [target_lo, target_hi]. Throws on a constant stage.
std::pair<StageEvaluator, AffineScale> scale_stage(const StageEvaluator& eval,
                                                   const Box& w_box, const Box& x_box,
                                                   double target_lo, double target_hi,
                                                   int n_samples, std::uint64_t seed);

struct BenchmarkInstance {
  std::string name;
  CascadeSpec spec;
  std::vector<Box> output_ranges;  // per stage, per output coordinate
  bool sample_path = false;        // sample paths keep their true hyperparameters
  double gen_sigma_f = 0.0;        // generating kernel, sample paths only
  double gen_lengthscale = 0.0;
  int default_initial_points = 10;
  std::optional<double> analytic_optimum;  // known F* for unscaled variants
};

/// Registered names: rosenbrock-3, rosenbrock-5, sphere-3, matyas-3,
/// samplepath-3, samplepath-5, and the -unscaled variants of the analytic
/// benchmarks.
std::vector<std::string> list_benchmarks();

BenchmarkInstance build_cascade(const std::string& name, std::uint64_t seed,
                                int range_samples = 100000);

/// GP-prior sample-path cascade: one RFF draw per stage.
BenchmarkInstance sample_path_cascade(int n_stages, std::uint64_t seed,
                                      int range_samples = 100000);

/// Best final output found by a large-budget search over the joint controls.
OptResult true_optimum(const CascadeSpec& spec, std::uint64_t seed,
                       int n_space_filling = 10000, int n_top = 20);

}  // namespace cascade
