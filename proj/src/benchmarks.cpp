#include "cascade/benchmarks.hpp"

#include <cmath>
#include <memory>

#include "cascade/rng.hpp"

namespace cascade {

double base_function(BaseFunction kind, const Vector& v) {
  switch (kind) {
    case BaseFunction::Rosenbrock: {
      require(v.size() >= 2, "base_function: Rosenbrock needs dim >= 2");
      double s = 0.0;
      for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
        const double a = v[i + 1] - v[i] * v[i];
        const double b = v[i] - 1.0;
        s += 100.0 * a * a + b * b;
      }
      return -s;
    }
    case BaseFunction::Sphere:
      require(v.size() >= 1, "base_function: Sphere needs dim >= 1");
      return -v.squaredNorm();
    case BaseFunction::Matyas:
      require(v.size() == 2, "base_function: Matyas needs dim = 2");
      return -(0.26 * (v[0] * v[0] + v[1] * v[1]) - 0.48 * v[0] * v[1]);
  }
  throw std::logic_error("base_function: unhandled kind");
}

std::pair<StageEvaluator, AffineScale> scale_stage(const StageEvaluator& eval,
                                                   const Box& w_box, const Box& x_box,
                                                   double target_lo, double target_hi,
                                                   int n_samples, std::uint64_t seed) {
  require(n_samples >= 2, "scale_stage: need at least two samples");
  require(target_hi > target_lo, "scale_stage: empty target range");
  Rng rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n_samples; ++i) {
    const Vector w = rng.uniform_in(w_box);
    const Vector x = rng.uniform_in(x_box);
    const double y = eval(w, x)[0];
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  require(hi > lo, "scale_stage: constant stage has no range to scale");
  AffineScale s;
  s.a = (target_hi - target_lo) / (hi - lo);
  s.b = target_lo - s.a * lo;
  StageEvaluator scaled = [eval, s](const Vector& w, const Vector& x) {
    Vector y = eval(w, x);
    return Vector::Constant(1, s.a * y[0] + s.b);
  };
  return {std::move(scaled), s};
}

namespace {

struct AnalyticConfig {
  BaseFunction fn;
  int n_stages;
  int first_control_dim;
  int rest_control_dim;
  double box_lo, box_hi;
  int initial_points;
};

std::optional<AnalyticConfig> analytic_config(const std::string& base, int n) {
  if (base == "rosenbrock") return AnalyticConfig{BaseFunction::Rosenbrock, n, 3, 2, -2.0, 2.0, n == 3 ? 10 : 20};
  if (base == "sphere" && n == 3) return AnalyticConfig{BaseFunction::Sphere, 3, 3, 2, -5.12, 5.12, 10};
  if (base == "matyas" && n == 3) return AnalyticConfig{BaseFunction::Matyas, 3, 2, 1, -10.0, 10.0, 10};
  return std::nullopt;
}

BenchmarkInstance build_analytic(const std::string& name, const AnalyticConfig& cfg,
                                 bool scaled, std::uint64_t seed, int range_samples) {
  BenchmarkInstance inst;
  inst.name = name;
  inst.default_initial_points = cfg.initial_points;
  for (int n = 1; n <= cfg.n_stages; ++n) {
    StageSpec s;
    s.index = n;
    s.prev_dim = n == 1 ? 0 : 1;
    s.output_dim = 1;
    const int d = n == 1 ? cfg.first_control_dim : cfg.rest_control_dim;
    s.control_box = Box::cube(d, cfg.box_lo, cfg.box_hi);
    const BaseFunction fn = cfg.fn;
    s.evaluator = [fn](const Vector& w, const Vector& x) {
      return Vector::Constant(1, base_function(fn, joint_input(w, x)));
    };
    inst.spec.stages.push_back(std::move(s));
  }
  const Box interval = Box::cube(1, cfg.box_lo, cfg.box_hi);
  if (scaled) {
    for (int n = 1; n <= cfg.n_stages; ++n) {
      StageSpec& s = inst.spec.stages[n - 1];
      const Box w_box = n == 1 ? Box(Vector(0), Vector(0)) : interval;
      auto [ev, sc] = scale_stage(s.evaluator, w_box, s.control_box, cfg.box_lo,
                                  cfg.box_hi, range_samples, derive_seed(seed, 100 + n));
      s.evaluator = std::move(ev);
      inst.output_ranges.push_back(interval);
    }
  } else {
    // Sphere and Matyas peak at the origin, and a chain of zeros is feasible,
    // so the unscaled cascade optimum is exactly 0. Rosenbrock's stage
    // optimum at all-ones does not chain, so no analytic value there.
    if (cfg.fn != BaseFunction::Rosenbrock) inst.analytic_optimum = 0.0;
    for (int n = 1; n <= cfg.n_stages; ++n) {
      // Rough output range for CBO from sampling.
      StageSpec& s = inst.spec.stages[n - 1];
      Box w_box = n == 1 ? Box(Vector(0), Vector(0))
                         : inst.output_ranges[n - 2];
      Rng rng(derive_seed(seed, 200 + n));
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int i = 0; i < std::min(range_samples, 20000); ++i) {
        const double y = s.evaluator(rng.uniform_in(w_box), rng.uniform_in(s.control_box))[0];
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
      inst.output_ranges.push_back(Box(Vector::Constant(1, lo), Vector::Constant(1, hi)));
    }
  }
  inst.spec.validate();
  return inst;
}

}  // namespace

BenchmarkInstance sample_path_cascade(int n_stages, std::uint64_t seed,
                                      int range_samples) {
  require(n_stages >= 2, "sample_path_cascade: need at least two stages");
  BenchmarkInstance inst;
  inst.name = "samplepath-" + std::to_string(n_stages);
  inst.sample_path = true;
  inst.gen_sigma_f = 15.02;
  inst.gen_lengthscale = 3.0;
  inst.default_initial_points = n_stages >= 5 ? 20 : 10;
  const Box control_box = Box::cube(2, -10.0, 10.0);
  const Box interval = Box::cube(1, -10.0, 10.0);
  for (int n = 1; n <= n_stages; ++n) {
    StageSpec s;
    s.index = n;
    s.prev_dim = n == 1 ? 0 : 1;
    s.output_dim = 1;
    s.control_box = control_box;
    const KernelSpec kernel = KernelSpec::gaussian_iso(
        inst.gen_sigma_f, s.prev_dim, 2, inst.gen_lengthscale);
    auto rff = std::make_shared<RFFSample>(kernel, 1000, derive_seed(seed, n));
    s.evaluator = [rff](const Vector& w, const Vector& x) {
      return Vector::Constant(1, (*rff)(joint_input(w, x)));
    };
    const Box w_box = n == 1 ? Box(Vector(0), Vector(0)) : interval;
    auto [ev, sc] = scale_stage(s.evaluator, w_box, s.control_box, -10.0, 10.0,
                                range_samples, derive_seed(seed, 300 + n));
    s.evaluator = std::move(ev);
    inst.output_ranges.push_back(interval);
    inst.spec.stages.push_back(std::move(s));
  }
  inst.spec.validate();
  return inst;
}

std::vector<std::string> list_benchmarks() {
  return {"rosenbrock-3", "rosenbrock-5",      "sphere-3",
          "matyas-3",     "samplepath-3",      "samplepath-5",
          "sphere-3-unscaled", "matyas-3-unscaled"};
}

BenchmarkInstance build_cascade(const std::string& name, std::uint64_t seed,
                                int range_samples) {
  const bool unscaled = name.size() > 9 && name.ends_with("-unscaled");
  std::string stem = unscaled ? name.substr(0, name.size() - 9) : name;
  const auto dash = stem.rfind('-');
  require(dash != std::string::npos, "build_cascade: unknown benchmark " + name);
  const std::string base = stem.substr(0, dash);
  const int n = std::stoi(stem.substr(dash + 1));
  if (base == "samplepath") {
    require(!unscaled && (n == 3 || n == 5),
            "build_cascade: unknown benchmark " + name);
    return sample_path_cascade(n, seed, range_samples);
  }
  const auto cfg = analytic_config(base, n);
  require(cfg.has_value() && (n == 3 || n == 5) &&
              !(unscaled && base == "rosenbrock"),
          "build_cascade: unknown benchmark " + name);
  return build_analytic(name, *cfg, !unscaled, seed, range_samples);
}

OptResult true_optimum(const CascadeSpec& spec, std::uint64_t seed,
                       int n_space_filling, int n_top) {
  Objective obj = [&](const Vector& z) {
    return eval_cascade(spec, spec.split_controls(z)).final_output;
  };
  OptBudget budget;
  budget.n_space_filling = n_space_filling;
  budget.n_top = n_top;
  budget.max_refine_evals = 4000;
  budget.seed = seed;
  return maximize(obj, spec.joint_box(), budget);
}

}  // namespace cascade
