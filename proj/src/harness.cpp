#include "cascade/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cascade/rng.hpp"

namespace cascade {

namespace {

const std::map<std::string, Method>& method_table() {
  static const std::map<std::string, Method> table = {
      {"ei", Method::Ei},         {"ci", Method::Ci},
      {"cucb", Method::Cucb},     {"random", Method::Random},
      {"fb-ei", Method::FbEi},    {"fb-ucb", Method::FbUcb},
      {"cbo", Method::Cbo},       {"ei-sus", Method::EiSus},
      {"ei-sus-r", Method::EiSusR}};
  return table;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_vector(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += fmt_double(v[i]);
  }
  return s;
}

}  // namespace

Method parse_method(const std::string& name) {
  auto it = method_table().find(name);
  require(it != method_table().end(), "unknown method: " + name);
  return it->second;
}

std::string method_name(Method m) {
  for (const auto& [k, v] : method_table())
    if (v == m) return k;
  return "?";
}

bool is_suspension_method(Method m) {
  return m == Method::EiSus || m == Method::EiSusR;
}

void RunConfig::validate() const {
  require(iterations >= 1, "config: iterations must be >= 1");
  require(sigma2 > 0.0, "config: sigma2 must be positive");
  require(mc_samples >= 1, "config: mc_samples must be >= 1");
  ci.validate();
  if (is_suspension_method(method))
    require(budget_max > 0.0, "config: suspension methods need budget_max");
  if (xi) require(*xi > 0.0, "config: xi must be positive");
}

RunConfig read_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
  };
  auto fail = [&](const std::string& msg) {
    throw ConfigError("config line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section header
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto parse_list = [&](auto conv) {
      std::vector<decltype(conv(std::string()))> out;
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(conv(trim(item)));
      return out;
    };
    try {
      if (key == "benchmark") cfg.benchmark = val;
      else if (key == "method") cfg.method = parse_method(val);
      else if (key == "seeds")
        cfg.seeds = parse_list(
            [](const std::string& s) { return static_cast<std::uint64_t>(std::stoull(s)); });
      else if (key == "iterations") cfg.iterations = std::stoi(val);
      else if (key == "initial_points") cfg.initial_points = std::stoi(val);
      else if (key == "sigma2") cfg.sigma2 = std::stod(val);
      else if (key == "beta_sqrt") cfg.ci.beta_sqrt = std::stod(val);
      else if (key == "l_f") cfg.ci.l_f = std::stod(val);
      else if (key == "c_eta") cfg.ci.c_eta = std::stod(val);
      else if (key == "mc_samples") cfg.mc_samples = std::stoi(val);
      else if (key == "n_space_filling") cfg.opt.n_space_filling = std::stoi(val);
      else if (key == "n_top") cfg.opt.n_top = std::stoi(val);
      else if (key == "coarse_tol") cfg.opt.coarse_tol = std::stod(val);
      else if (key == "fine_tol") cfg.opt.fine_tol = std::stod(val);
      else if (key == "max_refine_evals") cfg.opt.max_refine_evals = std::stoi(val);
      else if (key == "nested_candidates") cfg.nested.n_space_filling = std::stoi(val);
      else if (key == "nested_top") cfg.nested.n_top = std::stoi(val);
      else if (key == "nested_max_evals") cfg.nested.max_refine_evals = std::stoi(val);
      else if (key == "costs") {
        auto xs = parse_list([](const std::string& s) { return std::stod(s); });
        cfg.costs = Eigen::Map<Vector>(xs.data(), xs.size());
      } else if (key == "budget_max") cfg.budget_max = std::stod(val);
      else if (key == "stock_reuse") {
        if (val == "once") cfg.unlimited_stock = false;
        else if (val == "unlimited") cfg.unlimited_stock = true;
        else fail("stock_reuse must be 'once' or 'unlimited'");
      } else if (key == "xi") cfg.xi = std::stod(val);
      else if (key == "out_dir") cfg.out_dir = val;
      else if (key == "range_samples") cfg.range_samples = std::stoi(val);
      else if (key == "optimum_candidates") cfg.optimum_candidates = std::stoi(val);
      else fail("unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("bad value for key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file: " + path);
  return read_config(in);
}

StoppingCheck stopping_check(const CIChain& chain, const CIParams& params,
                             double xi, const OptBudget& budget) {
  require(xi > 0.0, "stopping_check: xi must be positive");
  const double lcb = q_t(chain, params, budget).value;
  const double ucb =
      max_ucb(chain, params, budget.with_seed(derive_seed(budget.seed, 1))).value;
  StoppingCheck sc;
  sc.gap = ucb - lcb;
  sc.fired = sc.gap < xi;
  return sc;
}

namespace {

// One seed's worth of state for either algorithm.
class SeedRunner {
 public:
  SeedRunner(const RunConfig& cfg, std::uint64_t seed, RunTrace& trace)
      : cfg_(cfg), seed_(seed), trace_(trace) {
    bench_ = build_cascade(cfg.benchmark, derive_seed(seed, static_cast<std::uint64_t>(Stream::Benchmark)),
                           cfg.range_samples);
    spec_ = &bench_.spec;
    N_ = spec_->n_stages();
    log_.emplace(*spec_);
    for (const auto& s : spec_->stages) boxes_.push_back(s.control_box);
    joint_box_ = spec_->joint_box();
    costs_ = cfg.costs.size() == N_ ? cfg.costs : Vector::Ones(N_);
    f_star_ = bench_.analytic_optimum
                  ? *bench_.analytic_optimum
                  : true_optimum(*spec_, derive_seed(seed, 77), cfg.optimum_candidates)
                        .value;
    init_kernels();
    draw_initial_data();
  }

  SeedSummary run() {
    const auto t0 = std::chrono::steady_clock::now();
    if (is_suspension_method(cfg_.method))
      run_suspension_loop();
    else
      run_sequential_loop();
    SeedSummary s;
    s.seed = seed_;
    s.f_star = f_star_;
    s.final_regret = f_star_ - f_best_;
    s.stop_iteration = stop_iteration_;
    s.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
  }

 private:
  void init_kernels() {
    for (const auto& s : spec_->stages) {
      const int d = static_cast<int>(s.control_box.dim());
      if (bench_.sample_path) {
        kernels_.push_back(KernelSpec::gaussian_iso(bench_.gen_sigma_f, s.prev_dim,
                                                    d, bench_.gen_lengthscale));
      } else {
        Vector lw(s.prev_dim);
        for (int i = 0; i < s.prev_dim; ++i)
          lw[i] = 0.25 * (s.index >= 2
                              ? bench_.output_ranges[s.index - 2].width()[i]
                              : 1.0);
        Vector lx = 0.25 * s.control_box.width();
        kernels_.push_back(KernelSpec::gaussian(1.0, lw, lx));
      }
    }
    Vector lfb = 0.25 * joint_box_.width();
    fb_kernel_ = KernelSpec::gaussian(1.0, Vector(0), lfb);
  }

  void draw_initial_data() {
    const int n0 = cfg_.initial_points > 0 ? cfg_.initial_points
                                           : bench_.default_initial_points;
    Rng rng(derive_seed(seed_, static_cast<std::uint64_t>(Stream::InitialDesign)));
    for (int i = 0; i < n0; ++i) {
      std::vector<Vector> xs;
      for (const Box& b : boxes_) xs.push_back(rng.uniform_in(b));
      Vector y = spec_->zero_input();
      Vector joint(joint_box_.dim());
      Eigen::Index off = 0;
      for (int n = 1; n <= N_; ++n) {
        const Vector yn = eval_stage(*spec_, n, y, xs[n - 1]);
        EvalRecord rec{0, n, y, xs[n - 1], yn};
        append_observation(*log_, rec);
        joint.segment(off, xs[n - 1].size()) = xs[n - 1];
        off += xs[n - 1].size();
        y = yn;
      }
      f_best_ = std::max(f_best_, y[0]);
      fb_data_.append(joint, y);
    }
  }

  void fit_models(int sweep) {
    posteriors_.clear();
    for (int n = 1; n <= N_; ++n) {
      if (!bench_.sample_path) {
        auto fit = fit_hyperparams(log_->stage(n), kernels_[n - 1], cfg_.sigma2,
                                   derive_seed(seed_, static_cast<std::uint64_t>(Stream::HyperFit),
                                               sweep * 100 + n));
        kernels_[n - 1] = fit.kernel;
      }
      posteriors_.push_back(
          fit_posterior(log_->stage(n), kernels_[n - 1], cfg_.sigma2));
    }
    if (cfg_.method == Method::FbEi || cfg_.method == Method::FbUcb) {
      auto fit = fit_hyperparams(fb_data_, fb_kernel_, cfg_.sigma2,
                                 derive_seed(seed_, static_cast<std::uint64_t>(Stream::HyperFit),
                                             sweep * 100 + 99));
      fb_kernel_ = fit.kernel;
      fb_posterior_.emplace(fit_posterior(fb_data_, fb_kernel_, cfg_.sigma2));
    }
  }

  std::vector<const GPPosterior*> posterior_ptrs() const {
    std::vector<const GPPosterior*> p;
    for (const auto& gp : posteriors_) p.push_back(&gp);
    return p;
  }

  CIChain make_chain() const {
    return CIChain{posterior_ptrs(), boxes_, spec_->zero_input()};
  }

  EIContext make_ei_context(int sweep, int within) const {
    EIContext ctx;
    ctx.posteriors = posterior_ptrs();
    ctx.f_best = f_best_;
    ctx.n_samples = cfg_.mc_samples;
    std::vector<int> middle_dims;
    for (int m = 1; m <= N_ - 1; ++m) middle_dims.push_back(spec_->stage(m).output_dim);
    ctx.base = BaseSamples::generate(
        middle_dims, cfg_.mc_samples,
        derive_seed(seed_, static_cast<std::uint64_t>(Stream::BaseSamples),
                    sweep * 100 + within));
    return ctx;
  }

  OptBudget opt_budget(int counter) const {
    return cfg_.opt.with_seed(
        derive_seed(seed_, static_cast<std::uint64_t>(Stream::InnerOpt), counter));
  }
  OptBudget nested_budget(int counter) const {
    return cfg_.nested.with_seed(
        derive_seed(seed_, static_cast<std::uint64_t>(Stream::InnerOpt), 50000 + counter));
  }

  Vector observe(int n, const Vector& y_prev, const Vector& x,
                 std::optional<double> ci_gap) {
    const Vector y = eval_stage(*spec_, n, y_prev, x);
    append_observation(*log_, {t_ + 1, n, y_prev, x, y});
    ++t_;
    spent_ += costs_[n - 1];
    if (n == N_) f_best_ = std::max(f_best_, y[0]);
    TraceRow row;
    row.seed = seed_;
    row.t = t_;
    row.stage = n;
    row.x = x;
    row.y = y;
    row.best_so_far = f_best_;
    row.simple_regret = f_star_ - f_best_;
    row.spent_cost = spent_;
    row.ci_gap = ci_gap;
    trace_.rows.push_back(std::move(row));
    return y;
  }

  void execute_chain(const std::vector<Vector>& xs, std::optional<double> gap) {
    Vector y = spec_->zero_input();
    Vector joint(joint_box_.dim());
    Eigen::Index off = 0;
    for (int n = 1; n <= N_; ++n) {
      y = observe(n, y, xs[n - 1], gap);
      joint.segment(off, xs[n - 1].size()) = xs[n - 1];
      off += xs[n - 1].size();
    }
    fb_data_.append(joint, y);
  }

  void run_sequential_loop() {
    for (int sweep = 1; sweep <= cfg_.iterations; ++sweep) {
      fit_models(sweep);
      std::optional<double> gap;
      std::optional<CIChain> chain;
      if (cfg_.method == Method::Ci || cfg_.method == Method::Cucb) {
        chain = make_chain();
        const OptResult lcb_max =
            q_t(*chain, cfg_.ci, nested_budget(sweep * 1000));
        const OptResult ucb_max = max_ucb(
            *chain, cfg_.ci, nested_budget(sweep * 1000 + 1));
        gap = ucb_max.value - lcb_max.value;
        estimate_.observe_sweep(sweep, lcb_max);
        q_value_sweep_ = lcb_max.value;
        if (cfg_.xi && *gap < *cfg_.xi) {
          stop_iteration_ = t_;
          return;
        }
      }

      switch (cfg_.method) {
        case Method::Ei: {
          Vector y = spec_->zero_input();
          Vector joint(joint_box_.dim());
          Eigen::Index off = 0;
          for (int n = 1; n <= N_; ++n) {
            const EIContext ctx = make_ei_context(sweep, n);
            const EISelection sel =
                maximize_ei(ctx, y, n, boxes_, opt_budget(sweep * 100 + n));
            joint.segment(off, sel.x.size()) = sel.x;
            off += sel.x.size();
            y = observe(n, y, sel.x, gap);
          }
          fb_data_.append(joint, y);
          break;
        }
        case Method::Ci: {
          Vector y = spec_->zero_input();
          Vector joint(joint_box_.dim());
          Eigen::Index off = 0;
          for (int n = 1; n <= N_; ++n) {
            const double lcb_y =
                lcb_given_y(*chain, y, n, cfg_.ci, nested_budget(sweep * 100 + n))
                    .value;
            const double q_value = std::max(lcb_y, q_value_sweep_);
            const CISelection sel =
                ci_select(*chain, y, n, t_ + 1, q_value, cfg_.ci,
                          opt_budget(sweep * 100 + n), nested_budget(sweep * 100 + 50 + n));
            joint.segment(off, sel.x.size()) = sel.x;
            off += sel.x.size();
            y = observe(n, y, sel.x, gap);
          }
          fb_data_.append(joint, y);
          break;
        }
        case Method::Cucb: {
          Objective obj = [&](const Vector& z) {
            return cucb(*chain, spec_->split_controls(z), cfg_.ci);
          };
          const OptResult res = maximize(obj, joint_box_, opt_budget(sweep));
          execute_chain(spec_->split_controls(res.x), gap);
          break;
        }
        case Method::Random: {
          execute_chain(
              random_select(boxes_, derive_seed(seed_, static_cast<std::uint64_t>(Stream::Method), sweep)),
              gap);
          break;
        }
        case Method::FbEi:
        case Method::FbUcb: {
          const Vector x = fb_select(
              *fb_posterior_, joint_box_,
              cfg_.method == Method::FbEi ? FbMode::Ei : FbMode::Ucb, f_best_,
              opt_budget(sweep));
          execute_chain(spec_->split_controls(x), gap);
          break;
        }
        case Method::Cbo: {
          std::vector<Box> out_ranges(bench_.output_ranges.begin(),
                                      bench_.output_ranges.begin() + (N_ - 1));
          CboParams params;
          const std::vector<Vector> xs =
              cbo_select(posterior_ptrs(), boxes_, out_ranges, params, f_best_,
                         opt_budget(sweep));
          execute_chain(xs, gap);
          break;
        }
        default:
          throw std::logic_error("run_sequential: suspension method");
      }
    }
  }

  void run_suspension_loop() {
    StockLedger ledger(N_, spec_->stages.front().prev_dim);
    int iter = 0;
    while (spent_ < cfg_.budget_max) {
      ++iter;
      fit_models(iter);
      const EIContext ctx = make_ei_context(iter, 0);
      const SuspensionSelection sel = select_suspension(
          ledger, ctx, boxes_, CostVector{costs_}, opt_budget(iter));
      if (spent_ + costs_[sel.stage - 1] > cfg_.budget_max) break;
      const Vector y = observe(sel.stage, sel.y_prev, sel.x, std::nullopt);
      apply_observation(ledger, sel, y, N_, cfg_.unlimited_stock, iter);
      if (cfg_.method == Method::EiSusR) {
        const CIChain chain = make_chain();
        stock_reduction(ledger, chain, cfg_.ci, nested_budget(iter));
      }
    }
  }

  const RunConfig& cfg_;
  std::uint64_t seed_;
  RunTrace& trace_;
  BenchmarkInstance bench_;
  const CascadeSpec* spec_ = nullptr;
  int N_ = 0;
  std::optional<ObservationLog> log_;
  std::vector<Box> boxes_;
  Box joint_box_;
  Vector costs_;
  double f_star_ = 0.0;
  double f_best_ = -std::numeric_limits<double>::infinity();
  double spent_ = 0.0;
  int t_ = 0;
  std::vector<KernelSpec> kernels_;
  KernelSpec fb_kernel_;
  std::vector<GPPosterior> posteriors_;
  std::optional<GPPosterior> fb_posterior_;
  StageDataset fb_data_;
  EstimatedSolution estimate_;
  double q_value_sweep_ = 0.0;
  std::optional<int> stop_iteration_;
};

}  // namespace

RunTrace run(const RunConfig& config) {
  config.validate();
  RunTrace trace;
  for (std::uint64_t seed : config.seeds) {
    try {
      SeedRunner runner(config, seed, trace);
      trace.summaries.push_back(runner.run());
    } catch (const std::exception& e) {
      // One bad seed should not sink the rest of the run.
      SeedSummary s;
      s.seed = seed;
      s.f_star = std::numeric_limits<double>::quiet_NaN();
      s.final_regret = std::numeric_limits<double>::quiet_NaN();
      trace.summaries.push_back(s);
      std::fprintf(stderr, "seed %llu aborted: %s\n",
                   static_cast<unsigned long long>(seed), e.what());
    }
  }
  return trace;
}

RunTrace run_sequential(const RunConfig& config) {
  require(!is_suspension_method(config.method),
          "run_sequential: got a suspension method");
  return run(config);
}

RunTrace run_suspension(const RunConfig& config) {
  require(is_suspension_method(config.method),
          "run_suspension: needs a suspension method");
  return run(config);
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "seed,t,stage,x,y,best_so_far,simple_regret,spent_cost,ci_gap\n";
  for (const TraceRow& r : trace.rows) {
    out << r.seed << ',' << r.t << ',' << r.stage << ',' << join_vector(r.x) << ','
        << join_vector(r.y) << ',' << fmt_double(r.best_so_far) << ','
        << fmt_double(r.simple_regret) << ',' << fmt_double(r.spent_cost) << ',';
    if (r.ci_gap) out << fmt_double(*r.ci_gap);
    out << '\n';
  }
}

void write_summary_json(const RunConfig& config, const RunTrace& trace,
                        std::ostream& out) {
  nlohmann::json j;
  j["config"] = {
      {"benchmark", config.benchmark},
      {"method", method_name(config.method)},
      {"iterations", config.iterations},
      {"initial_points", config.initial_points},
      {"sigma2", config.sigma2},
      {"beta_sqrt", config.ci.beta_sqrt},
      {"l_f", config.ci.l_f},
      {"c_eta", config.ci.c_eta},
      {"mc_samples", config.mc_samples},
      {"budget_max", config.budget_max},
  };
  std::vector<std::uint64_t> seeds(config.seeds.begin(), config.seeds.end());
  j["config"]["seeds"] = seeds;
  auto& per_seed = j["seeds"];
  std::vector<double> regrets;
  for (const SeedSummary& s : trace.summaries) {
    nlohmann::json e;
    e["seed"] = s.seed;
    e["f_star"] = s.f_star;
    e["final_regret"] = s.final_regret;
    if (s.stop_iteration) e["stop_iteration"] = *s.stop_iteration;
    e["wall_time_sec"] = s.wall_time_sec;
    per_seed.push_back(e);
    if (std::isfinite(s.final_regret)) regrets.push_back(s.final_regret);
  }
  if (!regrets.empty()) {
    std::sort(regrets.begin(), regrets.end());
    double mean = 0.0;
    for (double r : regrets) mean += r;
    j["final_regret_mean"] = mean / regrets.size();
    j["final_regret_median"] = regrets[regrets.size() / 2];
  }
  out << j.dump(2) << '\n';
}

}  // namespace cascade
