#pragma once

#include <iosfwd>
#include <optional>

#include "cascade/acq_ci.hpp"
#include "cascade/acq_ei.hpp"
#include "cascade/baselines.hpp"
#include "cascade/benchmarks.hpp"
#include "cascade/suspension.hpp"

namespace cascade {

enum class Method { Ei, Ci, Cucb, Random, FbEi, FbUcb, Cbo, EiSus, EiSusR };

Method parse_method(const std::string& name);
std::string method_name(Method m);
bool is_suspension_method(Method m);

struct RunConfig {
  std::string benchmark;
  Method method = Method::Ei;
  std::vector<std::uint64_t> seeds{0};
  int iterations = 20;     // Algorithm-1 sweeps
  int initial_points = 0;  // 0 -> benchmark default
  double sigma2 = 1e-4;
  CIParams ci;
  int mc_samples = 1000;
  OptBudget opt = {};
  OptBudget nested = OptBudget::nested();
  Vector costs;            // suspension stage costs; empty -> all ones
  double budget_max = 0;   // suspension cost budget
  bool unlimited_stock = false;
  std::optional<double> xi;
  std::string out_dir = ".";
  int range_samples = 100000;
  int optimum_candidates = 10000;

  void validate() const;
};

/// Parse the flat key = value config format; unknown keys are rejected with
/// their name and line number.
RunConfig read_config(std::istream& in);
RunConfig read_config_file(const std::string& path);

struct TraceRow {
  std::uint64_t seed = 0;
  int t = 0;      // global stage-evaluation counter within the seed
  int stage = 0;
  Vector x;
  Vector y;
  double best_so_far = 0.0;
  double simple_regret = 0.0;
  double spent_cost = 0.0;
  std::optional<double> ci_gap;
};

struct SeedSummary {
  std::uint64_t seed = 0;
  double f_star = 0.0;
  double final_regret = 0.0;
  std::optional<int> stop_iteration;
  double wall_time_sec = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::vector<SeedSummary> summaries;
};

/// Running maximum over sweeps of max_x LCB; the argmax chain is the
/// estimated solution.
struct EstimatedSolution {
  double lcb = -std::numeric_limits<double>::infinity();
  Vector joint_controls;
  int sweep = 0;
  bool valid = false;

  void observe_sweep(int sweep_index, const OptResult& lcb_max) {
    if (!valid || lcb_max.value > lcb) {
      lcb = lcb_max.value;
      joint_controls = lcb_max.x;
      sweep = sweep_index;
      valid = true;
    }
  }
};

struct StoppingCheck {
  bool fired = false;
  double gap = 0.0;
};

/// gap = max_x UCB - max_x LCB; fires when gap < xi.
StoppingCheck stopping_check(const CIChain& chain, const CIParams& params,
                             double xi, const OptBudget& budget);

RunTrace run_sequential(const RunConfig& config);
RunTrace run_suspension(const RunConfig& config);
RunTrace run(const RunConfig& config);

void write_trace_csv(const RunTrace& trace, std::ostream& out);
void write_summary_json(const RunConfig& config, const RunTrace& trace,
                        std::ostream& out);

}  // namespace cascade
