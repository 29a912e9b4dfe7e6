#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cascade/harness.hpp"
#include "cascade/rng.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Cascade Bayesian optimization experiments"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a config file");
  std::string config_path, method_override, out_override;
  std::vector<std::uint64_t> seed_override;
  int iters_override = -1;
  run_cmd->add_option("--config", config_path, "Config file (key = value lines)")
      ->required();
  run_cmd->add_option("--method", method_override, "Override the configured method");
  run_cmd->add_option("--seed", seed_override, "Override the configured seed list");
  run_cmd->add_option("--iters", iters_override, "Override the iteration count");
  run_cmd->add_option("--out", out_override, "Output directory for trace/summary");

  // list-benchmarks
  auto* list_cmd = app.add_subcommand("list-benchmarks", "Print registered benchmark names");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Print the reference optimum of a benchmark");
  std::string oracle_bench;
  std::uint64_t oracle_seed = 0;
  int oracle_candidates = 10000;
  oracle_cmd->add_option("--benchmark", oracle_bench, "Benchmark name")->required();
  oracle_cmd->add_option("--seed", oracle_seed, "Benchmark instance seed");
  oracle_cmd->add_option("--candidates", oracle_candidates, "Search candidates");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& name : cascade::list_benchmarks()) std::cout << name << '\n';
      return 0;
    }

    if (oracle_cmd->parsed()) {
      const auto inst = cascade::build_cascade(
          oracle_bench,
          cascade::derive_seed(oracle_seed,
                               static_cast<std::uint64_t>(cascade::Stream::Benchmark)));
      if (inst.analytic_optimum) {
        std::cout << "benchmark: " << inst.name << "\nf_star: " << *inst.analytic_optimum
                  << " (analytic)\n";
      } else {
        const auto res = cascade::true_optimum(
            inst.spec, cascade::derive_seed(oracle_seed, 77), oracle_candidates);
        std::cout << "benchmark: " << inst.name << "\nf_star: " << res.value
                  << " (search, " << res.evals << " evaluations)\n";
      }
      return 0;
    }

    cascade::RunConfig cfg = cascade::read_config_file(config_path);
    if (!method_override.empty()) cfg.method = cascade::parse_method(method_override);
    if (!seed_override.empty()) cfg.seeds = seed_override;
    if (iters_override >= 0) cfg.iterations = iters_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    cfg.validate();

    const cascade::RunTrace trace = cascade::run(cfg);

    fs::create_directories(cfg.out_dir);
    const std::string stem =
        cfg.benchmark + "_" + cascade::method_name(cfg.method);
    {
      std::ofstream csv(fs::path(cfg.out_dir) / (stem + "_trace.csv"));
      cascade::write_trace_csv(trace, csv);
    }
    {
      std::ofstream js(fs::path(cfg.out_dir) / (stem + "_summary.json"));
      cascade::write_summary_json(cfg, trace, js);
    }
    for (const auto& s : trace.summaries)
      std::cout << "seed " << s.seed << ": regret " << s.final_regret
                << (s.stop_iteration ? " (stopped at t=" + std::to_string(*s.stop_iteration) + ")"
                                     : "")
                << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
