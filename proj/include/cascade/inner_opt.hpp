#pragma once

#include <cstdint>
#include <functional>

#include "cascade/common.hpp"

namespace cascade {

using Objective = std::function<double(const Vector&)>;

/// Budget for one acquisition-surface maximization: Latin-hypercube seeding,
/// coarse refinement of the top candidates, fine refinement of the winner.
struct OptBudget {
  int n_space_filling = 1000;
  int n_top = 5;
  double coarse_tol = 1e-3;
  double fine_tol = 1e-6;
  int max_refine_evals = 2000;  // hard cap on objective calls during refinement
  std::uint64_t seed = 0;

  OptBudget with_seed(std::uint64_t s) const {
    OptBudget b = *this;
    b.seed = s;
    return b;
  }

  /// Smaller budget for nested maximizations that run many times per selection.
  static OptBudget nested(std::uint64_t seed = 0) {
    OptBudget b;
    b.n_space_filling = 200;
    b.n_top = 3;
    b.max_refine_evals = 400;
    b.fine_tol = 1e-4;
    b.seed = seed;
    return b;
  }
};

struct OptResult {
  Vector x;
  double value = 0.0;
  int evals = 0;
};

/// Latin hypercube sample: per coordinate, exactly one point per stratum.
Matrix lhs_sample(const Box& box, int n, std::uint64_t seed);

/// Maximize the objective over the box. The reported value never falls below
/// the best space-filling candidate and x stays inside the box.
OptResult maximize(const Objective& f, const Box& box, const OptBudget& budget);

}  // namespace cascade
