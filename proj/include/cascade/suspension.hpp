#pragma once

#include "cascade/acq_ci.hpp"
#include "cascade/acq_ei.hpp"

namespace cascade {

/// Stored intermediate output usable to resume the cascade mid-pipeline.
struct Stock {
  int id = 0;
  int stage = 0;  // 0..N-1; stage 0 is the permanent zero vector
  Vector value;
  bool unlimited = false;
  int created_iter = 0;
};

struct CostVector {
  Vector lambda;  // one positive entry per stage

  void validate() const {
    require(lambda.size() > 0 && (lambda.array() > 0.0).all(),
            "CostVector: all stage costs must be positive");
  }
  /// Total cost of running stages i..N.
  double tail_cost(int i) const { return lambda.tail(lambda.size() - (i - 1)).sum(); }
};

/// Per-stage stock collections; stage 0 always holds exactly the zero vector.
class StockLedger {
 public:
  StockLedger(int n_stages, int zero_dim);

  const std::vector<std::vector<Stock>>& stages() const { return stages_; }
  const std::vector<Stock>& stage(int n) const { return stages_.at(n); }
  const std::vector<int>& discard_log() const { return discard_log_; }

  int add(int stage, const Vector& value, bool unlimited, int iter);
  void remove(int id);
  void record_discard(int id) { discard_log_.push_back(id); }
  const Stock* find(int id) const;
  int newest_id() const { return next_id_ - 1; }

 private:
  std::vector<std::vector<Stock>> stages_;  // index = stage 0..N-1
  std::vector<int> discard_log_;
  int next_id_ = 1;
};

struct SuspensionSelection {
  int stage = 0;  // stage to run (1..N)
  int stock_id = 0;
  Vector y_prev;
  Vector x;
  std::vector<Vector> tail;
  double utility = 0.0;  // u_tilde at the selection
  double score = 0.0;    // utility / tail cost
};

/// Cost-normalized selection: argmax over (stage, stock, controls) of
/// u_tilde / sum of remaining stage costs. Ties break to the lowest stage,
/// then the lowest stock id.
SuspensionSelection select_suspension(const StockLedger& ledger,
                                      const EIContext& ctx,
                                      const std::vector<Box>& stage_boxes,
                                      const CostVector& costs,
                                      const OptBudget& budget);

/// Consume the used stock (single-use only) and bank the new output.
void apply_observation(StockLedger& ledger, const SuspensionSelection& sel,
                       const Vector& y_new, int n_stages, bool unlimited_reuse,
                       int iter);

struct StockBounds {
  double lcb = 0.0;
  double ucb = 0.0;
};

/// LCB/UCB of F(y) for a stock at stage n, maximizing over the tail controls.
StockBounds stock_bounds(const CIChain& chain, const Stock& stock,
                         const CIParams& params, const OptBudget& budget);

/// Discard every stock whose UCB falls below the best stock LCB, exempting
/// the stock obtained in the most recent iteration. Returns discarded ids.
std::vector<int> stock_reduction(StockLedger& ledger, const CIChain& chain,
                                 const CIParams& params, const OptBudget& budget);

}  // namespace cascade
