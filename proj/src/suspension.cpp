#include "cascade/suspension.hpp"

#include <algorithm>

#include "cascade/rng.hpp"

namespace cascade {

StockLedger::StockLedger(int n_stages, int zero_dim) {
  require(n_stages >= 1, "StockLedger: need at least one stage");
  stages_.resize(n_stages);
  Stock zero;
  zero.id = 0;
  zero.stage = 0;
  zero.value = Vector::Zero(zero_dim);
  zero.unlimited = true;
  stages_[0].push_back(std::move(zero));
}

int StockLedger::add(int stage, const Vector& value, bool unlimited, int iter) {
  require(stage >= 1 && stage < static_cast<int>(stages_.size()),
          "StockLedger: stocks live at stages 1..N-1");
  Stock s;
  s.id = next_id_++;
  s.stage = stage;
  s.value = value;
  s.unlimited = unlimited;
  s.created_iter = iter;
  stages_[stage].push_back(std::move(s));
  return next_id_ - 1;
}

void StockLedger::remove(int id) {
  for (auto& col : stages_) {
    auto it = std::find_if(col.begin(), col.end(),
                           [id](const Stock& s) { return s.id == id; });
    if (it != col.end()) {
      require(it->stage != 0, "StockLedger: the stage-0 zero stock is permanent");
      col.erase(it);
      return;
    }
  }
  throw std::runtime_error("StockLedger: stock " + std::to_string(id) +
                           " not present (consistency violation)");
}

const Stock* StockLedger::find(int id) const {
  for (const auto& col : stages_)
    for (const auto& s : col)
      if (s.id == id) return &s;
  return nullptr;
}

SuspensionSelection select_suspension(const StockLedger& ledger,
                                      const EIContext& ctx,
                                      const std::vector<Box>& stage_boxes,
                                      const CostVector& costs,
                                      const OptBudget& budget) {
  costs.validate();
  const int N = ctx.n_stages();
  require(static_cast<int>(stage_boxes.size()) == N &&
              costs.lambda.size() == N,
          "select_suspension: stage count mismatch");

  SuspensionSelection best;
  bool have = false;
  std::uint64_t sub = 0;
  for (int i = 1; i <= N; ++i) {
    const double denom = costs.tail_cost(i);
    for (const Stock& stock : ledger.stage(i - 1)) {
      // The same base samples serve every candidate pair, so scores are
      // comparable across stages and stocks.
      const EISelection sel = maximize_ei(ctx, stock.value, i, stage_boxes,
                                          budget.with_seed(derive_seed(budget.seed, sub++)));
      const double score = sel.value / denom;
      const bool better =
          !have || score > best.score ||
          (score == best.score &&
           (i < best.stage || (i == best.stage && stock.id < best.stock_id)));
      if (better) {
        best.stage = i;
        best.stock_id = stock.id;
        best.y_prev = stock.value;
        best.x = sel.x;
        best.tail = sel.tail;
        best.utility = sel.value;
        best.score = score;
        have = true;
      }
    }
  }
  require(have, "select_suspension: empty ledger");
  return best;
}

void apply_observation(StockLedger& ledger, const SuspensionSelection& sel,
                       const Vector& y_new, int n_stages, bool unlimited_reuse,
                       int iter) {
  const Stock* used = ledger.find(sel.stock_id);
  if (used == nullptr)
    throw std::runtime_error("apply_observation: selected stock missing");
  if (!used->unlimited) ledger.remove(sel.stock_id);
  if (sel.stage < n_stages)
    ledger.add(sel.stage, y_new, unlimited_reuse, iter);
}

StockBounds stock_bounds(const CIChain& chain, const Stock& stock,
                         const CIParams& params, const OptBudget& budget) {
  const int n_resume = stock.stage + 1;  // resuming runs stages n+1..N
  StockBounds b;
  b.lcb = lcb_given_y(chain, stock.value, n_resume, params, budget).value;
  b.ucb = ucb_given_y(chain, stock.value, n_resume, params,
                      budget.with_seed(derive_seed(budget.seed, 1)))
              .value;
  return b;
}

std::vector<int> stock_reduction(StockLedger& ledger, const CIChain& chain,
                                 const CIParams& params, const OptBudget& budget) {
  struct Entry {
    int id;
    int stage;
    StockBounds bounds;
  };
  std::vector<Entry> entries;
  std::uint64_t sub = 0;
  for (const auto& col : ledger.stages())
    for (const Stock& s : col)
      entries.push_back({s.id, s.stage,
                         stock_bounds(chain, s, params,
                                      budget.with_seed(derive_seed(budget.seed, sub++)))});

  double max_lcb = -std::numeric_limits<double>::infinity();
  for (const Entry& e : entries) max_lcb = std::max(max_lcb, e.bounds.lcb);

  const int newest = ledger.newest_id();
  std::vector<int> discarded;
  for (const Entry& e : entries) {
    if (e.stage == 0) continue;    // the zero stock is permanent
    if (e.id == newest) continue;  // most recent stock is exempt
    if (e.bounds.ucb < max_lcb) discarded.push_back(e.id);
  }
  for (int id : discarded) {
    ledger.remove(id);
    ledger.record_discard(id);
  }
  return discarded;
}

}  // namespace cascade
