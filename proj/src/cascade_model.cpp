#include "cascade/cascade_model.hpp"

namespace cascade {

Vector eval_stage(const CascadeSpec& spec, int n, const Vector& w, const Vector& x) {
  const StageSpec& s = spec.stage(n);
  require(w.size() == s.prev_dim, "eval_stage: previous-output dimension mismatch");
  require(s.control_box.contains(x),
          "eval_stage: controls outside the stage box (stage " + std::to_string(n) + ")");
  Vector y = s.evaluator(w, x);
  if (y.size() != s.output_dim || !y.allFinite())
    throw std::runtime_error("eval_stage: evaluator failure at stage " +
                             std::to_string(n));
  return y;
}

CascadeResult eval_cascade(const CascadeSpec& spec, const std::vector<Vector>& controls) {
  spec.validate();
  require(static_cast<int>(controls.size()) == spec.n_stages(),
          "eval_cascade: need one control vector per stage");
  CascadeResult result;
  Vector y = spec.zero_input();
  for (int n = 1; n <= spec.n_stages(); ++n) {
    try {
      y = eval_stage(spec, n, y, controls[n - 1]);
    } catch (const std::exception& e) {
      throw std::runtime_error("eval_cascade: stage " + std::to_string(n) +
                               " failed: " + e.what());
    }
    result.intermediates.push_back(y);
  }
  result.final_output = y[0];
  return result;
}

void append_observation(ObservationLog& log, const EvalRecord& record) {
  StageDataset& d = log.stage(record.stage);
  d.append(joint_input(record.prev_output, record.controls), record.output);
}

}  // namespace cascade
