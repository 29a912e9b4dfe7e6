#pragma once

#include <functional>

#include "cascade/gp.hpp"

namespace cascade {

/// Black-box stage evaluator mapping (previous output, controls) -> output.
using StageEvaluator = std::function<Vector(const Vector& w, const Vector& x)>;

struct StageSpec {
  int index = 1;          // 1-based stage number
  Box control_box;        // X^(n)
  int prev_dim = 0;       // M^(n-1); 0 for the first stage of the benchmarks
  int output_dim = 1;     // M^(n)
  StageEvaluator evaluator;
};

/// Ordered stage descriptions defining the cascade process F. The stage-1
/// previous input is the zero vector of the declared dimension.
struct CascadeSpec {
  std::vector<StageSpec> stages;

  int n_stages() const { return static_cast<int>(stages.size()); }
  const StageSpec& stage(int n) const { return stages.at(n - 1); }

  void validate() const {
    require(!stages.empty(), "CascadeSpec: no stages");
    for (int n = 1; n <= n_stages(); ++n) {
      const StageSpec& s = stage(n);
      require(s.index == n, "CascadeSpec: stage index out of order");
      require(static_cast<bool>(s.evaluator), "CascadeSpec: missing evaluator");
      if (n > 1)
        require(s.prev_dim == stage(n - 1).output_dim,
                "CascadeSpec: output/input dimension mismatch between stages");
    }
    require(stages.back().output_dim == 1,
            "CascadeSpec: final stage output must be scalar");
  }

  Vector zero_input() const { return Vector::Zero(stages.front().prev_dim); }

  /// Box over the concatenated controls x^(1..N).
  Box joint_box() const {
    std::vector<Box> boxes;
    for (const auto& s : stages) boxes.push_back(s.control_box);
    return Box::concat(boxes);
  }

  /// Split a concatenated control vector into per-stage controls.
  std::vector<Vector> split_controls(const Vector& joint) const {
    std::vector<Vector> xs;
    Eigen::Index off = 0;
    for (const auto& s : stages) {
      xs.push_back(joint.segment(off, s.control_box.dim()));
      off += s.control_box.dim();
    }
    require(off == joint.size(), "split_controls: size mismatch");
    return xs;
  }
};

struct EvalRecord {
  int iteration = 0;
  int stage = 0;
  Vector prev_output;
  Vector controls;
  Vector output;
};

/// Per-stage observation logs D_t^(n), single writer.
struct ObservationLog {
  std::vector<StageDataset> datasets;  // index n-1 holds stage n
  int iteration = 0;

  explicit ObservationLog(const CascadeSpec& spec) {
    for (const auto& s : spec.stages) {
      StageDataset d;
      d.inputs.resize(0, s.prev_dim + s.control_box.dim());
      d.outputs.resize(0, s.output_dim);
      datasets.push_back(std::move(d));
    }
  }

  StageDataset& stage(int n) { return datasets.at(n - 1); }
  const StageDataset& stage(int n) const { return datasets.at(n - 1); }
};

Vector eval_stage(const CascadeSpec& spec, int n, const Vector& w, const Vector& x);

struct CascadeResult {
  double final_output = 0.0;
  std::vector<Vector> intermediates;  // y^(1..N)
};

CascadeResult eval_cascade(const CascadeSpec& spec, const std::vector<Vector>& controls);

void append_observation(ObservationLog& log, const EvalRecord& record);

/// Joint GP input (w, x) for a stage query.
inline Vector joint_input(const Vector& w, const Vector& x) {
  Vector p(w.size() + x.size());
  p.head(w.size()) = w;
  p.tail(x.size()) = x;
  return p;
}

}  // namespace cascade
