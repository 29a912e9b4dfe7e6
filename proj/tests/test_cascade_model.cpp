#include <doctest.h>

#include <cmath>

#include "cascade/cascade_model.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

// Three-stage toy: scalar chain with distinct smooth stage maps.
CascadeSpec toy_spec() {
  CascadeSpec spec;
  for (int n = 1; n <= 3; ++n) {
    StageSpec s;
    s.index = n;
    s.prev_dim = n == 1 ? 0 : 1;
    s.output_dim = 1;
    s.control_box = Box::cube(n == 1 ? 2 : 1, -1.0, 1.0);
    s.evaluator = [n](const Vector& w, const Vector& x) {
      const double wsum = w.size() ? w.sum() : 0.0;
      return Vector::Constant(1, std::sin(wsum) + n * x.sum() + 0.1 * wsum * wsum);
    };
    spec.stages.push_back(std::move(s));
  }
  spec.validate();
  return spec;
}

}  // namespace

TEST_CASE("eval_cascade equals sequential eval_stage calls exactly") {
  const CascadeSpec spec = toy_spec();
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vector> xs;
    for (const auto& s : spec.stages) xs.push_back(rng.uniform_in(s.control_box));
    const CascadeResult r = eval_cascade(spec, xs);
    Vector y = spec.zero_input();
    for (int n = 1; n <= 3; ++n) {
      y = eval_stage(spec, n, y, xs[n - 1]);
      CHECK((r.intermediates[n - 1].array() == y.array()).all());
    }
    CHECK(r.final_output == y[0]);
  }
}

TEST_CASE("replaying logged controls reproduces logged outputs bit-exactly") {
  const CascadeSpec spec = toy_spec();
  ObservationLog log(spec);
  Rng rng(6);
  std::vector<EvalRecord> records;
  Vector y = spec.zero_input();
  for (int n = 1; n <= 3; ++n) {
    const Vector x = rng.uniform_in(spec.stage(n).control_box);
    const Vector out = eval_stage(spec, n, y, x);
    records.push_back({1, n, y, x, out});
    append_observation(log, records.back());
    y = out;
  }
  for (const auto& r : records) {
    const Vector again = eval_stage(spec, r.stage, r.prev_output, r.controls);
    CHECK((again.array() == r.output.array()).all());
  }
  for (int n = 1; n <= 3; ++n) CHECK(log.stage(n).size() == 1);
}

TEST_CASE("appending never mutates earlier rows") {
  const CascadeSpec spec = toy_spec();
  ObservationLog log(spec);
  const Vector x0 = Vector::Zero(2);
  append_observation(log, {1, 1, Vector(0), x0, Vector::Constant(1, 42.0)});
  const Matrix before_in = log.stage(1).inputs;
  const Matrix before_out = log.stage(1).outputs;
  for (int i = 0; i < 5; ++i)
    append_observation(log, {i + 2, 1, Vector(0), Vector::Constant(2, 0.1 * i),
                             Vector::Constant(1, static_cast<double>(i))});
  CHECK((log.stage(1).inputs.topRows(1).array() == before_in.array()).all());
  CHECK((log.stage(1).outputs.topRows(1).array() == before_out.array()).all());
}

TEST_CASE("eval_stage enforces the box and reports evaluator failures by stage") {
  const CascadeSpec spec = toy_spec();
  CHECK_THROWS_AS(eval_stage(spec, 1, Vector(0), Vector::Constant(2, 2.0)),
                  std::invalid_argument);

  CascadeSpec bad = toy_spec();
  bad.stages[1].evaluator = [](const Vector&, const Vector&) {
    return Vector::Constant(1, std::nan(""));
  };
  Vector y1 = eval_stage(bad, 1, Vector(0), Vector::Zero(2));
  try {
    eval_stage(bad, 2, y1, Vector::Zero(1));
    FAIL("expected a runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("spec validation catches dimension chain breaks") {
  CascadeSpec spec = toy_spec();
  spec.stages[1].prev_dim = 2;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = toy_spec();
  spec.stages[2].output_dim = 3;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("joint box and split_controls round-trip") {
  const CascadeSpec spec = toy_spec();
  const Box joint = spec.joint_box();
  CHECK(joint.dim() == 4);
  Rng rng(8);
  const Vector z = rng.uniform_in(joint);
  const auto xs = spec.split_controls(z);
  REQUIRE(xs.size() == 3);
  Eigen::Index off = 0;
  for (const auto& x : xs) {
    CHECK((z.segment(off, x.size()).array() == x.array()).all());
    off += x.size();
  }
}
