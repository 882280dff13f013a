#include <doctest.h>

#include <Eigen/Dense>

#include "core/error.hpp"
#include "metrics/metrics.hpp"

using namespace koopflow;

namespace {

// Reference window with linear field growth and a volume-like actuator ramp,
// in reporting units (bar / days) like the simulator emits.
TrajectoryDataset make_ref(int cells, int steps) {
  TrajectoryDataset ref;
  ref.variable = Variable::Pressure;
  ref.dt = 1.0;
  ref.p.resize(1, steps + 1);
  ref.x.resize(cells, steps + 1);
  ref.u = Eigen::MatrixXd::Ones(1, steps);
  for (int k = 0; k <= steps; ++k) {
    ref.p(0, k) = 10.0 * k;
    ref.x.col(k).setConstant(1.0 + k);
  }
  return ref;
}

Rollout exact_prediction(const TrajectoryDataset& ref) {
  Rollout ro;
  ro.kind = SurrogateKind::CckmDelta;
  ro.variable = ref.variable;
  ro.p_pred = ref.p;
  ro.x_pred = ref.x;
  return ro;
}

}  // namespace

TEST_CASE("mean_abs_error: double-loop oracle and unit offset") {
  Eigen::MatrixXd ref(2, 3);
  ref << 1, 2, 3, 4, 5, 6;
  Eigen::MatrixXd pred(2, 3);
  pred << 1.5, 2, 2, 4, 7, 6;

  double acc = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) acc += std::abs(pred(i, j) - ref(i, j));
  CHECK(mean_abs_error(pred, ref) == doctest::Approx(acc / 6.0).epsilon(1e-15));

  // pred = ref + 1 everywhere -> exactly 1
  const Eigen::MatrixXd shifted = ref.array() + 1.0;
  CHECK(mean_abs_error(shifted, ref) == 1.0);

  CHECK_THROWS_AS(static_cast<void>(mean_abs_error(ref, ref.transpose())), Error);
}

TEST_CASE("fpce: doubling gives 100 percent, zero reference is distinguished") {
  Eigen::MatrixXd ref(2, 2);
  ref << 3, 0, 4, 0;
  const auto doubled = fpce(2.0 * ref, ref);
  REQUIRE(doubled.has_value());
  CHECK(*doubled == doctest::Approx(100.0).epsilon(1e-14));

  const auto self = fpce(ref, ref);
  REQUIRE(self.has_value());
  CHECK(*self == 0.0);

  // scale invariance
  const auto scaled = fpce(2.0e9 * ref, 1.0e9 * ref);
  CHECK(*scaled == doctest::Approx(100.0).epsilon(1e-14));

  CHECK_FALSE(fpce(ref, Eigen::MatrixXd::Zero(2, 2)).has_value());
}

TEST_CASE("build_report: exact prediction and series layout") {
  const TrajectoryDataset ref = make_ref(4, 5);
  const Rollout ro = exact_prediction(ref);
  const EvalReport rep = build_report(ro, ref, Window::Test, 60.0);

  CHECK(rep.window == Window::Test);
  REQUIRE(rep.mae.has_value());
  CHECK(*rep.mae == 0.0);
  CHECK(*rep.fpce_pct == 0.0);
  CHECK(*rep.control_fpce_pct == 0.0);
  CHECK_FALSE(rep.diverged);

  CHECK(rep.field_min == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rep.field_max == doctest::Approx(6.0).epsilon(1e-15));

  REQUIRE(rep.t_days.size() == 6);
  CHECK(rep.t_days[0] == 60.0);
  CHECK(rep.t_days[5] == 65.0);
  CHECK(rep.mean_field[2] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(rep.actuator[3] == 30.0);  // actuator series passes through as stored
}

TEST_CASE("build_report: shared initial state is excluded from the error") {
  const TrajectoryDataset ref = make_ref(3, 4);
  Rollout ro = exact_prediction(ref);
  // corrupt only the shared initial snapshot: errors must stay zero
  ro.x_pred.col(0).setConstant(55.0);
  const EvalReport rep = build_report(ro, ref, Window::Train, 0.0);
  CHECK(*rep.mae == 0.0);
  CHECK(*rep.fpce_pct == 0.0);

  // a unit offset on the compared steps shows up as exactly 1
  Rollout off = exact_prediction(ref);
  off.x_pred.rightCols(4).array() += 1.0;
  const EvalReport rep2 = build_report(off, ref, Window::Train, 0.0);
  CHECK(*rep2.mae == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_report: truncated prediction is scored on its prefix and flagged") {
  const TrajectoryDataset ref = make_ref(3, 6);
  Rollout ro = exact_prediction(ref);
  ro.diverged_at = 3;  // states 0..2 survived
  ro.p_pred.conservativeResize(Eigen::NoChange, 3);
  ro.x_pred.conservativeResize(Eigen::NoChange, 3);

  const EvalReport rep = build_report(ro, ref, Window::Test, 0.0);
  CHECK(rep.diverged);
  CHECK(*rep.divergence_step == 3);
  REQUIRE(rep.mae.has_value());
  CHECK(*rep.mae == 0.0);  // surviving prefix was exact
  CHECK(rep.t_days.size() == 3);

  SUBCASE("no surviving step leaves the errors absent") {
    Rollout dead = exact_prediction(ref);
    dead.diverged_at = 1;
    dead.p_pred.conservativeResize(Eigen::NoChange, 1);
    dead.x_pred.conservativeResize(Eigen::NoChange, 1);
    const EvalReport none = build_report(dead, ref, Window::Test, 0.0);
    CHECK_FALSE(none.mae.has_value());
    CHECK_FALSE(none.fpce_pct.has_value());
    CHECK(none.diverged);
  }
}

TEST_CASE("eval report serializes optionals as null") {
  const TrajectoryDataset ref = make_ref(2, 3);
  Rollout dead = exact_prediction(ref);
  dead.diverged_at = 1;
  dead.p_pred.conservativeResize(Eigen::NoChange, 1);
  dead.x_pred.conservativeResize(Eigen::NoChange, 1);
  const EvalReport rep = build_report(dead, ref, Window::Test, 0.0);

  const nlohmann::json j = to_json(rep);
  CHECK(j["mae"].is_null());
  CHECK(j["diverged"].get<bool>());
  CHECK(j["divergence_step"].get<int>() == 1);
  CHECK(j["model"].get<std::string>() == "cckm-delta");
  CHECK(j["series"]["t_days"].size() == 1);
}
