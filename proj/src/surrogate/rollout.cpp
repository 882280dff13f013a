#include "surrogate/rollout.hpp"

#include <string>

#include "core/error.hpp"

namespace koopflow {

namespace {

void check_step_dims(const SurrogateModel& model, const Eigen::VectorXd& p,
                     const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  require(p.size() == model.m(), "actuator state size does not match the model");
  require(x.size() == model.cells(), "field state size does not match the model");
  require(u.size() == model.m(), "control size does not match the model");
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> step_standardized(
    const SurrogateModel& model, const Eigen::VectorXd& p,
    const Eigen::VectorXd& x_hat, const Eigen::VectorXd& u) {
  check_step_dims(model, p, x_hat, u);

  Eigen::VectorXd p_next;
  Eigen::VectorXd x_next;
  switch (model.kind) {
    case SurrogateKind::Dmdc:
      // free joint regression: every block learned, including the actuator row
      p_next = model.A_pp * p + model.A_px * x_hat + model.B_p * u;
      x_next = model.A_xp * p + model.A_xx * x_hat + model.B_x * u;
      break;
    case SurrogateKind::CckmLevel:
      p_next = propagate_actuator(model.kin, p, u);
      x_next = model.A_xp * p + model.A_xx * x_hat;
      break;
    case SurrogateKind::CckmDelta:
      p_next = propagate_actuator(model.kin, p, u);
      x_next = x_hat + model.A_xp * actuator_increment(model.kin, p, u) +
               model.A_xx * x_hat + model.b_x;
      break;
    case SurrogateKind::HybridB:
      p_next = propagate_actuator(model.kin, p, u);
      if (model.hybrid_base == SurrogateKind::CckmLevel) {
        x_next = model.A_xp * p + model.A_xx * x_hat + model.B_x * u;
      } else {
        // delta base: the coherent input block A_xp B_p of the assembled form
        // is swapped for the DMDc bottom block; the p-coupling of the
        // increment stays.
        x_next = x_hat + model.A_xp * (model.A_pp * p - p) + model.A_xx * x_hat +
                 model.B_x * u + model.b_x;
      }
      break;
  }
  return {std::move(p_next), std::move(x_next)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> step_surrogate(const SurrogateModel& model,
                                                           const Eigen::VectorXd& p,
                                                           const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& u) {
  Eigen::VectorXd x_hat = model.scaling.standardize(x);
  auto [p_next, x_hat_next] = step_standardized(model, p, x_hat, u);
  require(p_next.allFinite(), "actuator step produced a non-finite state (A_pp/A_px/B_p row)",
          ErrorCode::Simulation);
  require(x_hat_next.allFinite(), "field step produced a non-finite state (A_xp/A_xx/B_x row)",
          ErrorCode::Simulation);
  return {std::move(p_next), model.scaling.unstandardize(x_hat_next)};
}

namespace {

Rollout rollout_impl(const SurrogateModel& model, const Eigen::VectorXd& p0,
                     const Eigen::VectorXd& x0, const Eigen::MatrixXd& u, bool throw_on_nan) {
  model.validate();
  check_step_dims(model, p0, x0, u.col(0));
  require(u.rows() == model.m(), "control rows must match the model");
  const int k = static_cast<int>(u.cols());
  require(k >= 1, "rollout needs at least one control step");
  require(p0.allFinite() && x0.allFinite(), "initial state must be finite");

  Rollout out;
  out.kind = model.kind;
  out.variable = model.variable;
  out.p_pred.resize(model.m(), k + 1);
  out.x_pred.resize(model.cells(), k + 1);
  out.p_pred.col(0) = p0;
  out.x_pred.col(0) = x0;

  // Iterate in fitting space; unstandardize each stored snapshot. This keeps
  // K standardize/unstandardize pairs from accumulating roundoff in the
  // free-run state itself.
  Eigen::VectorXd p = p0;
  Eigen::VectorXd x_hat = model.scaling.standardize(x0);
  for (int j = 0; j < k; ++j) {
    auto [p_next, x_next] = step_standardized(model, p, x_hat, u.col(j));
    if (!p_next.allFinite() || !x_next.allFinite()) {
      if (throw_on_nan)
        throw Error(ErrorCode::Simulation,
                    std::string("surrogate rollout diverged to a non-finite state at step ") +
                        std::to_string(j + 1));
      out.diverged_at = j + 1;
      out.p_pred.conservativeResize(Eigen::NoChange, j + 1);
      out.x_pred.conservativeResize(Eigen::NoChange, j + 1);
      return out;
    }
    p = std::move(p_next);
    x_hat = std::move(x_next);
    out.p_pred.col(j + 1) = p;
    out.x_pred.col(j + 1) = model.scaling.unstandardize(x_hat);
  }
  return out;
}

}  // namespace

Rollout rollout(const SurrogateModel& model, const Eigen::VectorXd& p0,
                const Eigen::VectorXd& x0, const Eigen::MatrixXd& u) {
  return rollout_impl(model, p0, x0, u, true);
}

Rollout try_rollout(const SurrogateModel& model, const Eigen::VectorXd& p0,
                    const Eigen::VectorXd& x0, const Eigen::MatrixXd& u) {
  return rollout_impl(model, p0, x0, u, false);
}

AssembledPropagator assemble_delta_propagator(const SurrogateModel& model) {
  model.validate();
  require(model.is_delta_form(), "assembled propagator is defined for delta-form models");
  const int m = model.m();
  const int n = model.cells();
  const Eigen::MatrixXd eye_n = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd eye_m = Eigen::MatrixXd::Identity(m, m);

  AssembledPropagator ap;
  ap.A.setZero(m + n, m + n);
  ap.B.setZero(m + n, m);
  ap.c.setZero(m + n);

  ap.A.topLeftCorner(m, m) = model.A_pp;
  ap.A.bottomLeftCorner(n, m) = model.A_xp * (model.A_pp - eye_m);
  ap.A.bottomRightCorner(n, n) = eye_n + model.A_xx;
  ap.B.topRows(m) = model.B_p;
  // CckmDelta keeps the coherent input path; a delta-based hybrid replaces it
  // with the DMDc bottom block.
  ap.B.bottomRows(n) =
      model.kind == SurrogateKind::HybridB ? model.B_x : model.A_xp * model.B_p;
  ap.c.tail(n) = model.b_x;
  return ap;
}

GainDiagnostics same_step_gain(const SurrogateModel& dmdc, const SurrogateModel& cckm_delta) {
  dmdc.validate();
  cckm_delta.validate();
  require(dmdc.kind == SurrogateKind::Dmdc, "first argument must be a DMDc model");
  require(cckm_delta.kind == SurrogateKind::CckmDelta,
          "second argument must be a CCKM delta model");
  require(dmdc.variable == cckm_delta.variable, "models must share the variable");
  require(dmdc.data_tag == cckm_delta.data_tag, "models must share training data");

  GainDiagnostics gd;
  gd.norm_bottom_b = dmdc.B_x.norm();
  gd.norm_coherent_path = (dmdc.A_xp * dmdc.B_p).norm();
  gd.norm_cckm_path = (cckm_delta.A_xp * cckm_delta.B_p).norm();
  gd.norm_g = (dmdc.B_x - cckm_delta.A_xp * cckm_delta.B_p).norm();
  return gd;
}

}  // namespace koopflow
