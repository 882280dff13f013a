#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "ident/fit.hpp"

namespace koopflow {

/// Free-run prediction: p_pred/x_pred hold K+1 states (column 0 is the given
/// initial condition). x_pred is in physical field units.
struct Rollout {
  Eigen::MatrixXd p_pred;
  Eigen::MatrixXd x_pred;
  SurrogateKind kind = SurrogateKind::Dmdc;
  Variable variable = Variable::Pressure;
  /// First step index whose state came out non-finite; the arrays are
  /// truncated to the finite prefix when set (try_rollout only).
  std::optional<int> diverged_at;
};

/// Same-step control sensitivity of the field row, fitting-space norms.
struct GainDiagnostics {
  double norm_bottom_b = 0.0;     ///< ||B_x(dmdc)||_F, the learned feed-through
  double norm_coherent_path = 0.0;///< ||A_xp(dmdc) B_p(dmdc)||_F, DMDc's own actuator-mediated path
  double norm_cckm_path = 0.0;    ///< ||A_xp(cckm-delta) B_p(kin)||_F, the coherent input path
  double norm_g = 0.0;            ///< ||B_x(dmdc) - A_xp(cckm-delta) B_p(kin)||_F
};

/// One step in fitting space: p physical, x standardized. Exposed so the
/// teacher-forced training report and the rollout share one propagator.
std::pair<Eigen::VectorXd, Eigen::VectorXd> step_standardized(
    const SurrogateModel& model, const Eigen::VectorXd& p,
    const Eigen::VectorXd& x_hat, const Eigen::VectorXd& u);

/// One step in physical units for both channels.
std::pair<Eigen::VectorXd, Eigen::VectorXd> step_surrogate(const SurrogateModel& model,
                                                           const Eigen::VectorXd& p,
                                                           const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& u);

/// K iterated steps; throws on a non-finite state, naming the step.
Rollout rollout(const SurrogateModel& model, const Eigen::VectorXd& p0,
                const Eigen::VectorXd& x0, const Eigen::MatrixXd& u);

/// As rollout, but a blow-up truncates the output and sets diverged_at
/// instead of throwing, so comparisons can still be tabulated.
Rollout try_rollout(const SurrogateModel& model, const Eigen::VectorXd& p0,
                    const Eigen::VectorXd& x0, const Eigen::MatrixXd& u);

/// Assembled block one-step form z' = A z + B u + c of a delta-form model
/// (the increment evaluation and this matrix must agree to roundoff).
struct AssembledPropagator {
  Eigen::MatrixXd A;  // (m+n) x (m+n)
  Eigen::MatrixXd B;  // (m+n) x m
  Eigen::VectorXd c;  // m+n
};

AssembledPropagator assemble_delta_propagator(const SurrogateModel& model);

/// Field-row input-path diagnostics of a (dmdc, cckm-delta) pair fitted on
/// the same data.
GainDiagnostics same_step_gain(const SurrogateModel& dmdc, const SurrogateModel& cckm_delta);

}  // namespace koopflow
