#pragma once

#include <Eigen/Dense>

#include "core/types.hpp"

namespace koopflow {

/// Known actuator kinematics. Rate mode integrates the commanded rate into
/// a cumulative injected volume; BHP mode is a first-order (leaky
/// integrator) well response of gain lambda, with lambda = 1 the
/// instantaneous passthrough consistent with a Peaceman sandface coupling.
struct Kinematics {
  WellMode mode = WellMode::Rate;
  double dt = 0.0;      // step size in the dataset's time unit
  double lambda = 1.0;  // BHP gain, (0, 1]; ignored in rate mode
  int m = 1;            // actuator dimension

  void validate() const;
  bool operator==(const Kinematics&) const = default;
};

struct ActuatorMatrices {
  Eigen::MatrixXd A_pp;  // m x m
  Eigen::MatrixXd B_p;   // m x m
};

/// Rate mode: (I, dt*I). BHP mode: ((1-lambda)*I, lambda*I).
ActuatorMatrices actuator_matrices(const Kinematics& kin);

/// p_{k+1} = A_pp p_k + B_p u_k.
Eigen::VectorXd propagate_actuator(const Kinematics& kin, const Eigen::VectorXd& p_k,
                                   const Eigen::VectorXd& u_k);

/// Rate mode: dt*u_k. BHP mode: lambda*(u_k - p_k). Satisfies
/// propagate_actuator(p, u) = p + actuator_increment(p, u) exactly.
Eigen::VectorXd actuator_increment(const Kinematics& kin, const Eigen::VectorXd& p_k,
                                   const Eigen::VectorXd& u_k);

}  // namespace koopflow
