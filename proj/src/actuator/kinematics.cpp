#include "actuator/kinematics.hpp"

namespace koopflow {

void Kinematics::validate() const {
  require(dt > 0.0, "kinematics timestep must be positive");
  require(m >= 1, "actuator dimension must be at least 1");
  if (mode == WellMode::Bhp) {
    require(lambda > 0.0 && lambda <= 1.0, "BHP gain lambda must lie in (0, 1]");
  }
}

ActuatorMatrices actuator_matrices(const Kinematics& kin) {
  kin.validate();
  ActuatorMatrices am;
  const auto identity = Eigen::MatrixXd::Identity(kin.m, kin.m);
  if (kin.mode == WellMode::Rate) {
    am.A_pp = identity;
    am.B_p = kin.dt * identity;
  } else {
    am.A_pp = (1.0 - kin.lambda) * identity;
    am.B_p = kin.lambda * identity;
  }
  return am;
}

Eigen::VectorXd actuator_increment(const Kinematics& kin, const Eigen::VectorXd& p_k,
                                   const Eigen::VectorXd& u_k) {
  kin.validate();
  require(p_k.size() == kin.m && u_k.size() == kin.m, "actuator dimension mismatch");
  if (kin.mode == WellMode::Rate) {
    return kin.dt * u_k;
  }
  return kin.lambda * (u_k - p_k);
}

// Written as p + increment so the consistency identity
// propagate(p, u) == p + actuator_increment(p, u) holds bit-for-bit.
Eigen::VectorXd propagate_actuator(const Kinematics& kin, const Eigen::VectorXd& p_k,
                                   const Eigen::VectorXd& u_k) {
  return p_k + actuator_increment(kin, p_k, u_k);
}

}  // namespace koopflow
