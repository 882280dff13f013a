#pragma once

#include <Eigen/Dense>

#include "actuator/kinematics.hpp"
#include "core/types.hpp"

namespace koopflow {

/// Full simulator state between IMPES steps.
struct SimState {
  Eigen::VectorXd p;        ///< cell pressures [Pa]
  Eigen::VectorXd sw;       ///< water saturations [-]
  double t = 0.0;           ///< elapsed time [s]
  double cum_injected = 0;  ///< net well volume, injection positive [m^3]
  double well_bhp = 0.0;    ///< sandface pressure state [Pa]

  void validate(const Grid& grid) const;
};

/// Per-step diagnostics (mass balance, sub-stepping) surfaced for tests.
struct StepReport {
  double q_total = 0.0;       ///< total well rate over the step [m^3/s]
  double q_water = 0.0;       ///< water component of the well rate [m^3/s]
  double balance_error = 0.0; ///< relative compressible mass-balance residual
  int substeps = 1;           ///< saturation sub-steps taken
  int upwind_passes = 1;      ///< pressure solves (2 when upwinding flipped)
};

SimState initial_state(const ReservoirModel& model, const WellSpec& well);

/// One IMPES step: implicit pressure with upwind total mobility, then explicit
/// upwind saturation transport sub-stepped to CFL <= 0.9. u_k is the control
/// for the step (rate [m^3/s] or commanded BHP [Pa] per well.mode).
SimState step_impes(const SimState& state, const ReservoirModel& model,
                    const WellSpec& well, double u_k, double dt,
                    StepReport* report = nullptr);

struct SimTrajectories {
  TrajectoryDataset pressure;    ///< snapshots in bar, dt in days
  TrajectoryDataset saturation;  ///< dimensionless, dt in days
  std::vector<SimState> states;  ///< K+1 SI states including the initial one
};

/// Run a full schedule. The emitted datasets use reporting units throughout:
/// time in days, controls in m^3/day (rate) or bar (BHP), actuator channel in
/// m^3 (cumulative injected volume from p0 = 0) or bar (leaky integrator from
/// p0 = initial well-cell pressure), pressure snapshots in bar. The matching
/// identification kinematics is therefore {mode, dt_days, lambda}.
SimTrajectories simulate(const ReservoirModel& model, const WellSpec& well,
                         const ControlSchedule& schedule);

/// Maximum of f_w'(s) over [0,1] for the linear-relperm fractional flow; used
/// for the explicit transport CFL bound.
double max_frac_flow_slope(const FluidRock& props);

}  // namespace koopflow
