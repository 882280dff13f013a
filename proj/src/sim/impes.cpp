#include "sim/impes.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/units.hpp"
#include "sim/well.hpp"

namespace koopflow {

namespace {

struct Face {
  int i = 0;          ///< lower cell index
  int j = 0;          ///< higher cell index
  double trans = 0.0; ///< geometric TPFA transmissibility [m^3]
};

// Interior faces of the structured grid, x-neighbours first, then y.
// Transmissibility is the harmonic mean of the two half-cell contributions,
// which collapses to k*A/d for the uniform-permeability case.
std::vector<Face> build_faces(const ReservoirModel& model) {
  const Grid& g = model.grid;
  const double k = model.props.permeability;
  const double dx = g.dx();
  const double dy = g.dy();
  const double half_tx = 2.0 * k * (dy * g.h) / dx;
  const double half_ty = 2.0 * k * (dx * g.h) / dy;
  auto harmonic = [](double a, double b) { return a * b / (a + b); };

  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(2 * g.nx * (g.nx - 1)));
  for (int r = 0; r < g.nx; ++r)
    for (int c = 0; c + 1 < g.nx; ++c)
      faces.push_back({g.index(r, c), g.index(r, c + 1), harmonic(half_tx, half_tx)});
  for (int r = 0; r + 1 < g.nx; ++r)
    for (int c = 0; c < g.nx; ++c)
      faces.push_back({g.index(r, c), g.index(r + 1, c), harmonic(half_ty, half_ty)});
  return faces;
}

// Upwind direction per face: +1 takes mobility from face.i, -1 from face.j,
// 0 marks a pressure tie (arithmetic mobility, zero flux).
std::vector<std::int8_t> upwind_directions(const std::vector<Face>& faces,
                                           const Eigen::VectorXd& p) {
  std::vector<std::int8_t> dir(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const double dp = p[faces[f].i] - p[faces[f].j];
    dir[f] = dp > 0.0 ? std::int8_t{1} : (dp < 0.0 ? std::int8_t{-1} : std::int8_t{0});
  }
  return dir;
}

std::vector<double> face_mobilities(const std::vector<Face>& faces,
                                    const std::vector<std::int8_t>& dir,
                                    const Eigen::VectorXd& sw, const FluidRock& props) {
  std::vector<double> lam(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (dir[f] > 0)
      lam[f] = props.total_mobility(sw[faces[f].i]);
    else if (dir[f] < 0)
      lam[f] = props.total_mobility(sw[faces[f].j]);
    else
      lam[f] = 0.5 * (props.total_mobility(sw[faces[f].i]) +
                      props.total_mobility(sw[faces[f].j]));
  }
  return lam;
}

struct PressureSolution {
  Eigen::VectorXd p;
  std::vector<double> lam;  ///< face mobilities used in the final assembly
  double lam_well = 0.0;    ///< well-cell total mobility used in the assembly
};

PressureSolution solve_pressure(const SimState& state, const ReservoirModel& model,
                                const WellSpec& well, const std::vector<Face>& faces,
                                const std::vector<std::int8_t>& dir, double wi,
                                WellMode mode, double u_rate, double bhp_eff,
                                double vp, double dt) {
  const int n = model.grid.cell_count();
  const double c_t = model.props.c_t;
  const double storage = vp * c_t / dt;

  std::vector<double> lam = face_mobilities(faces, dir, state.sw, model.props);
  const double lam_well = model.props.total_mobility(state.sw[well.cell]);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(faces.size() * 4 + static_cast<std::size_t>(n) + 1);
  Eigen::VectorXd rhs = storage * state.p;
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, storage);

  for (std::size_t f = 0; f < faces.size(); ++f) {
    const double t = faces[f].trans * lam[f];
    diag[faces[f].i] += t;
    diag[faces[f].j] += t;
    trip.emplace_back(faces[f].i, faces[f].j, -t);
    trip.emplace_back(faces[f].j, faces[f].i, -t);
  }
  if (mode == WellMode::Rate) {
    rhs[well.cell] += u_rate;
  } else {
    diag[well.cell] += wi * lam_well;
    rhs[well.cell] += wi * lam_well * bhp_eff;
  }
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(A);
  require(solver.info() == Eigen::Success, "pressure matrix factorization failed",
          ErrorCode::Simulation);
  Eigen::VectorXd p = solver.solve(rhs);
  require(solver.info() == Eigen::Success && p.allFinite(),
          "pressure solve produced a non-finite field", ErrorCode::Simulation);

  const double rel_res = (A * p - rhs).norm() / rhs.norm();
  require(rel_res < 1e-10,
          "pressure solve residual " + std::to_string(rel_res) + " exceeds 1e-10",
          ErrorCode::Simulation);
  return {std::move(p), std::move(lam), lam_well};
}

}  // namespace

void SimState::validate(const Grid& grid) const {
  const int n = grid.cell_count();
  require(p.size() == n && sw.size() == n, "state field size does not match the grid");
  require(p.allFinite() && sw.allFinite(), "state fields must be finite");
  require((p.array() > 0.0).all(), "cell pressures must stay positive");
  require((sw.array() >= 0.0).all() && (sw.array() <= 1.0).all(),
          "saturations must stay within [0, 1]");
}

SimState initial_state(const ReservoirModel& model, const WellSpec& well) {
  model.validate();
  well.validate(model.grid);
  SimState s;
  s.p = model.p_init;
  s.sw = model.sw_init;
  s.well_bhp = model.p_init[well.cell];
  return s;
}

double max_frac_flow_slope(const FluidRock& props) {
  // f_w(s) = M s / (M s + 1 - s) with M = mu_o / mu_w; f' peaks at an
  // endpoint: M at s = 0 when M >= 1, 1/M at s = 1 otherwise.
  const double m = props.mu_o / props.mu_w;
  return std::max(m, 1.0 / m);
}

SimState step_impes(const SimState& state, const ReservoirModel& model,
                    const WellSpec& well, double u_k, double dt, StepReport* report) {
  model.validate();
  state.validate(model.grid);
  require(dt > 0.0 && std::isfinite(dt), "step size must be positive");
  require(std::isfinite(u_k), "control input must be finite");
  if (well.mode == WellMode::Rate)
    require(u_k >= 0.0, "rate control models an injector; negative rates are not supported");
  else
    require(u_k > 0.0, "commanded BHP must be positive");

  const Grid& grid = model.grid;
  const FluidRock& props = model.props;
  const int n = grid.cell_count();
  const double vp = grid.cell_volume() * props.porosity;
  const double wi = peaceman_well_index(model, well);
  const std::vector<Face> faces = build_faces(model);

  // Sandface pressure over the step is the actuator STATE entering it; the
  // command u_k moves that state only at step end (leaky integrator, and
  // lambda == 1 passes the command through exactly). The field therefore
  // responds to p_k, never to u_k directly: the same causality the actuator
  // kinematics prescribe for the surrogates.
  const double bhp_eff = state.well_bhp;

  // Implicit pressure. Upwind mobilities start from the previous pressure
  // field; if the solved field flips any face direction, reassemble and solve
  // once more with the updated directions.
  std::vector<std::int8_t> dir = upwind_directions(faces, state.p);
  PressureSolution sol =
      solve_pressure(state, model, well, faces, dir, wi, well.mode, u_k, bhp_eff, vp, dt);
  int passes = 1;
  std::vector<std::int8_t> dir2 = upwind_directions(faces, sol.p);
  if (dir2 != dir) {
    dir = std::move(dir2);
    sol = solve_pressure(state, model, well, faces, dir, wi, well.mode, u_k, bhp_eff, vp, dt);
    passes = 2;
  }
  const Eigen::VectorXd& p_new = sol.p;

  // Face total fluxes from the mobilities that entered the final solve;
  // positive flows from face.i to face.j.
  std::vector<double> flux(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f)
    flux[f] = faces[f].trans * sol.lam[f] * (p_new[faces[f].i] - p_new[faces[f].j]);

  const double q_total = well.mode == WellMode::Rate
                             ? u_k
                             : wi * sol.lam_well * (bhp_eff - p_new[well.cell]);

  // Compressible mass balance: storage change must equal the well volume.
  const Eigen::VectorXd dp = p_new - state.p;
  const double stored = vp * props.c_t * dp.sum();
  const double scale = std::max(vp * props.c_t * dp.cwiseAbs().sum(), std::abs(q_total) * dt);
  const double floor = 1e-9 * vp * props.c_t * state.p.cwiseAbs().sum();
  double balance = 0.0;
  if (scale > floor) {
    balance = std::abs(stored - q_total * dt) / scale;
    require(balance < 1e-8, "compressible mass balance violated: relative error " +
                                std::to_string(balance),
            ErrorCode::Simulation);
  }

  // Explicit transport CFL on the frozen total flux; 0.9 safety target.
  Eigen::VectorXd influx = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd outflux = Eigen::VectorXd::Zero(n);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (flux[f] > 0.0) {
      outflux[faces[f].i] += flux[f];
      influx[faces[f].j] += flux[f];
    } else {
      outflux[faces[f].j] -= flux[f];
      influx[faces[f].i] -= flux[f];
    }
  }
  if (q_total >= 0.0)
    influx[well.cell] += q_total;
  else
    outflux[well.cell] -= q_total;
  const double fprime = max_frac_flow_slope(props);
  const double cfl = dt * fprime * std::max(influx.maxCoeff(), outflux.maxCoeff()) / vp;
  const int nsub = std::max(1, static_cast<int>(std::ceil(cfl / 0.9)));
  const double dts = dt / nsub;

  // Upwind water transport with the compressible storage split applied in
  // proportion to the sub-step; summing the water and oil updates recovers
  // the discrete pressure balance exactly, so saturations stay in [0, 1]
  // up to roundoff.
  Eigen::VectorXd sw = state.sw;
  for (int s = 0; s < nsub; ++s) {
    Eigen::VectorXd net_w = Eigen::VectorXd::Zero(n);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      const double fw = flux[f] > 0.0   ? props.frac_flow(sw[faces[f].i])
                        : flux[f] < 0.0 ? props.frac_flow(sw[faces[f].j])
                                        : 0.0;
      const double fwf = fw * flux[f];
      net_w[faces[f].i] -= fwf;
      net_w[faces[f].j] += fwf;
    }
    const double qw = well.mode == WellMode::Rate
                          ? u_k
                          : (q_total >= 0.0 ? q_total : props.frac_flow(sw[well.cell]) * q_total);
    net_w[well.cell] += qw;

    for (int i = 0; i < n; ++i) {
      const double snew =
          sw[i] + dts / vp * net_w[i] - sw[i] * props.c_t * dp[i] * (dts / dt);
      require(snew >= -1e-9 && snew <= 1.0 + 1e-9,
              "saturation update left [0, 1] at cell " + std::to_string(i) + ": " +
                  std::to_string(snew),
              ErrorCode::Simulation);
      sw[i] = std::clamp(snew, 0.0, 1.0);
    }
  }

  SimState next;
  next.p = p_new;
  next.sw = std::move(sw);
  next.t = state.t + dt;
  next.cum_injected = state.cum_injected + q_total * dt;
  next.well_bhp = well.mode == WellMode::Bhp
                      ? (well.lambda == 1.0
                             ? u_k
                             : state.well_bhp + well.lambda * (u_k - state.well_bhp))
                      : p_new[well.cell] + q_total / (wi * sol.lam_well);
  next.validate(model.grid);

  if (report) {
    report->q_total = q_total;
    report->q_water = well.mode == WellMode::Rate
                          ? u_k
                          : (q_total >= 0.0 ? q_total
                                            : props.frac_flow(state.sw[well.cell]) * q_total);
    report->balance_error = balance;
    report->substeps = nsub;
    report->upwind_passes = passes;
  }
  return next;
}

SimTrajectories simulate(const ReservoirModel& model, const WellSpec& well,
                         const ControlSchedule& schedule) {
  model.validate();
  well.validate(model.grid);
  schedule.validate();
  require(schedule.mode == well.mode, "schedule mode does not match the well mode");

  const int k_steps = static_cast<int>(schedule.u.size());
  const int n = model.grid.cell_count();
  const bool rate = well.mode == WellMode::Rate;
  // Datasets are emitted in reporting units (days; m^3/day and m^3 for rate
  // wells, bar otherwise) so that every downstream consumer shares one scale.
  const double dt_days = schedule.dt / units::day;
  const double u_scale = rate ? units::day : 1.0 / units::bar;
  const Kinematics kin{well.mode, dt_days, well.lambda, 1};

  SimTrajectories out;
  out.states.reserve(static_cast<std::size_t>(k_steps) + 1);
  out.states.push_back(initial_state(model, well));

  // Actuator channel propagated by the shared kinematics: cumulative volume
  // from zero in rate mode, sandface pressure from the initial well-cell
  // pressure in BHP mode.
  Eigen::MatrixXd p_act(1, k_steps + 1);
  p_act(0, 0) = rate ? 0.0 : out.states.front().p[well.cell] / units::bar;
  Eigen::MatrixXd u_row(1, k_steps);

  Eigen::MatrixXd press(n, k_steps + 1);
  Eigen::MatrixXd sat(n, k_steps + 1);
  press.col(0) = out.states.front().p / units::bar;
  sat.col(0) = out.states.front().sw;

  for (int k = 0; k < k_steps; ++k) {
    const double u = schedule.u[static_cast<std::size_t>(k)];
    out.states.push_back(step_impes(out.states.back(), model, well, u, schedule.dt));
    press.col(k + 1) = out.states.back().p / units::bar;
    sat.col(k + 1) = out.states.back().sw;
    u_row(0, k) = u * u_scale;
    Eigen::VectorXd pk = p_act.col(k);
    p_act.col(k + 1) = propagate_actuator(kin, pk, u_row.col(k));
  }

  out.pressure = TrajectoryDataset{p_act, press, u_row, Variable::Pressure, dt_days};
  out.saturation = TrajectoryDataset{p_act, sat, u_row, Variable::Saturation, dt_days};
  out.pressure.validate();
  out.saturation.validate();
  return out;
}

}  // namespace koopflow
