#include "core/types.hpp"

#include <cmath>
#include <sstream>

namespace koopflow {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

const char* to_string(WellMode mode) {
  return mode == WellMode::Rate ? "rate" : "bhp";
}

const char* to_string(Variable variable) {
  return variable == Variable::Pressure ? "pressure" : "saturation";
}

void Grid::validate() const {
  require(nx >= 3, "nx must be at least 3");
  if (nx % 2 == 0) {
    std::ostringstream msg;
    msg << "nx must be odd (got " << nx << "): the single well sits on the exact center cell";
    throw_invalid(msg.str());
  }
  require(lx > 0.0 && ly > 0.0, "grid extents must be positive");
  require(h > 0.0, "grid thickness must be positive");
}

void FluidRock::validate() const {
  require(permeability > 0.0, "permeability must be positive");
  require(porosity > 0.0 && porosity < 1.0, "porosity must lie in (0, 1)");
  require(mu_w > 0.0 && mu_o > 0.0, "viscosities must be positive");
  require(c_t > 0.0, "total compressibility must be positive");
}

void ReservoirModel::validate() const {
  grid.validate();
  props.validate();
  const int n = grid.cell_count();
  require(p_init.size() == n, "p_init size must equal cell count");
  require(sw_init.size() == n, "sw_init size must equal cell count");
  require(all_finite(p_init) && all_finite(sw_init), "initial fields must be finite");
  require((p_init.array() > 0.0).all(), "initial pressures must be positive");
  require((sw_init.array() >= 0.0).all() && (sw_init.array() <= 1.0).all(),
          "initial saturations must lie in [0, 1]");
}

void WellSpec::validate(const Grid& grid) const {
  require(cell >= 0 && cell < grid.cell_count(), "well cell index out of range");
  require(r_w > 0.0, "wellbore radius must be positive");
  require(r_w < 0.5 * std::min(grid.dx(), grid.dy()),
          "wellbore radius must be smaller than half the cell size");
  if (mode == WellMode::Bhp) {
    require(lambda > 0.0 && lambda <= 1.0, "BHP gain lambda must lie in (0, 1]");
  }
}

void ControlSchedule::validate() const {
  require(dt > 0.0, "timestep must be positive");
  require(steps() >= 2, "schedule needs at least 2 steps");
  require(u.allFinite(), "controls must be finite");
  if (mode == WellMode::Rate) {
    require((u.array() >= 0.0).all(), "rate-mode controls must be non-negative");
  } else {
    require((u.array() > 0.0).all(), "BHP setpoints must be positive");
  }
}

void TrajectoryDataset::validate() const {
  require(dt > 0.0, "timestep must be positive");
  require(p.cols() == x.cols(), "actuator and field snapshot counts differ");
  require(p.cols() == u.cols() + 1, "need |p| = |x| = |u| + 1");
  require(p.rows() == u.rows(), "actuator and control dimensions differ");
  require(p.allFinite() && x.allFinite() && u.allFinite(), "trajectory contains non-finite values");
  if (variable == Variable::Saturation) {
    require((x.array() >= 0.0).all() && (x.array() <= 1.0).all(),
            "saturation snapshots must lie in [0, 1]");
  }
}

TrajectoryDataset TrajectoryDataset::slice(int first, int count) const {
  require(first >= 0 && count >= 1 && first + count <= transitions(),
          "trajectory slice out of range");
  TrajectoryDataset out;
  out.p = p.middleCols(first, count + 1);
  out.x = x.middleCols(first, count + 1);
  out.u = u.middleCols(first, count);
  out.variable = variable;
  out.dt = dt;
  return out;
}

ReservoirModel build_model(int nx, const ModelOverrides& o) {
  ReservoirModel m;
  m.grid.nx = nx;
  m.grid.lx = o.lx_m.value_or(2000.0);
  m.grid.ly = o.ly_m.value_or(2000.0);
  m.grid.h = o.h_m.value_or(20.0);
  m.grid.validate();

  m.props.permeability = units::m2_from_md(o.perm_md.value_or(100.0));
  m.props.porosity = o.porosity.value_or(0.25);
  m.props.mu_w = units::pas_from_cp(o.mu_w_cp.value_or(1.0));
  m.props.mu_o = units::pas_from_cp(o.mu_o_cp.value_or(5.0));
  m.props.c_t = units::per_pa_from_per_bar(o.c_t_per_bar.value_or(1.0e-4));

  const int n = m.grid.cell_count();
  m.p_init = Eigen::VectorXd::Constant(n, units::pa_from_bar(o.p_init_bar.value_or(200.0)));
  m.sw_init = Eigen::VectorXd::Constant(n, o.sw_init.value_or(0.0));

  m.validate();
  return m;
}

SnapshotMatrices snapshot_matrices(const TrajectoryDataset& traj) {
  traj.validate();
  const int k = traj.transitions();
  require(k >= 1, "need at least one transition");

  const auto m = traj.p.rows();
  const auto nc = traj.x.rows();
  SnapshotMatrices s;
  s.Z.resize(m + nc, k);
  s.Zp.resize(m + nc, k);
  s.U = traj.u;
  s.Z.topRows(m) = traj.p.leftCols(k);
  s.Z.bottomRows(nc) = traj.x.leftCols(k);
  s.Zp.topRows(m) = traj.p.rightCols(k);
  s.Zp.bottomRows(nc) = traj.x.rightCols(k);
  return s;
}

}  // namespace koopflow
