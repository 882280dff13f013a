#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "core/error.hpp"
#include "core/units.hpp"

namespace koopflow {

enum class WellMode { Rate, Bhp };
enum class Variable { Pressure, Saturation };

const char* to_string(WellMode mode);
const char* to_string(Variable variable);

/// Square 2D areal grid. Cells are indexed row-major: cell (row r, col c)
/// has flat index r*nx + c, with row 0 at y=0 and col 0 at x=0. nx must be
/// odd so a single well can sit on the exact center cell.
struct Grid {
  int nx = 0;        // cells per side (odd)
  double lx = 0.0;   // x extent [m]
  double ly = 0.0;   // y extent [m]
  double h = 0.0;    // thickness [m]

  int cell_count() const { return nx * nx; }
  int center_cell() const { return (nx * nx - 1) / 2; }
  double dx() const { return lx / nx; }
  double dy() const { return ly / nx; }
  double cell_area() const { return dx() * dy(); }
  double cell_volume() const { return dx() * dy() * h; }
  int index(int row, int col) const { return row * nx + col; }

  void validate() const;
};

/// Uniform rock/fluid properties. Relative permeabilities are the linear
/// curves k_rw(S) = S, k_ro(S) = 1 - S.
struct FluidRock {
  double permeability = 0.0;  // [m^2]
  double porosity = 0.0;      // [-]
  double mu_w = 0.0;          // water viscosity [Pa*s]
  double mu_o = 0.0;          // oil viscosity [Pa*s]
  double c_t = 0.0;           // total compressibility [1/Pa]

  static double krw(double sw) { return sw; }
  static double kro(double sw) { return 1.0 - sw; }

  /// Total mobility k_rw/mu_w + k_ro/mu_o at water saturation sw [1/(Pa*s)].
  double total_mobility(double sw) const { return krw(sw) / mu_w + kro(sw) / mu_o; }
  double water_mobility(double sw) const { return krw(sw) / mu_w; }
  double oil_mobility(double sw) const { return kro(sw) / mu_o; }

  /// Water fractional flow lambda_w / lambda_t.
  double frac_flow(double sw) const { return water_mobility(sw) / total_mobility(sw); }

  void validate() const;
};

struct ReservoirModel {
  Grid grid;
  FluidRock props;
  Eigen::VectorXd p_init;   // [Pa], one value per cell
  Eigen::VectorXd sw_init;  // [-], one value per cell

  void validate() const;
};

struct WellSpec {
  int cell = 0;
  WellMode mode = WellMode::Rate;
  double r_w = 0.1;     // wellbore radius [m]
  double lambda = 1.0;  // BHP-mode first-order gain, (0, 1]

  void validate(const Grid& grid) const;
};

/// Per-step control values for one well. Rate mode: water injection rate
/// [m^3/s]; BHP mode: bottomhole pressure setpoint [Pa].
struct ControlSchedule {
  WellMode mode = WellMode::Rate;
  double dt = 0.0;     // [s]
  Eigen::VectorXd u;   // K values

  int steps() const { return static_cast<int>(u.size()); }
  void validate() const;
};

/// Time-stamped actuator states and field snapshots from one run, in
/// reporting units (days; bar / dimensionless fields; m^3 or bar actuator).
/// p and x hold K+1 columns (states at k = 0..K); u holds the K controls.
struct TrajectoryDataset {
  Eigen::MatrixXd p;  // m x (K+1) actuator states
  Eigen::MatrixXd x;  // N_c x (K+1) field snapshots
  Eigen::MatrixXd u;  // m x K control inputs
  Variable variable = Variable::Pressure;
  double dt = 0.0;    // snapshot spacing [days]

  int transitions() const { return static_cast<int>(u.cols()); }
  void validate() const;

  /// Contiguous slice keeping snapshots [first, first+count] and the
  /// count transitions between them.
  TrajectoryDataset slice(int first, int count) const;
};

/// Columns of the regression data matrices: column k of Z is [p_k; x_k],
/// of Zp is [p_{k+1}; x_{k+1}], of U is u_k.
struct SnapshotMatrices {
  Eigen::MatrixXd Z;   // (m+N_c) x K
  Eigen::MatrixXd Zp;  // (m+N_c) x K
  Eigen::MatrixXd U;   // m x K
};

/// Optional overrides for build_model, in I/O units.
struct ModelOverrides {
  std::optional<double> lx_m;
  std::optional<double> ly_m;
  std::optional<double> h_m;
  std::optional<double> perm_md;
  std::optional<double> porosity;
  std::optional<double> mu_w_cp;
  std::optional<double> mu_o_cp;
  std::optional<double> c_t_per_bar;
  std::optional<double> p_init_bar;
  std::optional<double> sw_init;
};

/// Builds the default desk-scale model: 2000 x 2000 x 20 m, 100 mD, 0.25
/// porosity, uniform 200 bar initial pressure, sw_init = 0.
ReservoirModel build_model(int nx, const ModelOverrides& overrides = {});

SnapshotMatrices snapshot_matrices(const TrajectoryDataset& traj);

}  // namespace koopflow
