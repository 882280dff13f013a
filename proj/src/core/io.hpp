#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "core/types.hpp"

namespace koopflow::io {

/// Shortest round-trip decimal form of v (std::to_chars); "nan"/"inf" guarded
/// against upstream so emitted files stay strictly numeric.
std::string format_double(double v);

/// Header: t_days,p_actuator,cell_0,...,cell_{N-1}; one row per state k=0..K
/// with t = t0_days + k*dt. Controls are not part of the CSV; they travel in
/// the run metadata.
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryDataset& traj,
                          double t0_days = 0.0);

/// Rebuilds the dataset from a trajectory CSV plus the SI schedule it was
/// driven by (the CSV itself stores only states, in reporting units).
TrajectoryDataset read_trajectory_csv(const std::filesystem::path& path, Variable variable,
                                      const ControlSchedule& schedule);

/// Same schema as write_trajectory_csv, for model predictions: p and x hold
/// one column per stored state. Physical-range invariants are deliberately
/// not enforced — divergent or overshooting rollouts are recorded verbatim.
void write_prediction_csv(const std::filesystem::path& path, const Eigen::MatrixXd& p,
                          const Eigen::MatrixXd& x, double dt_days, double t0_days);

/// Two-column series: t_days,value. Non-finite values become empty cells.
void write_series_csv(const std::filesystem::path& path, const Eigen::VectorXd& t_days,
                      const Eigen::VectorXd& values);

}  // namespace koopflow::io
