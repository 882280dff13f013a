#pragma once

#include <Eigen/Dense>
#include <optional>

#include <json.hpp>

#include "core/types.hpp"
#include "surrogate/rollout.hpp"

namespace koopflow {

enum class Window { Train, Test };

const char* to_string(Window window);

/// Mean absolute entrywise error; shapes must match and be non-empty.
double mean_abs_error(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref);

/// 100 * ||pred - ref||_F / ||ref||_F over the stacked window. A zero
/// reference norm yields nullopt, never a silent division.
std::optional<double> fpce(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref);

/// Skill of one prediction window against the simulator reference. Datasets
/// already carry reporting units (bar / dimensionless fields, days), so every
/// entry is reported as-is. Metrics exclude the shared initial state.
struct EvalReport {
  SurrogateKind kind = SurrogateKind::Dmdc;
  Variable variable = Variable::Pressure;
  Window window = Window::Test;

  std::optional<double> mae;               // field, bar / dimensionless
  std::optional<double> fpce_pct;          // field window
  std::optional<double> control_fpce_pct;  // actuator window
  bool diverged = false;
  std::optional<int> divergence_step;  // 1-based step within the window

  double field_min = 0.0;  // over every stored predicted snapshot, display units
  double field_max = 0.0;

  std::optional<GainDiagnostics> gain;

  // Plot series over the stored prediction (shared initial state included).
  Eigen::VectorXd t_days;
  Eigen::VectorXd mean_field;  // spatial mean per step, bar / dimensionless
  Eigen::VectorXd actuator;    // m^3 (rate mode) / bar (BHP mode)
};

/// Scores a prediction against the matching reference window (column 0 the
/// shared initial state). A truncated prediction is scored on its finite
/// prefix and flagged; a prediction with no surviving step carries no error
/// values at all.
EvalReport build_report(const Rollout& pred, const TrajectoryDataset& ref, Window window,
                        double t0_days);

nlohmann::json to_json(const GainDiagnostics& gain);
nlohmann::json to_json(const FitReport& report);
nlohmann::json to_json(const EvalReport& report);

}  // namespace koopflow
