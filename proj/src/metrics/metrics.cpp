#include "metrics/metrics.hpp"

#include <cmath>

#include "core/error.hpp"

namespace koopflow {
namespace {

nlohmann::json json_of(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

nlohmann::json json_of(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

const char* to_string(Window window) {
  return window == Window::Train ? "train" : "test";
}

double mean_abs_error(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref) {
  require(pred.rows() == ref.rows() && pred.cols() == ref.cols(),
          "mean_abs_error shape mismatch", ErrorCode::InvalidArgument);
  require(pred.size() > 0, "mean_abs_error over an empty window", ErrorCode::InvalidArgument);
  return (pred - ref).array().abs().mean();
}

std::optional<double> fpce(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& ref) {
  require(pred.rows() == ref.rows() && pred.cols() == ref.cols(), "fpce shape mismatch",
          ErrorCode::InvalidArgument);
  require(pred.size() > 0, "fpce over an empty window", ErrorCode::InvalidArgument);
  const double denom = ref.norm();
  if (denom == 0.0) return std::nullopt;
  const double pct = 100.0 * (pred - ref).norm() / denom;
  // A finite-but-huge prediction can overflow the residual norm; there is no
  // meaningful percentage to report then, and emitted files stay numeric.
  if (!std::isfinite(pct)) return std::nullopt;
  return pct;
}

EvalReport build_report(const Rollout& pred, const TrajectoryDataset& ref, Window window,
                        double t0_days) {
  ref.validate();
  require(ref.p.rows() == 1, "report schema holds a single actuator channel",
          ErrorCode::InvalidArgument);
  require(pred.x_pred.rows() == ref.x.rows() && pred.p_pred.rows() == ref.p.rows(),
          "prediction/reference dimension mismatch", ErrorCode::InvalidArgument);
  require(pred.p_pred.cols() >= 1 && pred.p_pred.cols() <= ref.p.cols() &&
              pred.x_pred.cols() == pred.p_pred.cols(),
          "prediction window does not fit the reference window", ErrorCode::InvalidArgument);
  require(pred.variable == ref.variable, "prediction/reference variable mismatch",
          ErrorCode::InvalidArgument);

  EvalReport r;
  r.kind = pred.kind;
  r.variable = pred.variable;
  r.window = window;
  r.diverged = pred.diverged_at.has_value();
  r.divergence_step = pred.diverged_at;

  const int cmp = static_cast<int>(pred.x_pred.cols()) - 1;  // steps past the shared state
  if (cmp > 0) {
    const Eigen::MatrixXd xp = pred.x_pred.rightCols(cmp);
    const Eigen::MatrixXd xr = ref.x.middleCols(1, cmp);
    const double mae = mean_abs_error(xp, xr);
    if (std::isfinite(mae)) r.mae = mae;
    r.fpce_pct = fpce(xp, xr);
    r.control_fpce_pct = fpce(pred.p_pred.rightCols(cmp), ref.p.middleCols(1, cmp));
  }
  r.field_min = pred.x_pred.minCoeff();
  r.field_max = pred.x_pred.maxCoeff();

  const int stored = static_cast<int>(pred.x_pred.cols());
  r.t_days.resize(stored);
  r.mean_field.resize(stored);
  r.actuator.resize(stored);
  for (int j = 0; j < stored; ++j) {
    r.t_days[j] = t0_days + ref.dt * j;
    r.mean_field[j] = pred.x_pred.col(j).mean();
    r.actuator[j] = pred.p_pred(0, j);
  }
  return r;
}

nlohmann::json to_json(const GainDiagnostics& gain) {
  return {{"norm_bottom_b", gain.norm_bottom_b},
          {"norm_coherent_path", gain.norm_coherent_path},
          {"norm_cckm_path", gain.norm_cckm_path},
          {"norm_g", gain.norm_g}};
}

nlohmann::json to_json(const FitReport& report) {
  return {{"train_mae", report.train_mae},
          {"train_fpce_pct", report.train_fpce},
          {"rank", report.rank},
          {"sigma_max", report.sigma_max},
          {"sigma_min_kept", report.sigma_min_kept}};
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j{{"model", to_string(report.kind)},
                   {"variable", to_string(report.variable)},
                   {"window", to_string(report.window)},
                   {"mae", json_of(report.mae)},
                   {"fpce_pct", json_of(report.fpce_pct)},
                   {"control_fpce_pct", json_of(report.control_fpce_pct)},
                   {"diverged", report.diverged},
                   {"divergence_step",
                    report.divergence_step ? nlohmann::json(*report.divergence_step)
                                           : nlohmann::json(nullptr)},
                   {"field_min", report.field_min},
                   {"field_max", report.field_max},
                   {"gain", report.gain ? to_json(*report.gain) : nlohmann::json(nullptr)}};
  j["series"] = {{"t_days", json_of(report.t_days)},
                 {"mean_field", json_of(report.mean_field)},
                 {"actuator", json_of(report.actuator)}};
  return j;
}

}  // namespace koopflow
