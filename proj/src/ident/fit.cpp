#include "ident/fit.hpp"

#include <cmath>
#include <cstring>

#include "core/error.hpp"
#include "ident/lstsq.hpp"
#include "surrogate/rollout.hpp"

namespace koopflow {

namespace {

std::uint64_t fnv1a(const Eigen::MatrixXd& m, std::uint64_t h) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
  const std::size_t len = static_cast<std::size_t>(m.size()) * sizeof(double);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

void check_dims(const SnapshotMatrices& sm, const Kinematics& kin) {
  kin.validate();
  require(sm.Z.rows() == sm.Zp.rows() && sm.Z.cols() == sm.Zp.cols(),
          "Z and Zp must have identical shape");
  require(sm.U.cols() == sm.Z.cols(), "U must pair one control with each transition");
  require(sm.Z.cols() >= 1, "at least one transition is required");
  require(sm.U.rows() == kin.m, "control row count must match the kinematics");
  require(sm.Z.rows() > kin.m, "augmented state must contain field rows");
}

}  // namespace

const char* to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::Dmdc: return "dmdc";
    case SurrogateKind::CckmLevel: return "cckm-level";
    case SurrogateKind::CckmDelta: return "cckm-delta";
    case SurrogateKind::HybridB: return "hybrid-b";
  }
  return "unknown";
}

void FieldScaling::validate() const {
  require(std::isfinite(mean) && std::isfinite(stddev), "scaling must be finite");
  require(stddev > 0.0, "scaling stddev must be positive");
}

FieldScaling scaling_from_snapshots(const Eigen::MatrixXd& x_snapshots, bool center) {
  require(x_snapshots.size() > 0, "cannot compute scaling from empty snapshots");
  require(x_snapshots.allFinite(), "snapshots must be finite");
  FieldScaling sc;
  const double mean = x_snapshots.mean();
  const double var = (x_snapshots.array() - mean).square().mean();
  sc.mean = center ? mean : 0.0;
  // The spread is the centered one either way, so level and delta fits on
  // the same snapshots agree on stddev and hybrids can swap blocks.
  sc.stddev = var > 0.0 ? std::sqrt(var) : 1.0;
  return sc;
}

void SurrogateModel::validate() const {
  kin.validate();
  scaling.validate();
  const int mm = m();
  const int n = cells();
  require(mm == kin.m, "actuator block size must match the kinematics");
  require(n > 0, "model must have field cells");
  require(A_pp.rows() == mm && A_pp.cols() == mm, "A_pp must be m x m");
  require(A_px.rows() == mm && A_px.cols() == n, "A_px must be m x N_c");
  require(A_xp.rows() == n && A_xp.cols() == mm, "A_xp must be N_c x m");
  require(A_xx.rows() == n && A_xx.cols() == n, "A_xx must be N_c x N_c");
  require(B_p.rows() == mm && B_p.cols() == mm, "B_p must be m x m");
  require(B_x.rows() == n && B_x.cols() == mm, "B_x must be N_c x m");
  require(b_x.size() == n, "b_x must have one entry per cell");

  const bool cckm = kind == SurrogateKind::CckmLevel || kind == SurrogateKind::CckmDelta;
  if (cckm || kind == SurrogateKind::HybridB) {
    const ActuatorMatrices am = actuator_matrices(kin);
    require(A_pp == am.A_pp && B_p == am.B_p,
            "coherent kinds must carry the exact actuator kinematics blocks");
    require(A_px.isZero(0.0), "coherent kinds must not couple field into the actuator row");
  }
  if (cckm) require(B_x.isZero(0.0), "CCKM field input block must be exactly zero");
  if (kind == SurrogateKind::Dmdc || kind == SurrogateKind::CckmLevel)
    require(b_x.isZero(0.0), "level forms carry no affine term");
  if (kind == SurrogateKind::HybridB)
    require(hybrid_base == SurrogateKind::CckmLevel || hybrid_base == SurrogateKind::CckmDelta,
            "hybrid base must be a CCKM form");
}

std::uint64_t snapshot_data_tag(const SnapshotMatrices& sm) {
  std::uint64_t h = 14695981039346656037ull;
  h = fnv1a(sm.Z, h);
  h = fnv1a(sm.Zp, h);
  h = fnv1a(sm.U, h);
  return h;
}

SurrogateModel fit_dmdc(const SnapshotMatrices& sm, const Kinematics& kin,
                        Variable variable, const FitOptions& opts) {
  check_dims(sm, kin);
  const int m = kin.m;
  const int n = static_cast<int>(sm.Z.rows()) - m;
  const int k = static_cast<int>(sm.Z.cols());

  const Eigen::MatrixXd p = sm.Z.topRows(m);
  const Eigen::MatrixXd pp = sm.Zp.topRows(m);
  Eigen::MatrixXd x_all(n, k + 1);
  x_all.leftCols(k) = sm.Z.bottomRows(n);
  x_all.col(k) = sm.Zp.bottomRows(n).col(k - 1);

  SurrogateModel model;
  model.kind = SurrogateKind::Dmdc;
  model.variable = variable;
  model.kin = kin;
  model.scaling = opts.scaling ? *opts.scaling : scaling_from_snapshots(x_all);
  model.scaling.validate();
  model.data_tag = snapshot_data_tag(sm);

  const Eigen::MatrixXd x = model.scaling.standardize(sm.Z.bottomRows(n));
  const Eigen::MatrixXd xp = model.scaling.standardize(sm.Zp.bottomRows(n));

  // Actuator and control rows enter in physical units: what the regression
  // does with heterogeneous channel magnitudes is exactly the behaviour
  // under study, so the fit must not recondition them away.
  Eigen::MatrixXd r(m + n + m, k);
  r.topRows(m) = p;
  r.middleRows(m, n) = x;
  r.bottomRows(m) = sm.U;
  Eigen::MatrixXd t(m + n, k);
  t.topRows(m) = pp;
  t.bottomRows(n) = xp;

  const LstsqResult res = solve_least_squares(t, r, opts.rel_tol);

  model.A_pp = res.G.block(0, 0, m, m);
  model.A_px = res.G.block(0, m, m, n);
  model.B_p = res.G.block(0, m + n, m, m);
  model.A_xp = res.G.block(m, 0, n, m);
  model.A_xx = res.G.block(m, m, n, n);
  model.B_x = res.G.block(m, m + n, n, m);
  model.b_x = Eigen::VectorXd::Zero(n);
  model.fit_rank = res.rank;
  model.sigma_max = res.sigma_max;
  model.sigma_min_kept = res.sigma_min_kept;
  model.validate();
  return model;
}

namespace {

SurrogateModel cckm_base(const SnapshotMatrices& sm, const Kinematics& kin,
                         Variable variable, const FitOptions& opts, bool center) {
  const int m = kin.m;
  const int n = static_cast<int>(sm.Z.rows()) - m;
  const int k = static_cast<int>(sm.Z.cols());

  SurrogateModel model;
  model.variable = variable;
  model.kin = kin;
  const ActuatorMatrices am = actuator_matrices(kin);
  model.A_pp = am.A_pp;
  model.B_p = am.B_p;
  model.A_px = Eigen::MatrixXd::Zero(m, n);
  model.B_x = Eigen::MatrixXd::Zero(n, m);
  model.b_x = Eigen::VectorXd::Zero(n);
  model.data_tag = snapshot_data_tag(sm);

  Eigen::MatrixXd x_all(n, k + 1);
  x_all.leftCols(k) = sm.Z.bottomRows(n);
  x_all.col(k) = sm.Zp.bottomRows(n).col(k - 1);
  model.scaling = opts.scaling ? *opts.scaling : scaling_from_snapshots(x_all, center);
  model.scaling.validate();
  return model;
}

}  // namespace

SurrogateModel fit_cckm_level(const SnapshotMatrices& sm, const Kinematics& kin,
                              Variable variable, const FitOptions& opts) {
  check_dims(sm, kin);
  const int m = kin.m;
  const int n = static_cast<int>(sm.Z.rows()) - m;
  const int k = static_cast<int>(sm.Z.cols());

  // Spread-only field scaling: the level form x' = A_xp p + A_xx x is
  // strictly linear, and centering would add an offset it cannot carry.
  SurrogateModel model = cckm_base(sm, kin, variable, opts, /*center=*/false);
  model.kind = SurrogateKind::CckmLevel;

  // Field levels regress on actuator levels p_k and field x_k only; control
  // u_k reaches the field strictly through the actuator row, one step later.
  // Actuator rows keep physical units: their magnitude is what makes the
  // minimum-norm solution route steady drive onto the actuator path.
  Eigen::MatrixXd r(m + n, k);
  r.topRows(m) = sm.Z.topRows(m);
  r.middleRows(m, n) = model.scaling.standardize(sm.Z.bottomRows(n));
  const Eigen::MatrixXd t = model.scaling.standardize(sm.Zp.bottomRows(n));

  const LstsqResult res = solve_least_squares(t, r, opts.rel_tol);
  model.A_xp = res.G.leftCols(m);
  model.A_xx = res.G.rightCols(n);
  model.fit_rank = res.rank;
  model.sigma_max = res.sigma_max;
  model.sigma_min_kept = res.sigma_min_kept;
  model.validate();
  return model;
}

SurrogateModel fit_cckm_delta(const SnapshotMatrices& sm, const Kinematics& kin,
                              Variable variable, const FitOptions& opts) {
  check_dims(sm, kin);
  const int m = kin.m;
  const int n = static_cast<int>(sm.Z.rows()) - m;
  const int k = static_cast<int>(sm.Z.cols());

  SurrogateModel model = cckm_base(sm, kin, variable, opts, /*center=*/true);
  model.kind = SurrogateKind::CckmDelta;

  // Actuator increments come from the kinematics law, never from data
  // differences, so the fitted coupling stays valid for unseen controls.
  Eigen::MatrixXd dp(m, k);
  for (int j = 0; j < k; ++j)
    dp.col(j) = actuator_increment(kin, sm.Z.topRows(m).col(j), sm.U.col(j));

  Eigen::MatrixXd r(m + n + 1, k);
  r.topRows(m) = dp;
  r.middleRows(m, n) = model.scaling.standardize(sm.Z.bottomRows(n));
  r.bottomRows(1) = Eigen::MatrixXd::Ones(1, k);
  const Eigen::MatrixXd t = model.scaling.standardize(sm.Zp.bottomRows(n)) -
                            model.scaling.standardize(sm.Z.bottomRows(n));

  const LstsqResult res = solve_least_squares(t, r, opts.rel_tol);
  model.A_xp = res.G.leftCols(m);
  model.A_xx = res.G.middleCols(m, n);
  model.b_x = res.G.rightCols(1);
  model.fit_rank = res.rank;
  model.sigma_max = res.sigma_max;
  model.sigma_min_kept = res.sigma_min_kept;
  model.validate();
  return model;
}

SurrogateModel fit_hybrid_b(const SurrogateModel& dmdc, const SurrogateModel& cckm) {
  dmdc.validate();
  cckm.validate();
  require(dmdc.kind == SurrogateKind::Dmdc, "first argument must be a DMDc model");
  require(cckm.kind == SurrogateKind::CckmLevel || cckm.kind == SurrogateKind::CckmDelta,
          "second argument must be a CCKM model");
  require(dmdc.variable == cckm.variable, "hybrid parts must model the same variable");
  require(dmdc.data_tag == cckm.data_tag,
          "hybrid parts must be fitted on identical training data");
  require(dmdc.kin == cckm.kin, "hybrid parts must share actuator kinematics");
  // B_x maps control to a standardized field increment; increments do not
  // see the mean, so only the spread has to agree across the two fits.
  require(dmdc.scaling.stddev == cckm.scaling.stddev,
          "hybrid parts must share the field spread");

  SurrogateModel model = cckm;
  model.kind = SurrogateKind::HybridB;
  model.hybrid_base = cckm.kind;
  model.B_x = dmdc.B_x;
  model.validate();
  return model;
}

FitReport training_report(const SurrogateModel& model, const SnapshotMatrices& sm) {
  model.validate();
  const int m = model.m();
  const int n = model.cells();
  require(sm.Z.rows() == m + n, "snapshot rows do not match the model");
  require(sm.U.cols() == sm.Z.cols(), "U must pair one control with each transition");
  const int k = static_cast<int>(sm.Z.cols());

  const Eigen::MatrixXd x = model.scaling.standardize(sm.Z.bottomRows(n));
  const Eigen::MatrixXd xp = model.scaling.standardize(sm.Zp.bottomRows(n));

  Eigen::MatrixXd pred(n, k);
  for (int j = 0; j < k; ++j) {
    const auto [p_next, x_next] =
        step_standardized(model, sm.Z.topRows(m).col(j), x.col(j), sm.U.col(j));
    pred.col(j) = x_next;
  }

  FitReport rep;
  const Eigen::MatrixXd diff = pred - xp;
  rep.train_mae = diff.cwiseAbs().mean();
  const double denom = xp.norm();
  rep.train_fpce = denom > 0.0 ? 100.0 * diff.norm() / denom : 0.0;
  rep.rank = model.fit_rank;
  rep.sigma_max = model.sigma_max;
  rep.sigma_min_kept = model.sigma_min_kept;
  return rep;
}

}  // namespace koopflow
