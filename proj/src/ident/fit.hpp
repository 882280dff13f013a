#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "actuator/kinematics.hpp"
#include "core/types.hpp"

namespace koopflow {

enum class SurrogateKind { Dmdc, CckmLevel, CckmDelta, HybridB };

const char* to_string(SurrogateKind kind);

/// Scalar standardization of one field variable: x_hat = (x - mean) / stddev.
/// Scalar (not per-cell) so the block structure keeps its physical reading.
struct FieldScaling {
  double mean = 0.0;
  double stddev = 1.0;

  Eigen::MatrixXd standardize(const Eigen::MatrixXd& x) const {
    return (x.array() - mean) / stddev;
  }
  Eigen::MatrixXd unstandardize(const Eigen::MatrixXd& x) const {
    return x.array() * stddev + mean;
  }
  void validate() const;
};

/// Population mean/std over every entry of the training snapshot set
/// (all K+1 states). A constant field keeps stddev = 1. With center = false
/// the mean is kept at zero (spread-only normalization): a strictly linear
/// level form cannot carry the affine offset that centering injects, so
/// level fits must use the uncentered variant.
FieldScaling scaling_from_snapshots(const Eigen::MatrixXd& x_snapshots,
                                    bool center = true);

struct FitOptions {
  double rel_tol = 1e-10;
  /// Override the scaling computed from data (oracle tests use identity).
  std::optional<FieldScaling> scaling;
};

/// Linear one-step surrogate. Field blocks live in standardized field space;
/// actuator and control stay in physical units. Level kinds (Dmdc, CckmLevel,
/// level-based HybridB) read A_xp/A_xx as level blocks; delta kinds
/// (CckmDelta, delta-based HybridB) store the increment-form blocks in the
/// same fields.
struct SurrogateModel {
  SurrogateKind kind = SurrogateKind::Dmdc;
  Variable variable = Variable::Pressure;
  Kinematics kin;
  FieldScaling scaling;

  Eigen::MatrixXd A_pp;  // m x m
  Eigen::MatrixXd A_px;  // m x N_c (free DMDc actuator row; zero for CCKM)
  Eigen::MatrixXd A_xp;  // N_c x m
  Eigen::MatrixXd A_xx;  // N_c x N_c
  Eigen::MatrixXd B_p;   // m x m
  Eigen::MatrixXd B_x;   // N_c x m
  Eigen::VectorXd b_x;   // N_c

  /// HybridB only: which CCKM form donated the A blocks.
  SurrogateKind hybrid_base = SurrogateKind::CckmDelta;

  /// FNV-1a hash of the training (Z, Zp, U) bytes; guards model pairings.
  std::uint64_t data_tag = 0;

  // fit diagnostics
  int fit_rank = 0;
  double sigma_max = 0.0;
  double sigma_min_kept = 0.0;

  int m() const { return static_cast<int>(A_pp.rows()); }
  int cells() const { return static_cast<int>(A_xx.rows()); }
  bool is_delta_form() const {
    return kind == SurrogateKind::CckmDelta ||
           (kind == SurrogateKind::HybridB && hybrid_base == SurrogateKind::CckmDelta);
  }
  void validate() const;
};

struct FitReport {
  double train_mae = 0.0;   ///< teacher-forced one-step field MAE, standardized units
  double train_fpce = 0.0;  ///< teacher-forced field FPCE [%], standardized units
  int rank = 0;
  double sigma_max = 0.0;
  double sigma_min_kept = 0.0;
};

std::uint64_t snapshot_data_tag(const SnapshotMatrices& sm);

/// Joint free regression of all blocks (including the actuator row) on the
/// augmented state. Field rows are z-scored (the standard preprocessing for
/// this baseline); actuator and control rows stay in physical units.
SurrogateModel fit_dmdc(const SnapshotMatrices& sm, const Kinematics& kin,
                        Variable variable, const FitOptions& opts = {});

/// Hard-coded actuator kinematics; level-form field blocks regressed on
/// [P; X]; the field input block is zero by construction. Field rows use
/// spread-only scaling: the level form is strictly linear, so centering
/// would inject an affine response it cannot represent.
SurrogateModel fit_cckm_level(const SnapshotMatrices& sm, const Kinematics& kin,
                              Variable variable, const FitOptions& opts = {});

/// Hard-coded actuator kinematics; increment-form field blocks regressed on
/// [dP; X; 1] with dP from the actuator kinematics, never from data
/// differences. Field rows are z-scored; b_x absorbs the offset.
SurrogateModel fit_cckm_delta(const SnapshotMatrices& sm, const Kinematics& kin,
                              Variable variable, const FitOptions& opts = {});

/// CCKM state blocks with the field input path replaced by DMDc's bottom
/// block. Both inputs must come from the same training data and variable
/// and share the field spread; the means may differ (B_x maps control to a
/// field increment, which is invariant to the affine offset).
SurrogateModel fit_hybrid_b(const SurrogateModel& dmdc, const SurrogateModel& cckm);

/// Teacher-forced one-step reconstruction of the training transitions,
/// reported in standardized field units.
FitReport training_report(const SurrogateModel& model, const SnapshotMatrices& sm);

}  // namespace koopflow
