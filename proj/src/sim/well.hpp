#pragma once

#include "core/types.hpp"

namespace koopflow {

/// Peaceman well index WI = 2 pi k h / ln(r_eq / r_w) with the isotropic
/// square-grid equivalent radius r_eq = 0.14 sqrt(dx^2 + dy^2). Units: m^3.
/// Phase rate follows q_alpha = WI * (k_ralpha / mu_alpha) * (p_bhp - p_cell).
double peaceman_well_index(const ReservoirModel& model, const WellSpec& well);

/// Equivalent (pressure-matching) radius of the well block [m].
double peaceman_equivalent_radius(const Grid& grid);

}  // namespace koopflow
