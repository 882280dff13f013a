#include "sim/well.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace koopflow {

double peaceman_equivalent_radius(const Grid& grid) {
  const double dx = grid.dx();
  const double dy = grid.dy();
  return 0.14 * std::sqrt(dx * dx + dy * dy);
}

double peaceman_well_index(const ReservoirModel& model, const WellSpec& well) {
  well.validate(model.grid);
  const double r_eq = peaceman_equivalent_radius(model.grid);
  require(r_eq > well.r_w,
          "well radius exceeds the equivalent block radius; refine r_w or coarsen the grid");
  const double k = model.props.permeability;
  const double h = model.grid.h;
  return 2.0 * std::numbers::pi * k * h / std::log(r_eq / well.r_w);
}

}  // namespace koopflow
