#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/units.hpp"
#include "sim/impes.hpp"
#include "sim/well.hpp"

using namespace koopflow;

namespace {

WellSpec center_well(const ReservoirModel& m, WellMode mode) {
  WellSpec w;
  w.cell = m.grid.center_cell();
  w.mode = mode;
  return w;
}

}  // namespace

TEST_CASE("peaceman index matches the hand-derived value") {
  // nx = 21 over 2000 m: dx = 95.2381 m, r_eq = 0.14*sqrt(2)*dx = 18.8562 m,
  // WI = 2*pi*k*h / ln(r_eq/0.1) with k = 100 mD, h = 20 m.
  ReservoirModel m = build_model(21);
  WellSpec w = center_well(m, WellMode::Rate);
  const double wi = peaceman_well_index(m, w);
  CHECK(wi == doctest::Approx(2.367061642598986e-12).epsilon(1e-12));

  const double dx = 2000.0 / 21;
  const double req = 0.14 * std::sqrt(2.0 * dx * dx);
  CHECK(peaceman_equivalent_radius(m.grid) == doctest::Approx(req));
  const double wi_ref = 2.0 * std::numbers::pi * units::m2_from_md(100.0) * 20.0 /
                        std::log(req / w.r_w);
  CHECK(wi == doctest::Approx(wi_ref).epsilon(1e-14));
}

TEST_CASE("well index scales linearly with permeability and thickness") {
  ModelOverrides o;
  o.perm_md = 200.0;
  ReservoirModel m2 = build_model(21, o);
  ReservoirModel m1 = build_model(21);
  WellSpec w = center_well(m1, WellMode::Rate);
  CHECK(peaceman_well_index(m2, w) ==
        doctest::Approx(2.0 * peaceman_well_index(m1, w)));
}

TEST_CASE("zero rate leaves a uniform state untouched") {
  ReservoirModel m = build_model(11);
  WellSpec w = center_well(m, WellMode::Rate);
  SimState s0 = initial_state(m, w);
  SimState s1 = step_impes(s0, m, w, 0.0, units::s_from_day(1.0));
  CHECK((s1.p - s0.p).cwiseAbs().maxCoeff() / s0.p.norm() < 1e-12);
  CHECK((s1.sw - s0.sw).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s1.t == doctest::Approx(86400.0));
  CHECK(s1.cum_injected == doctest::Approx(0.0));
}

TEST_CASE("commanded bhp equal to reservoir pressure drives no flow") {
  ModelOverrides o;
  o.sw_init = 0.5;
  ReservoirModel m = build_model(11, o);
  WellSpec w = center_well(m, WellMode::Bhp);
  SimState s0 = initial_state(m, w);
  StepReport rep;
  SimState s1 = step_impes(s0, m, w, units::pa_from_bar(200.0), units::s_from_day(1.0), &rep);
  CHECK(std::abs(rep.q_total) < 1e-12);
  CHECK((s1.p - s0.p).cwiseAbs().maxCoeff() / 2.0e7 < 1e-12);
}

TEST_CASE("compressible storage absorbs exactly the injected volume") {
  ReservoirModel m = build_model(15);
  WellSpec w = center_well(m, WellMode::Rate);
  SimState s = initial_state(m, w);
  const double dt = units::s_from_day(1.0);
  const double q = units::m3s_from_m3day(50.0);
  const double vp = m.grid.cell_volume() * m.props.porosity;

  double injected = 0.0;
  for (int k = 0; k < 20; ++k) {
    StepReport rep;
    s = step_impes(s, m, w, q, dt, &rep);
    injected += rep.q_total * dt;
    CHECK(rep.balance_error < 1e-8);
  }
  const double stored = vp * m.props.c_t * (s.p.array() - m.p_init.array()).sum();
  CHECK(stored == doctest::Approx(injected).epsilon(1e-8));
  CHECK(s.cum_injected == doctest::Approx(q * dt * 20).epsilon(1e-12));

  // no-flow boundaries: nothing else can absorb volume, and the average
  // pressure rise follows directly
  const double mean_rise = (s.p.array() - 2.0e7).mean();
  CHECK(mean_rise == doctest::Approx(injected / (vp * m.grid.cell_count() * m.props.c_t))
                         .epsilon(1e-8));
}

TEST_CASE("injection respects the four-fold symmetry of the centered well") {
  ReservoirModel m = build_model(11);
  WellSpec w = center_well(m, WellMode::Rate);
  SimState s = initial_state(m, w);
  for (int k = 0; k < 10; ++k)
    s = step_impes(s, m, w, units::m3s_from_m3day(400.0), units::s_from_day(1.0));

  const int nx = m.grid.nx;
  for (int r = 0; r < nx; ++r) {
    for (int c = 0; c < nx; ++c) {
      const double ref_p = s.p[m.grid.index(r, c)];
      const double ref_s = s.sw[m.grid.index(r, c)];
      // mirror rows, mirror cols, transpose
      CHECK(s.p[m.grid.index(nx - 1 - r, c)] == doctest::Approx(ref_p).epsilon(1e-10));
      CHECK(s.p[m.grid.index(r, nx - 1 - c)] == doctest::Approx(ref_p).epsilon(1e-10));
      CHECK(s.p[m.grid.index(c, r)] == doctest::Approx(ref_p).epsilon(1e-10));
      CHECK(s.sw[m.grid.index(nx - 1 - r, c)] == doctest::Approx(ref_s).epsilon(1e-8));
      CHECK(s.sw[m.grid.index(c, r)] == doctest::Approx(ref_s).epsilon(1e-8));
    }
  }
}

TEST_CASE("water front stays bounded and advances from the well") {
  ReservoirModel m = build_model(11);
  WellSpec w = center_well(m, WellMode::Rate);
  SimState s = initial_state(m, w);
  StepReport rep;
  for (int k = 0; k < 30; ++k) {
    s = step_impes(s, m, w, units::m3s_from_m3day(2000.0), units::s_from_day(1.0), &rep);
    CHECK(s.sw.minCoeff() >= 0.0);
    CHECK(s.sw.maxCoeff() <= 1.0);
  }
  // 60e3 m^3 injected into ~165e3 m^3 cell pore volumes: front is underway
  CHECK(s.sw[w.cell] > 0.15);
  CHECK(s.sw[0] == doctest::Approx(0.0));  // far corner untouched
  CHECK(s.sw[w.cell + 1] > s.sw[w.cell + 5]);  // monotone outward
}

TEST_CASE("strong injection triggers transport sub-stepping") {
  ReservoirModel m = build_model(11);
  WellSpec w = center_well(m, WellMode::Rate);
  SimState s = initial_state(m, w);
  StepReport rep;
  s = step_impes(s, m, w, units::m3s_from_m3day(50000.0), units::s_from_day(1.0), &rep);
  CHECK(rep.substeps > 1);
  CHECK(s.sw.maxCoeff() <= 1.0);
}

TEST_CASE("rate-mode diagnostic bhp sits above the well-cell pressure") {
  ReservoirModel m = build_model(11);
  WellSpec w = center_well(m, WellMode::Rate);
  SimState s = initial_state(m, w);
  s = step_impes(s, m, w, units::m3s_from_m3day(50.0), units::s_from_day(1.0));
  CHECK(s.well_bhp > s.p[w.cell]);
}

TEST_CASE("bhp drawdown produces fluid and lowers pressure") {
  ModelOverrides o;
  o.sw_init = 0.5;
  ReservoirModel m = build_model(11, o);
  WellSpec w = center_well(m, WellMode::Bhp);
  SimState s = initial_state(m, w);
  StepReport rep;
  const double target = units::pa_from_bar(110.0);
  for (int k = 0; k < 10; ++k) {
    s = step_impes(s, m, w, target, units::s_from_day(1.0), &rep);
    CHECK(rep.q_total < 0.0);
    CHECK(rep.balance_error < 1e-8);
  }
  CHECK(s.cum_injected < 0.0);
  CHECK(s.p[w.cell] < 2.0e7);
  CHECK(s.p[w.cell] > target);  // finite well index keeps the cell above the sandface
  CHECK(s.well_bhp == target);  // unit-gain actuator passes the command through
}

TEST_CASE("simulate stitches trajectories and the actuator channel") {
  ReservoirModel m = build_model(9);
  WellSpec w = center_well(m, WellMode::Rate);
  ControlSchedule sched;
  sched.mode = WellMode::Rate;
  sched.dt = units::s_from_day(1.0);
  sched.u = Eigen::VectorXd::Constant(5, units::m3s_from_m3day(50.0));

  SimTrajectories tr = simulate(m, w, sched);
  CHECK(tr.pressure.x.rows() == 81);
  CHECK(tr.pressure.x.cols() == 6);
  CHECK(tr.saturation.x.cols() == 6);
  CHECK(tr.pressure.transitions() == 5);
  CHECK(tr.pressure.variable == Variable::Pressure);
  CHECK(tr.saturation.variable == Variable::Saturation);

  // rate-mode actuator state: cumulative injected volume from zero
  CHECK(tr.pressure.p(0, 0) == 0.0);
  const double vol = 5 * 50.0;  // m^3 after 5 days at 50 m^3/day
  CHECK(tr.pressure.p(0, 5) == doctest::Approx(vol));
  // the two variables share one actuator series
  CHECK((tr.pressure.p - tr.saturation.p).cwiseAbs().maxCoeff() == 0.0);
  // physical consistency with the simulator's own bookkeeping
  CHECK(tr.states.back().cum_injected == doctest::Approx(vol).epsilon(1e-12));
  // reporting units: controls in m^3/day, dt in days, snapshots in bar
  CHECK(tr.pressure.u(0, 0) == doctest::Approx(50.0));
  CHECK(tr.pressure.dt == doctest::Approx(1.0));
  CHECK(tr.pressure.x(w.cell, 0) == doctest::Approx(200.0));
  CHECK(tr.pressure.x(w.cell, 5) > 200.0);
  CHECK(tr.pressure.x(w.cell, 5) < 300.0);

  SUBCASE("bhp schedule records the sandface pressure in bar") {
    WellSpec wb = center_well(m, WellMode::Bhp);
    ControlSchedule sb;
    sb.mode = WellMode::Bhp;
    sb.dt = units::s_from_day(1.0);
    sb.u = Eigen::VectorXd::Constant(4, units::pa_from_bar(150.0));
    SimTrajectories tb = simulate(m, wb, sb);
    CHECK(tb.pressure.p(0, 0) == doctest::Approx(200.0));
    CHECK(tb.pressure.u(0, 0) == doctest::Approx(150.0));
    for (int k = 1; k <= 4; ++k)
      CHECK(tb.pressure.p(0, k) == doctest::Approx(150.0));
  }
}

TEST_CASE("schedule and well mode must agree") {
  ReservoirModel m = build_model(9);
  WellSpec w = center_well(m, WellMode::Rate);
  ControlSchedule sched;
  sched.mode = WellMode::Bhp;
  sched.dt = 86400.0;
  sched.u = Eigen::VectorXd::Constant(3, 1.5e7);
  CHECK_THROWS_AS(simulate(m, w, sched), Error);
}
