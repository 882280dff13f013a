#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/types.hpp"
#include "ident/fit.hpp"

namespace koopflow {

enum class CaseName { CaseA, CaseB };

const char* to_string(CaseName name);
CaseName case_from_string(const std::string& s);

SurrogateKind kind_from_string(const std::string& s);

/// Everything one experiment run needs, in I/O units. The JSON config file
/// mirrors these fields one for one; absent keys keep the defaults below.
struct RunConfig {
  CaseName case_name = CaseName::CaseA;
  int nx = 21;
  double dt_days = 1.0;
  int train_steps = 60;
  int shutin_steps = 30;    // case a only
  int highrate_steps = 30;  // case a only
  int test_steps = 60;      // case b only
  double q_train = 50.0;    // m^3/day, case a only
  double rel_tol = 1e-10;
  std::filesystem::path out_dir = "out";
  std::vector<SurrogateKind> kinds = {SurrogateKind::Dmdc, SurrogateKind::CckmLevel,
                                      SurrogateKind::CckmDelta, SurrogateKind::HybridB};

  void validate() const;
  bool wants(SurrogateKind kind) const;
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

/// FNV-1a over the canonical JSON dump; stamps outputs so artifacts from
/// different configurations cannot be silently mixed.
std::uint64_t config_hash(const RunConfig& cfg);

/// A fully materialized experiment: reservoir, well, the two control
/// schedules (SI), and which CCKM formulation serves each variable (the
/// hybrid builds on the same base).
struct ScenarioSpec {
  CaseName name = CaseName::CaseA;
  ReservoirModel model;
  WellSpec well;
  ControlSchedule train_schedule;
  ControlSchedule test_schedule;
  std::map<Variable, SurrogateKind> formulations;

  /// Train and test concatenated, for one continuous simulation.
  ControlSchedule full_schedule() const;
  void validate() const;
};

/// Rate-mode injector: constant q_train for train_steps, then shut-in at
/// zero for shutin_steps, then 100 x q_train for highrate_steps. Fields
/// start single-phase (sw = 0); increments drive both variables, so the
/// delta formulation serves pressure and saturation.
ScenarioSpec make_case_a(const RunConfig& cfg);

/// BHP-mode producer (lambda = 1): 200 bar initial pressure, train at a
/// 110 bar setpoint, test at 20 bar; sw starts at 0.5. Pressure follows the
/// held BHP level, so the level formulation serves pressure; saturation
/// keeps the delta formulation.
ScenarioSpec make_case_b(const RunConfig& cfg);

/// Dispatch on cfg.case_name.
ScenarioSpec make_case(const RunConfig& cfg);

}  // namespace koopflow
