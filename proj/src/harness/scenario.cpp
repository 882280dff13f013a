#include "harness/scenario.hpp"

#include <algorithm>

#include "core/error.hpp"
#include "core/units.hpp"

namespace koopflow {

namespace {

// Fluid pairing for both study cases. A heavy oil contrast makes total
// mobility swing strongly with saturation, which no linear-in-state model
// can track; this near-unity ratio keeps two-phase transport in play while
// the pressure response stays close to the regime linear surrogates assume.
constexpr double kCaseOilViscosityCp = 1.2;

Eigen::VectorXd constant_block(int count, double value) {
  return Eigen::VectorXd::Constant(count, value);
}

}  // namespace

const char* to_string(CaseName name) {
  return name == CaseName::CaseA ? "a" : "b";
}

CaseName case_from_string(const std::string& s) {
  if (s == "a" || s == "A") return CaseName::CaseA;
  if (s == "b" || s == "B") return CaseName::CaseB;
  throw Error(ErrorCode::Config, "unknown case '" + s + "' (expected a or b)");
}

SurrogateKind kind_from_string(const std::string& s) {
  if (s == "dmdc") return SurrogateKind::Dmdc;
  if (s == "cckm-level") return SurrogateKind::CckmLevel;
  if (s == "cckm-delta") return SurrogateKind::CckmDelta;
  if (s == "hybrid-b") return SurrogateKind::HybridB;
  throw Error(ErrorCode::Config,
              "unknown model kind '" + s +
                  "' (expected dmdc, cckm-level, cckm-delta, hybrid-b, or all)");
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::Config, msg);
  };
  check(nx >= 3 && nx % 2 == 1, "nx must be odd and at least 3");
  check(dt_days > 0.0, "dt_days must be positive");
  check(train_steps >= 1, "train_steps must be at least 1");
  check(shutin_steps >= 0, "shutin_steps must be non-negative");
  check(highrate_steps >= 1, "highrate_steps must be at least 1");
  check(test_steps >= 1, "test_steps must be at least 1");
  check(q_train > 0.0, "q_train must be positive");
  check(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must lie in (0, 1)");
  check(!out_dir.empty(), "out_dir must be set");
  check(!kinds.empty(), "at least one model kind must be requested");
}

bool RunConfig::wants(SurrogateKind kind) const {
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json models = nlohmann::json::array();
  for (const SurrogateKind k : cfg.kinds) models.push_back(to_string(k));
  return {{"case", to_string(cfg.case_name)},
          {"nx", cfg.nx},
          {"dt_days", cfg.dt_days},
          {"train_steps", cfg.train_steps},
          {"shutin_steps", cfg.shutin_steps},
          {"highrate_steps", cfg.highrate_steps},
          {"test_steps", cfg.test_steps},
          {"q_train", cfg.q_train},
          {"rel_tol", cfg.rel_tol},
          {"out_dir", cfg.out_dir.string()},
          {"models", models}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "case")
        cfg.case_name = case_from_string(value.get<std::string>());
      else if (key == "nx")
        cfg.nx = value.get<int>();
      else if (key == "dt_days")
        cfg.dt_days = value.get<double>();
      else if (key == "train_steps")
        cfg.train_steps = value.get<int>();
      else if (key == "shutin_steps")
        cfg.shutin_steps = value.get<int>();
      else if (key == "highrate_steps")
        cfg.highrate_steps = value.get<int>();
      else if (key == "test_steps")
        cfg.test_steps = value.get<int>();
      else if (key == "q_train")
        cfg.q_train = value.get<double>();
      else if (key == "rel_tol")
        cfg.rel_tol = value.get<double>();
      else if (key == "out_dir")
        cfg.out_dir = value.get<std::string>();
      else if (key == "models") {
        cfg.kinds.clear();
        for (const auto& entry : value) {
          const std::string name = entry.get<std::string>();
          if (name == "all") {
            cfg.kinds = {SurrogateKind::Dmdc, SurrogateKind::CckmLevel,
                         SurrogateKind::CckmDelta, SurrogateKind::HybridB};
            break;
          }
          cfg.kinds.push_back(kind_from_string(name));
        }
      } else
        throw Error(ErrorCode::Config, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("malformed config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ControlSchedule ScenarioSpec::full_schedule() const {
  ControlSchedule full;
  full.mode = train_schedule.mode;
  full.dt = train_schedule.dt;
  full.u.resize(train_schedule.steps() + test_schedule.steps());
  full.u << train_schedule.u, test_schedule.u;
  return full;
}

void ScenarioSpec::validate() const {
  model.validate();
  well.validate(model.grid);
  train_schedule.validate();
  test_schedule.validate();
  require(train_schedule.mode == test_schedule.mode && train_schedule.dt == test_schedule.dt,
          "train and test schedules must share mode and step size");
  require(train_schedule.mode == well.mode, "schedule mode must match the well mode");
  require(formulations.size() == 2, "each variable needs a CCKM formulation");
  for (const auto& [variable, kind] : formulations)
    require(kind == SurrogateKind::CckmLevel || kind == SurrogateKind::CckmDelta,
            "formulation must be a CCKM form");
}

ScenarioSpec make_case_a(const RunConfig& cfg) {
  cfg.validate();
  require(cfg.case_name == CaseName::CaseA, "config names a different case",
          ErrorCode::Config);

  ScenarioSpec spec;
  spec.name = CaseName::CaseA;
  ModelOverrides ov;
  ov.mu_o_cp = kCaseOilViscosityCp;
  spec.model = build_model(cfg.nx, ov);

  spec.well.cell = spec.model.grid.center_cell();
  spec.well.mode = WellMode::Rate;

  const double dt = units::s_from_day(cfg.dt_days);
  const double q = units::m3s_from_m3day(cfg.q_train);
  spec.train_schedule.mode = WellMode::Rate;
  spec.train_schedule.dt = dt;
  spec.train_schedule.u = constant_block(cfg.train_steps, q);

  spec.test_schedule.mode = WellMode::Rate;
  spec.test_schedule.dt = dt;
  spec.test_schedule.u.resize(cfg.shutin_steps + cfg.highrate_steps);
  spec.test_schedule.u << constant_block(cfg.shutin_steps, 0.0),
      constant_block(cfg.highrate_steps, 100.0 * q);

  spec.formulations = {{Variable::Pressure, SurrogateKind::CckmDelta},
                       {Variable::Saturation, SurrogateKind::CckmDelta}};
  spec.validate();
  return spec;
}

ScenarioSpec make_case_b(const RunConfig& cfg) {
  cfg.validate();
  require(cfg.case_name == CaseName::CaseB, "config names a different case",
          ErrorCode::Config);

  ScenarioSpec spec;
  spec.name = CaseName::CaseB;
  ModelOverrides ov;
  ov.mu_o_cp = kCaseOilViscosityCp;
  ov.p_init_bar = 200.0;
  ov.sw_init = 0.5;
  spec.model = build_model(cfg.nx, ov);

  spec.well.cell = spec.model.grid.center_cell();
  spec.well.mode = WellMode::Bhp;
  spec.well.lambda = 1.0;

  const double dt = units::s_from_day(cfg.dt_days);
  spec.train_schedule.mode = WellMode::Bhp;
  spec.train_schedule.dt = dt;
  spec.train_schedule.u = constant_block(cfg.train_steps, units::pa_from_bar(110.0));

  spec.test_schedule.mode = WellMode::Bhp;
  spec.test_schedule.dt = dt;
  spec.test_schedule.u = constant_block(cfg.test_steps, units::pa_from_bar(20.0));

  spec.formulations = {{Variable::Pressure, SurrogateKind::CckmLevel},
                       {Variable::Saturation, SurrogateKind::CckmDelta}};
  spec.validate();
  return spec;
}

ScenarioSpec make_case(const RunConfig& cfg) {
  return cfg.case_name == CaseName::CaseA ? make_case_a(cfg) : make_case_b(cfg);
}

}  // namespace koopflow
