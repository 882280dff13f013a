#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/error.hpp"
#include "core/units.hpp"
#include "harness/experiment.hpp"
#include "harness/scenario.hpp"

using namespace koopflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Small, fast configuration exercising every pipeline branch of one case.
RunConfig tiny_config(CaseName name, const fs::path& out) {
  RunConfig cfg;
  cfg.case_name = name;
  cfg.nx = 7;
  cfg.train_steps = 12;
  cfg.shutin_steps = 4;
  cfg.highrate_steps = 4;
  cfg.test_steps = 8;
  cfg.out_dir = out;
  return cfg;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("config JSON round-trips canonically") {
  RunConfig cfg;
  cfg.case_name = CaseName::CaseB;
  cfg.nx = 9;
  cfg.kinds = {SurrogateKind::CckmDelta, SurrogateKind::Dmdc};
  const nlohmann::json j = to_json(cfg);
  const RunConfig back = config_from_json(j);
  CHECK(to_json(back).dump() == j.dump());
  CHECK(config_hash(back) == config_hash(cfg));

  SUBCASE("hash separates configurations") {
    RunConfig other = cfg;
    other.nx = 11;
    CHECK(config_hash(other) != config_hash(cfg));
  }
}

TEST_CASE("config parsing is strict") {
  CHECK(code_of([] { config_from_json({{"case", "a"}, {"zz", 1}}); }) == ErrorCode::Config);
  CHECK(code_of([] { config_from_json({{"nx", "seven"}}); }) == ErrorCode::Config);
  CHECK(code_of([] { config_from_json(nlohmann::json::array()); }) == ErrorCode::Config);
  CHECK(code_of([] { config_from_json({{"nx", 4}}); }) == ErrorCode::Config);
  CHECK(code_of([] { config_from_json({{"models", nlohmann::json::array()}}); }) ==
        ErrorCode::Config);

  SUBCASE("'all' expands to the four kinds in canonical order") {
    const RunConfig cfg = config_from_json({{"models", {"all"}}});
    REQUIRE(cfg.kinds.size() == 4);
    CHECK(cfg.kinds[0] == SurrogateKind::Dmdc);
    CHECK(cfg.kinds[1] == SurrogateKind::CckmLevel);
    CHECK(cfg.kinds[2] == SurrogateKind::CckmDelta);
    CHECK(cfg.kinds[3] == SurrogateKind::HybridB);
  }
}

TEST_CASE("case a scenario holds the advertised shut-in/restart schedule") {
  RunConfig cfg;
  const ScenarioSpec spec = make_case_a(cfg);
  spec.validate();
  CHECK(spec.well.mode == WellMode::Rate);
  CHECK(spec.well.cell == spec.model.grid.center_cell());
  CHECK(spec.formulations.at(Variable::Pressure) == SurrogateKind::CckmDelta);
  CHECK(spec.formulations.at(Variable::Saturation) == SurrogateKind::CckmDelta);

  const double q_si = units::m3s_from_m3day(cfg.q_train);
  REQUIRE(spec.train_schedule.steps() == cfg.train_steps);
  CHECK(spec.train_schedule.u.minCoeff() == spec.train_schedule.u.maxCoeff());
  CHECK(spec.train_schedule.u[0] == q_si);

  REQUIRE(spec.test_schedule.steps() == cfg.shutin_steps + cfg.highrate_steps);
  for (int k = 0; k < cfg.shutin_steps; ++k) CHECK(spec.test_schedule.u[k] == 0.0);
  for (int k = cfg.shutin_steps; k < spec.test_schedule.steps(); ++k)
    CHECK(spec.test_schedule.u[k] == 100.0 * q_si);

  SUBCASE("shut-in block may be empty") {
    cfg.shutin_steps = 0;
    cfg.validate();
    CHECK(make_case_a(cfg).test_schedule.steps() == cfg.highrate_steps);
  }

  SUBCASE("train and test concatenate into one continuous schedule") {
    const ControlSchedule full = spec.full_schedule();
    CHECK(full.steps() == spec.train_schedule.steps() + spec.test_schedule.steps());
    CHECK((full.u.head(cfg.train_steps).array() == spec.train_schedule.u.array()).all());
    CHECK((full.u.tail(spec.test_schedule.steps()).array() == spec.test_schedule.u.array()).all());
  }
}

TEST_CASE("case b scenario holds the advertised drawdown schedule") {
  RunConfig cfg;
  cfg.case_name = CaseName::CaseB;
  const ScenarioSpec spec = make_case_b(cfg);
  spec.validate();
  CHECK(spec.well.mode == WellMode::Bhp);
  CHECK(spec.well.lambda == 1.0);
  CHECK(spec.formulations.at(Variable::Pressure) == SurrogateKind::CckmLevel);
  CHECK(spec.formulations.at(Variable::Saturation) == SurrogateKind::CckmDelta);
  CHECK(spec.model.p_init.minCoeff() == units::pa_from_bar(200.0));
  CHECK(spec.model.p_init.maxCoeff() == units::pa_from_bar(200.0));
  CHECK(spec.model.sw_init.minCoeff() == 0.5);
  CHECK(spec.model.sw_init.maxCoeff() == 0.5);

  REQUIRE(spec.train_schedule.steps() == cfg.train_steps);
  REQUIRE(spec.test_schedule.steps() == cfg.test_steps);
  CHECK(spec.train_schedule.u[0] == units::pa_from_bar(110.0));
  CHECK(spec.train_schedule.u.minCoeff() == spec.train_schedule.u.maxCoeff());
  CHECK(spec.test_schedule.u[0] == units::pa_from_bar(20.0));
  CHECK(spec.test_schedule.u.minCoeff() == spec.test_schedule.u.maxCoeff());
}

TEST_CASE("pipeline stages compose through files") {
  TempDir dir("koopflow_harness_pipeline");
  const RunConfig cfg = tiny_config(CaseName::CaseA, dir.path / "run");

  const ExperimentResult fused = run_experiment(cfg);
  REQUIRE(fused.outcomes.size() == 2 * cfg.kinds.size());

  // Manifest enumerates exactly the files the run produced.
  const nlohmann::json manifest =
      nlohmann::json::parse(read_text(cfg.out_dir / "manifest.json"));
  for (const auto& entry : manifest.at("artifacts"))
    CHECK(fs::exists(cfg.out_dir / entry.at("file").get<std::string>()));

  SUBCASE("reruns are byte-identical") {
    const std::string summary = read_text(cfg.out_dir / "summary.json");
    const std::string table = read_text(cfg.out_dir / "table1.csv");
    run_experiment(cfg);
    CHECK(read_text(cfg.out_dir / "summary.json") == summary);
    CHECK(read_text(cfg.out_dir / "table1.csv") == table);
  }

  SUBCASE("staged calls produce the fused artifacts byte for byte") {
    std::map<std::string, std::string> fused_bytes;
    for (const auto& e : fs::directory_iterator(cfg.out_dir))
      fused_bytes[e.path().filename().string()] = read_text(e.path());
    fs::remove_all(cfg.out_dir);

    stage_simulate(cfg);
    stage_fit(cfg);
    stage_evaluate(cfg);
    std::size_t staged_count = 0;
    for (const auto& e : fs::directory_iterator(cfg.out_dir)) {
      ++staged_count;
      REQUIRE(fused_bytes.count(e.path().filename().string()) == 1);
      CHECK(read_text(e.path()) == fused_bytes[e.path().filename().string()]);
    }
    CHECK(staged_count == fused_bytes.size());
  }

  SUBCASE("stages refuse artifacts from a different configuration") {
    RunConfig other = cfg;
    other.nx = 9;
    CHECK(code_of([&] { stage_fit(other); }) == ErrorCode::Config);
    CHECK(code_of([&] { stage_evaluate(other); }) == ErrorCode::Config);
  }
}

TEST_CASE("a model subset fits and evaluates only that subset") {
  TempDir dir("koopflow_harness_subset");
  RunConfig cfg = tiny_config(CaseName::CaseB, dir.path / "run");
  cfg.kinds = {SurrogateKind::CckmDelta};

  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.outcomes.size() == 2);  // one per variable
  for (const ModelOutcome& o : res.outcomes) CHECK(o.kind == SurrogateKind::CckmDelta);
  CHECK(fs::exists(cfg.out_dir / "model_pressure_cckm-delta.kfm"));
  CHECK(!fs::exists(cfg.out_dir / "model_pressure_dmdc.kfm"));

  const nlohmann::json summary = nlohmann::json::parse(read_text(cfg.out_dir / "summary.json"));
  CHECK(summary.at("results").size() == 2);

  SUBCASE("growing the model list needs a rerun, not a silent mix") {
    RunConfig wants_more = cfg;
    wants_more.kinds = {SurrogateKind::CckmDelta, SurrogateKind::Dmdc};
    // The kind list is part of the stamped configuration.
    CHECK(config_hash(wants_more) != config_hash(cfg));
    CHECK(code_of([&] { stage_evaluate(wants_more); }) == ErrorCode::Config);
  }
}

TEST_CASE("fit and evaluate demand the upstream stage") {
  TempDir dir("koopflow_harness_missing");
  const RunConfig cfg = tiny_config(CaseName::CaseA, dir.path / "run");
  fs::create_directories(cfg.out_dir);
  CHECK(code_of([&] { stage_fit(cfg); }) == ErrorCode::Config);
  CHECK(code_of([&] { stage_evaluate(cfg); }) == ErrorCode::Config);
}
