#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <koopflow/koopflow.h>

// Thin shell over the C API: parse flags, assemble a config, run one entry
// point, map kf_status straight to the process exit code (config 2,
// simulation 3, fit 4). Surrogate blow-ups are recorded in the artifacts and
// are not process failures.
namespace {

struct StageArgs {
  std::string config_path;
  std::string case_name;
  std::string models;
  std::string out_dir;
  int nx = 0;
  double dt_days = 0.0;
  CLI::Option* given_config = nullptr;
  CLI::Option* given_case = nullptr;
  CLI::Option* given_models = nullptr;
  CLI::Option* given_out = nullptr;
  CLI::Option* given_nx = nullptr;
  CLI::Option* given_dt = nullptr;
};

void add_options(CLI::App& cmd, StageArgs& a) {
  a.given_config = cmd.add_option("--config", a.config_path,
                                  "JSON config file; explicit flags override its values");
  a.given_case =
      cmd.add_option("--case", a.case_name, "scenario: a (shut-in/restart) or b (bhp drawdown)");
  a.given_nx = cmd.add_option("--nx", a.nx, "grid edge, odd and >= 3");
  a.given_dt = cmd.add_option("--dt-days", a.dt_days, "snapshot spacing in days");
  a.given_models = cmd.add_option(
      "--models", a.models, "comma list of dmdc,cckm-level,cckm-delta,hybrid-b, or all");
  a.given_out = cmd.add_option("--out", a.out_dir, "artifact directory");
}

int fail(kf_status st) {
  std::fprintf(stderr, "error: %s\n", kf_last_error());
  return static_cast<int>(st);
}

// 0 with *out owned by the caller, or a process exit code.
int build_config(const StageArgs& a, kf_config** out) {
  kf_status st = KF_OK;
  if (a.given_config->count() > 0)
    st = kf_config_load(a.config_path.c_str(), out);
  else if (a.given_case->count() > 0)
    st = kf_config_create(a.case_name.c_str(), out);
  else {
    std::fprintf(stderr, "error: --case or --config is required\n");
    return static_cast<int>(KF_ERR_CONFIG);
  }
  if (st != KF_OK) return fail(st);

  if (st == KF_OK && a.given_case->count() > 0)
    st = kf_config_set_string(*out, "case", a.case_name.c_str());
  if (st == KF_OK && a.given_nx->count() > 0) st = kf_config_set_int(*out, "nx", a.nx);
  if (st == KF_OK && a.given_dt->count() > 0)
    st = kf_config_set_double(*out, "dt_days", a.dt_days);
  if (st == KF_OK && a.given_models->count() > 0)
    st = kf_config_set_string(*out, "models", a.models.c_str());
  if (st == KF_OK && a.given_out->count() > 0)
    st = kf_config_set_string(*out, "out_dir", a.out_dir.c_str());
  if (st != KF_OK) {
    kf_config_destroy(*out);
    *out = nullptr;
    return fail(st);
  }
  return 0;
}

int run_stage(const StageArgs& a, kf_status (*entry)(const kf_config*)) {
  kf_config* cfg = nullptr;
  if (const int rc = build_config(a, &cfg)) return rc;
  const kf_status st = entry(cfg);
  kf_config_destroy(cfg);
  return st == KF_OK ? 0 : fail(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-phase flow ground truth, linear control-aware surrogates, and "
               "out-of-distribution control studies"};
  app.set_version_flag("--version", kf_version());
  app.require_subcommand(1);

  constexpr int kStages = 4;
  const char* names[kStages] = {"run-case", "simulate", "fit", "evaluate"};
  const char* briefs[kStages] = {
      "simulate, fit, and evaluate in one run",
      "write ground-truth trajectories and run metadata",
      "fit the requested surrogates from the simulated training window",
      "roll out fitted surrogates on the test window and write reports",
  };
  kf_status (*entries[kStages])(const kf_config*) = {kf_run_case, kf_stage_simulate,
                                                     kf_stage_fit, kf_stage_evaluate};
  StageArgs args[kStages];
  CLI::App* cmds[kStages];
  for (int i = 0; i < kStages; ++i) {
    cmds[i] = app.add_subcommand(names[i], briefs[i]);
    add_options(*cmds[i], args[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the parse error
    return rc == 0 ? 0 : static_cast<int>(KF_ERR_CONFIG);
  }

  for (int i = 0; i < kStages; ++i)
    if (cmds[i]->parsed()) return run_stage(args[i], entries[i]);
  return static_cast<int>(KF_ERR_CONFIG);  // unreachable: a subcommand is required
}
