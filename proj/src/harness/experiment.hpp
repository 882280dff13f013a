#pragma once

#include <vector>

#include "harness/scenario.hpp"
#include "metrics/metrics.hpp"

namespace koopflow {

/// One fitted kind on one variable with both assessments: teacher-forced
/// training reconstruction and free-run test rollout.
struct ModelOutcome {
  SurrogateKind kind = SurrogateKind::Dmdc;
  Variable variable = Variable::Pressure;
  FitReport fit;
  EvalReport test;
};

struct ExperimentResult {
  RunConfig cfg;
  std::vector<ModelOutcome> outcomes;  ///< requested kinds x both variables
};

/// Composable pipeline stages. Each stage reads its inputs from cfg.out_dir
/// and writes its outputs there; artifacts are stamped with the config hash
/// so stages refuse to mix outputs of different configurations.
///
///   simulate: ground-truth run over train+test; writes the two trajectory
///             CSVs and sim_meta.json.
///   fit:      trains the requested kinds on the training slice only;
///             writes one model file per kind and variable plus gains.json.
///   evaluate: free-run test rollouts and reports; writes summary.json,
///             table1.csv, rollout and series CSVs, and manifest.json.
///
/// Reruns with a fixed config are byte-identical: the pipeline is
/// deterministic end to end and emits no timestamps.
void stage_simulate(const RunConfig& cfg);
void stage_fit(const RunConfig& cfg);
ExperimentResult stage_evaluate(const RunConfig& cfg);

/// The three stages in sequence (exactly what the run-case command does).
ExperimentResult run_experiment(const RunConfig& cfg);

}  // namespace koopflow
