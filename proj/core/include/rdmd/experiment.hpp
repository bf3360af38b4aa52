#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdmd/estimators.hpp"
#include "rdmd/robust_stats.hpp"
#include "rdmd/systems.hpp"

namespace rdmd {

// One experiment described as key = value text: which system to simulate,
// how to contaminate it, which estimators to fit, and where outputs go.
// Every field has a default so an empty spec is a valid experiment.
struct ExperimentSpec {
  // system selection and parameters
  std::string system = "linear2x2";
  int dim = 10;           // random_linear / generalized_slow_manifold
  int oscillators = 15;   // ring
  double damping = 0.05;  // ring
  double sm_mu = -0.05;
  double sm_lambda = -1.0;
  double vdp_mu = 1.0;
  bool vdp_no_restoring = false;

  // sampling
  double dt = 0.01;
  int steps = 500;
  std::vector<double> x0;  // empty -> the system's default initial state
  std::uint64_t seed = 0;  // drives system draws and contamination

  // contamination (plan.seed is filled from `seed` at run time)
  ContaminationPlan plan;

  // estimation
  std::vector<std::string> methods = {"dmd", "nrdmd"};
  int rank = 0;  // 0 -> auto (standard: numerical rank; robust-standard:
                 // numerical rank capped at dim - 1)
  HuberConfig huber;
  ScaleEstimatorKind scale_estimator = ScaleEstimatorKind::QnS2;
  double quantile = 0.975;
  int dof = 0;  // 0 -> 2m for stacked transitions

  // post-processing
  std::string reconstruct_mode = "free_run";  // free_run | one_step | none

  std::string out_dir = "out";
};

// Parse "key = value" lines ('#' comments and blank lines skipped).
// Unknown keys and malformed values raise ParseError naming the key.
ExperimentSpec parse_experiment_text(const std::string& text,
                                     const std::string& origin);
ExperimentSpec parse_experiment(const std::string& path);

// Canonical echo of the spec with every default resolved (including the
// realized x0), in fixed key order; written as spec_resolved.txt by runs.
std::string resolved_text(const ExperimentSpec& spec);

// Instantiate the benchmark system the spec describes.
BenchmarkSystem build_system(const ExperimentSpec& spec);

struct RunOutcome {
  std::string out_dir;
  std::vector<std::string> files;  // relative paths of everything written
};

// Execute the full pipeline: simulate, contaminate, fit every method,
// reconstruct, summarize; writes all artifacts plus manifest.json and
// timings.json under spec.out_dir.  Every output except timings.json is a
// deterministic function of (spec, seed).  `spec_text` is the original
// file content and is hashed into the manifest.
RunOutcome run_experiment(const ExperimentSpec& spec,
                          const std::string& spec_text);

}  // namespace rdmd
