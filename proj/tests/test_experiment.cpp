#include <doctest.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdmd/errors.hpp"
#include "rdmd/experiment.hpp"
#include "rdmd/serialize.hpp"

using namespace rdmd;
using nlohmann::json;
namespace fs = std::filesystem;

TEST_CASE("an empty spec resolves to the documented defaults") {
  const ExperimentSpec spec = parse_experiment_text("", "empty");
  CHECK(spec.system == "linear2x2");
  CHECK(spec.dt == 0.01);
  CHECK(spec.steps == 500);
  CHECK(spec.seed == 0);
  CHECK(spec.x0.empty());
  CHECK(spec.plan.empty());
  REQUIRE(spec.methods.size() == 2);
  CHECK(spec.methods[0] == "dmd");
  CHECK(spec.methods[1] == "nrdmd");
  CHECK(spec.rank == 0);
  CHECK(spec.huber.delta == 1.5);
  CHECK(spec.reconstruct_mode == "free_run");
  CHECK(spec.out_dir == "out");
}

TEST_CASE("every key is parsed, comments and blanks are skipped") {
  const std::string text =
      "# a comment\n"
      "system = ring\n"
      "oscillators = 5\n"
      "damping = 0.1\n"
      "\n"
      "dt = 0.02\n"
      "steps = 100\n"
      "x0 = 1, 0, 0.5, 0, 0, 0, 0, 0, 0, 0\n"
      "seed = 42\n"
      "noise = laplace\n"
      "noise_variance = 0.04\n"
      "window = 0.5 : 0.6 : 0.3\n"
      "window = 1.0:1.1:-0.2\n"
      "spike = true\n"
      "spike_mu = 2.0\n"
      "spike_p = 0.01\n"
      "spike_eta = 1e-3\n"
      "methods = dmd, krdmd, nrdmd\n"
      "rank = 3\n"
      "delta = 2.0\n"
      "b = 1.7\n"
      "irls_tol = 0.005\n"
      "max_iter = 80\n"
      "bm = 1.2\n"
      "gamma = 1e-5\n"
      "freeze_scale = true\n"
      "scale_estimator = s1\n"
      "quantile = 0.99\n"
      "dof = 6\n"
      "reconstruct = one_step\n"
      "out_dir = /tmp/somewhere\n";
  const ExperimentSpec spec = parse_experiment_text(text, "full");

  CHECK(spec.system == "ring");
  CHECK(spec.oscillators == 5);
  CHECK(spec.damping == 0.1);
  CHECK(spec.dt == 0.02);
  CHECK(spec.steps == 100);
  REQUIRE(spec.x0.size() == 10);
  CHECK(spec.x0[2] == 0.5);
  CHECK(spec.seed == 42);
  CHECK(spec.plan.noise == NoiseKind::Laplace);
  CHECK(spec.plan.laplace_variance == 0.04);
  REQUIRE(spec.plan.windows.size() == 2);
  CHECK(spec.plan.windows[0].t_start == 0.5);
  CHECK(spec.plan.windows[1].magnitude == -0.2);
  REQUIRE(spec.plan.spike.has_value());
  CHECK(spec.plan.spike->mu == 2.0);
  CHECK(spec.plan.spike->p == 0.01);
  CHECK(spec.plan.spike->eta == 1e-3);
  REQUIRE(spec.methods.size() == 3);
  CHECK(spec.methods[1] == "krdmd");
  CHECK(spec.rank == 3);
  CHECK(spec.huber.delta == 2.0);
  CHECK(spec.huber.b == 1.7);
  CHECK(spec.huber.irls_tol == 0.005);
  CHECK(spec.huber.max_iter == 80);
  CHECK(spec.huber.bm == 1.2);
  CHECK(spec.huber.gamma == 1e-5);
  CHECK(spec.huber.freeze_scale);
  CHECK(spec.scale_estimator == ScaleEstimatorKind::MadS1);
  CHECK(spec.quantile == 0.99);
  CHECK(spec.dof == 6);
  CHECK(spec.reconstruct_mode == "one_step");
  CHECK(spec.out_dir == "/tmp/somewhere");
}

TEST_CASE("malformed specs raise parse errors naming the problem") {
  CHECK_THROWS_WITH_AS(parse_experiment_text("bogus_key = 1\n", "s"),
                       doctest::Contains("bogus_key"), ParseError);
  CHECK_THROWS_WITH_AS(parse_experiment_text("dt = fast\n", "s"),
                       doctest::Contains("dt"), ParseError);
  CHECK_THROWS_WITH_AS(parse_experiment_text("methods = dmd, lts\n", "s"),
                       doctest::Contains("lts"), ParseError);
  CHECK_THROWS_AS(parse_experiment_text("methods =\n", "s"), ParseError);
  CHECK_THROWS_AS(parse_experiment_text("window = 1:2\n", "s"), ParseError);
  CHECK_THROWS_AS(parse_experiment_text("noise = pink\n", "s"), ParseError);
  CHECK_THROWS_AS(parse_experiment_text("scale_estimator = s3\n", "s"),
                  ParseError);
  CHECK_THROWS_AS(parse_experiment_text("reconstruct = backwards\n", "s"),
                  ParseError);
  CHECK_THROWS_AS(parse_experiment_text("spike = maybe\n", "s"), ParseError);
  // a key without '=' names its line
  CHECK_THROWS_WITH_AS(parse_experiment_text("dt = 0.1\nnonsense\n", "s"),
                       doctest::Contains("2"), ParseError);
}

TEST_CASE("resolved text is a fixed point of parsing") {
  ExperimentSpec spec = parse_experiment_text(
      "system = van_der_pol\nvdp_mu = 1.5\nsteps = 50\nseed = 9\n"
      "window = 0.1:0.2:0.05\nmethods = dmd\nreconstruct = none\n",
      "t");
  const std::string once = resolved_text(spec);
  const ExperimentSpec reparsed = parse_experiment_text(once, "resolved");
  CHECK(resolved_text(reparsed) == once);
  CHECK(reparsed.vdp_mu == 1.5);
  CHECK(reparsed.plan.windows.size() == 1);
}

TEST_CASE("build_system dispatches on the system name") {
  ExperimentSpec spec;
  spec.system = "linear2x2";
  CHECK(build_system(spec).name() == "linear2x2");
  spec.system = "ring";
  spec.oscillators = 4;
  CHECK(build_system(spec).dim == 8);
  spec.system = "slow_manifold";
  CHECK(build_system(spec).name() == "slow_manifold");
  spec.system = "van_der_pol";
  CHECK(build_system(spec).name() == "van_der_pol");
  spec.system = "generalized_slow_manifold";
  spec.dim = 6;
  CHECK(build_system(spec).gsm_mu.size() == 3);
  spec.system = "hopf";
  CHECK_THROWS_AS(build_system(spec), InvalidInputError);

  // random systems are a pure function of the experiment seed
  spec.system = "random_linear";
  spec.dim = 5;
  spec.seed = 11;
  const Eigen::MatrixXd a = build_system(spec).theta;
  const Eigen::MatrixXd b = build_system(spec).theta;
  CHECK(a == b);
  spec.seed = 12;
  CHECK(a != build_system(spec).theta);
}

namespace {

std::map<std::string, std::string> slurp_outputs(const RunOutcome& outcome) {
  std::map<std::string, std::string> bytes;
  for (const std::string& rel : outcome.files) {
    bytes[rel] = read_text_file((fs::path(outcome.out_dir) / rel).string());
  }
  return bytes;
}

}  // namespace

TEST_CASE("run_experiment writes a complete, self-consistent bundle") {
  const fs::path dir = fs::temp_directory_path() / "rdmd_experiment_test";
  fs::remove_all(dir);

  const std::string text =
      "system = linear2x2\n"
      "dt = 0.01\n"
      "steps = 80\n"
      "seed = 3\n"
      "window = 0.2:0.25:0.4\n"
      "methods = dmd, nrdmd\n"
      "out_dir = " + dir.string() + "\n";
  const ExperimentSpec spec = parse_experiment_text(text, "test-spec");
  const RunOutcome outcome = run_experiment(spec, text);

  CHECK(outcome.out_dir == dir.string());
  for (const char* name :
       {"truth.csv", "data.csv", "fit.dmd.json", "fit.nrdmd.json",
        "spectrum.dmd.json", "spectrum.nrdmd.json", "report.nrdmd.json",
        "recon.dmd.csv", "recon.nrdmd.csv", "summary.csv", "long.csv",
        "spec_resolved.txt", "manifest.json", "timings.json"}) {
    INFO("expecting ", name);
    CHECK(fs::exists(dir / name));
  }
  // the plain least-squares fit carries no outlier report
  CHECK_FALSE(fs::exists(dir / "report.dmd.json"));

  const json manifest = json::parse(read_text_file((dir / "manifest.json").string()));
  CHECK(manifest["kind"] == "run_manifest");
  CHECK(manifest["schema_version"] == 1);
  CHECK(manifest["system"] == "linear2x2");
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["spec_hash"] == content_hash(text));

  // every hash in the manifest matches the bytes on disk, and the timing
  // file stays outside so reruns remain comparable
  bool saw_timings = false;
  for (const auto& entry : manifest["files"]) {
    const std::string rel = entry["path"].get<std::string>();
    saw_timings = saw_timings || rel == "timings.json";
    const std::string data = read_text_file((dir / rel).string());
    CHECK(entry["hash"].get<std::string>() == content_hash(data));
  }
  CHECK_FALSE(saw_timings);

  REQUIRE(manifest["methods"].size() == 2);
  CHECK(manifest["methods"][0]["method"] == "dmd");
  CHECK(manifest["methods"][1]["method"] == "nrdmd");
  CHECK(manifest["methods"][1]["iterations"].get<int>() >= 1);

  const std::string summary = read_text_file((dir / "summary.csv").string());
  CHECK(summary.rfind("method,eig1_re,eig1_im,eig2_re,eig2_im,"
                      "final_cum_err,iterations,converged\n", 0) == 0);

  const std::string resolved = read_text_file((dir / "spec_resolved.txt").string());
  CHECK(resolved == resolved_text(spec));

  fs::remove_all(dir);
}

TEST_CASE("rerunning the same spec reproduces every artifact byte for byte") {
  const fs::path dir = fs::temp_directory_path() / "rdmd_experiment_repro";
  fs::remove_all(dir);

  const std::string text =
      "system = ring\n"
      "oscillators = 3\n"
      "steps = 60\n"
      "seed = 7\n"
      "noise = gaussian\n"
      "noise_sigma = 0.02\n"
      "methods = dmd, krdmd\n"
      "out_dir = " + dir.string() + "\n";
  const ExperimentSpec spec = parse_experiment_text(text, "spec");

  const RunOutcome first = run_experiment(spec, text);
  std::map<std::string, std::string> before = slurp_outputs(first);
  const RunOutcome second = run_experiment(spec, text);
  std::map<std::string, std::string> after = slurp_outputs(second);

  REQUIRE(first.files == second.files);
  for (const std::string& rel : first.files) {
    if (rel == "timings.json") continue;  // wall-clock, deliberately unstable
    INFO("file ", rel);
    CHECK(before[rel] == after[rel]);
  }
  fs::remove_all(dir);
}
