// Command-line front end: simulate benchmark systems, contaminate the
// resulting series, fit one-step operators, reconstruct trajectories and
// compare methods.  Exit codes: 0 success, 1 runtime or numeric failure,
// 2 usage error.

#include <charconv>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdmd/errors.hpp"
#include "rdmd/estimators.hpp"
#include "rdmd/experiment.hpp"
#include "rdmd/modal.hpp"
#include "rdmd/robust_stats.hpp"
#include "rdmd/serialize.hpp"
#include "rdmd/snapshots.hpp"
#include "rdmd/systems.hpp"
#include "rdmd/version.hpp"

namespace {

using namespace rdmd;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_token(const std::string& token, const std::string& what) {
  double out = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  if (ec != std::errc{} || ptr != end || token.empty()) {
    throw CLI::ValidationError(what + ": cannot parse '" + token +
                               "' as a number");
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    values.push_back(parse_double_token(token, what));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

OutlierWindow parse_window_arg(const std::string& text) {
  const std::size_t a = text.find(':');
  const std::size_t b = a == std::string::npos ? a : text.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos ||
      text.find(':', b + 1) != std::string::npos) {
    throw CLI::ValidationError("--window: expected start:end:magnitude, got '" +
                               text + "'");
  }
  OutlierWindow win;
  win.t_start = parse_double_token(text.substr(0, a), "--window start");
  win.t_end = parse_double_token(text.substr(a + 1, b - a - 1), "--window end");
  win.magnitude = parse_double_token(text.substr(b + 1), "--window magnitude");
  return win;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("RDMD_SEED");
  if (env == nullptr) return std::nullopt;
  const std::string text(env);
  std::uint64_t out = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw CLI::ValidationError("RDMD_SEED: cannot parse '" + text +
                               "' as an unsigned integer");
  }
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Trajectory CSVs written by `reconstruct` carry a trailing cumulative-error
// column; drop it so the channels line up with plain snapshot files.
TimeSeries load_trajectory(const std::string& path) {
  TimeSeries ts = read_csv(path);
  if (!ts.labels.empty() && ts.labels.back() == "cum_err") {
    ts.labels.pop_back();
    ts.samples.conservativeResize(ts.samples.rows() - 1, ts.samples.cols());
  }
  return ts;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string system = "linear2x2";
  double dt = 0.01;
  int steps = 500;
  std::string x0_text;
  std::string out = "run.csv";
  int oscillators = 15;
  double damping = 0.05;
  int dim = 10;
  double sm_mu = -0.05;
  double sm_lambda = -1.0;
  double vdp_mu = 1.0;
  bool vdp_no_restoring = false;
  std::uint64_t seed = 0;
};

int run_simulate(const SimulateOpts& opts) {
  ExperimentSpec spec;
  spec.system = opts.system;
  spec.dt = opts.dt;
  spec.steps = opts.steps;
  spec.oscillators = opts.oscillators;
  spec.damping = opts.damping;
  spec.dim = opts.dim;
  spec.sm_mu = opts.sm_mu;
  spec.sm_lambda = opts.sm_lambda;
  spec.vdp_mu = opts.vdp_mu;
  spec.vdp_no_restoring = opts.vdp_no_restoring;
  spec.seed = opts.seed;

  const BenchmarkSystem sys = build_system(spec);
  Eigen::VectorXd x0;
  if (opts.x0_text.empty()) {
    x0 = sys.default_x0();
  } else {
    const std::vector<double> values = parse_number_list(opts.x0_text, "--x0");
    x0 = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Eigen::Index>(values.size()));
  }

  const TimeSeries series = simulate(sys, x0, opts.dt, opts.steps);
  write_csv(series, opts.out);

  std::cout << "system = " << sys.name() << "\n";
  std::cout << "dim = " << sys.dim << "\n";
  std::cout << "dt = " << g17(opts.dt) << "\n";
  std::cout << "steps = " << opts.steps << "\n";
  std::string joined;
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (i) joined += ',';
    joined += g17(x0(i));
  }
  std::cout << "x0 = " << joined << "\n";
  std::cout << "seed = " << opts.seed << "\n";
  std::cout << "wrote " << opts.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// inject

struct InjectOpts {
  std::string in;
  std::string out = "data.csv";
  std::vector<std::string> windows;
  std::string noise = "none";
  double sigma = 0.1;
  double variance = 0.01;
  int dof = 2;
  double gamma = 2.0;
  bool spike = false;
  double spike_mu = 1.0;
  double spike_p = 0.05;
  double spike_eta = 1e-4;
  std::uint64_t seed = 0;
};

int run_inject(const InjectOpts& opts) {
  const TimeSeries series = read_csv(opts.in);

  ContaminationPlan plan;
  for (const std::string& w : opts.windows) {
    plan.windows.push_back(parse_window_arg(w));
  }
  plan.noise = noise_kind_from_name(opts.noise);
  plan.gaussian_sigma = opts.sigma;
  plan.laplace_variance = opts.variance;
  plan.student_dof = opts.dof;
  plan.cauchy_gamma = opts.gamma;
  if (opts.spike) {
    SpikePlan sp;
    sp.mu = opts.spike_mu;
    sp.p = opts.spike_p;
    sp.eta = opts.spike_eta;
    plan.spike = sp;
  }
  plan.seed = opts.seed;

  write_csv(contaminate(series, plan), opts.out);
  std::cout << "wrote " << opts.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitOpts {
  std::string in;
  std::string y_path;
  std::string yp_path;
  std::string method;
  std::string out_prefix = "fit";
  double delta = 1.5;
  double b = 1.5;
  double tol = 0.01;
  int max_iter = 50;
  std::string scale = "s2";
  int dof = 0;
  int rank = 0;
  double gamma = 1e-6;
  double quantile = 0.975;
  double bm = 1.0;
  bool freeze_scale = false;
};

int run_fit(const FitOpts& opts) {
  SnapshotPair pair;
  if (!opts.y_path.empty() || !opts.yp_path.empty()) {
    if (opts.y_path.empty() || opts.yp_path.empty()) {
      throw CLI::ValidationError("--y and --yp must be given together");
    }
    const TimeSeries ys = read_csv(opts.y_path);
    const TimeSeries yps = read_csv(opts.yp_path);
    if (ys.dim() != yps.dim() || ys.count() != yps.count()) {
      throw InvalidInputError("fit: --y and --yp shapes differ");
    }
    pair = make_pair(ys.samples, yps.samples, ys.dt);
  } else if (!opts.in.empty()) {
    pair = build_pair(read_csv(opts.in));
  } else {
    throw CLI::ValidationError("fit needs --in or the --y/--yp pair");
  }

  const bool robust = opts.method == "krdmd" || opts.method == "nrdmd" ||
                      opts.method == "robust-standard";

  HuberConfig cfg;
  cfg.delta = opts.delta;
  cfg.b = opts.b;
  cfg.irls_tol = opts.tol;
  cfg.max_iter = opts.max_iter;
  cfg.bm = opts.bm;
  cfg.gamma = opts.gamma;
  cfg.freeze_scale = opts.freeze_scale;

  OperatorEstimate est;
  if (opts.method == "dmd") {
    est = exact_dmd(pair);
  } else if (opts.method == "standard") {
    est = standard_dmd(pair, opts.rank);
  } else {
    OutlierOptions oopts;
    oopts.scale_estimator = opts.scale == "s1" ? ScaleEstimatorKind::MadS1
                                               : ScaleEstimatorKind::QnS2;
    oopts.b = opts.b;
    oopts.quantile = opts.quantile;
    oopts.dof = opts.dof;
    const OutlierReport report = detect_outliers(pair.Y, pair.Yp, oopts);
    if (opts.method == "krdmd") {
      est = krdmd(pair, cfg, report);
    } else if (opts.method == "nrdmd") {
      est = nrdmd(pair, cfg, report);
    } else {
      est = robust_standard_dmd(pair, opts.rank, cfg, report);
    }
  }

  print_warnings(est.warnings);
  write_text_file(opts.out_prefix + ".json", to_json_string(est));
  std::cout << "wrote " << opts.out_prefix << ".json\n";
  write_text_file(opts.out_prefix + ".spectrum.json",
                  to_json_string(spectrum(est)));
  std::cout << "wrote " << opts.out_prefix << ".spectrum.json\n";
  if (robust) {
    print_warnings(est.outliers.warnings);
    write_text_file(opts.out_prefix + ".report.json",
                    to_json_string(est.outliers));
    std::cout << "wrote " << opts.out_prefix << ".report.json\n";
  }
  std::cout << "method = " << est.method << "\n";
  std::cout << "iterations = " << est.iterations << "\n";
  std::cout << "converged = " << (est.converged ? "true" : "false") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructOpts {
  std::string fit_path;
  std::string truth;
  std::string x0_text;
  int steps = -1;
  std::string mode = "free_run";
  std::string out = "recon.csv";
};

int run_reconstruct(const ReconstructOpts& opts) {
  const OperatorEstimate est = read_estimate(opts.fit_path);

  TimeSeries ref;
  bool have_ref = false;
  if (!opts.truth.empty()) {
    ref = load_trajectory(opts.truth);
    have_ref = true;
  }
  if (opts.mode == "one_step" && !have_ref) {
    throw CLI::ValidationError("--mode one_step needs --truth");
  }

  Eigen::VectorXd x0;
  if (!opts.x0_text.empty()) {
    const std::vector<double> values = parse_number_list(opts.x0_text, "--x0");
    x0 = Eigen::Map<const Eigen::VectorXd>(
        values.data(), static_cast<Eigen::Index>(values.size()));
  } else if (have_ref) {
    x0 = ref.samples.col(0);
  } else {
    throw CLI::ValidationError("reconstruct needs --x0 or --truth");
  }

  int steps = opts.steps;
  if (steps < 0) {
    if (!have_ref) {
      throw CLI::ValidationError("reconstruct needs --steps or --truth");
    }
    steps = static_cast<int>(ref.count()) - 1;
  }

  const ReconMode mode =
      opts.mode == "one_step" ? ReconMode::OneStep : ReconMode::FreeRun;
  const ReconstructionResult recon =
      reconstruct(est, x0, steps, mode, have_ref ? &ref : nullptr);

  const std::vector<std::string> labels =
      have_ref ? ref.labels : std::vector<std::string>{};
  write_text_file(opts.out, reconstruction_csv(recon, labels));
  std::cout << "wrote " << opts.out << "\n";
  if (recon.cumulative_error.size() > 0) {
    std::cout << "final_cum_err = "
              << g17(recon.cumulative_error(recon.cumulative_error.size() - 1))
              << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOpts {
  std::string truth;
  std::vector<std::string> fits;    // name=estimate.json
  std::vector<std::string> recons;  // name=trajectory.csv
  std::string out = "summary.csv";
  std::string long_out = "long.csv";
  std::string timings_path;
};

std::pair<std::string, std::string> parse_named_path(const std::string& text,
                                                     const std::string& flag) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= text.size()) {
    throw CLI::ValidationError(flag + ": expected name=path, got '" + text +
                               "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

int run_compare(const CompareOpts& opts) {
  const TimeSeries truth = load_trajectory(opts.truth);

  struct Entry {
    std::string name;
    std::string fit_path;
    std::string recon_path;
  };
  std::vector<Entry> entries;
  const auto entry_for = [&entries](const std::string& name) -> Entry& {
    for (Entry& e : entries) {
      if (e.name == name) return e;
    }
    entries.push_back(Entry{name, "", ""});
    return entries.back();
  };
  for (const std::string& f : opts.fits) {
    const auto [name, path] = parse_named_path(f, "--fit");
    entry_for(name).fit_path = path;
  }
  for (const std::string& r : opts.recons) {
    const auto [name, path] = parse_named_path(r, "--recon");
    entry_for(name).recon_path = path;
  }
  if (entries.empty()) {
    throw CLI::ValidationError("compare needs at least one --fit or --recon");
  }

  nlohmann::json timings;
  if (!opts.timings_path.empty()) {
    try {
      timings = nlohmann::json::parse(read_text_file(opts.timings_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(opts.timings_path + ": " + e.what());
    }
  }

  std::string summary =
      "method,eig1_re,eig1_im,eig2_re,eig2_im,final_cum_err,wall_ms\n";
  std::vector<std::pair<std::string, TimeSeries>> trajectories;

  for (const Entry& e : entries) {
    std::string eig_cells = ",,,";
    if (!e.fit_path.empty()) {
      const OperatorEstimate est = read_estimate(e.fit_path);
      const Spectrum sp = spectrum(est);
      eig_cells.clear();
      for (Eigen::Index i = 0; i < 2; ++i) {
        if (i) eig_cells += ',';
        if (i < sp.count()) {
          const std::complex<double> z = sp.eig_continuous(i);
          eig_cells += g17(z.real()) + "," + g17(z.imag());
        } else {
          eig_cells += ",";
        }
      }
    }

    std::string err_cell;
    if (!e.recon_path.empty()) {
      const TimeSeries traj = load_trajectory(e.recon_path);
      if (traj.dim() != truth.dim() || traj.count() != truth.count()) {
        throw InvalidInputError(
            "compare: '" + e.name + "' trajectory shape (" +
            std::to_string(traj.dim()) + " x " + std::to_string(traj.count()) +
            ") does not match the truth series (" +
            std::to_string(truth.dim()) + " x " +
            std::to_string(truth.count()) + ")");
      }
      double err = 0.0;
      for (Eigen::Index k = 0; k < truth.count(); ++k) {
        err += (traj.samples.col(k) - truth.samples.col(k)).norm();
      }
      err_cell = g17(err);
      trajectories.emplace_back(e.name, traj);
    }

    std::string wall_cell;
    if (timings.contains("wall_ms")) {
      const nlohmann::json& wall = timings["wall_ms"];
      const std::string key = "fit." + e.name;
      if (wall.contains(key)) wall_cell = g17(wall[key].get<double>());
    }

    summary += e.name + "," + eig_cells + "," + err_cell + "," + wall_cell +
               "\n";
  }
  write_text_file(opts.out, summary);
  std::cout << "wrote " << opts.out << "\n";

  if (!trajectories.empty()) {
    std::string long_csv = "t,channel,truth";
    for (const auto& [name, traj] : trajectories) long_csv += "," + name;
    long_csv += '\n';
    for (Eigen::Index k = 0; k < truth.count(); ++k) {
      for (Eigen::Index i = 0; i < truth.dim(); ++i) {
        const std::string label =
            static_cast<Eigen::Index>(truth.labels.size()) == truth.dim()
                ? truth.labels[static_cast<std::size_t>(i)]
                : "x" + std::to_string(i + 1);
        long_csv += g17(truth.time_at(k)) + "," + label + "," +
                    g17(truth.samples(i, k));
        for (const auto& [name, traj] : trajectories) {
          long_csv += "," + g17(traj.samples(i, k));
        }
        long_csv += '\n';
      }
    }
    write_text_file(opts.long_out, long_csv);
    std::cout << "wrote " << opts.long_out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// run

struct RunOpts {
  std::string spec_path;
  std::string out_dir;
};

int run_run(const RunOpts& opts) {
  const std::string text = read_text_file(opts.spec_path);
  ExperimentSpec spec = parse_experiment_text(text, opts.spec_path);
  if (!opts.out_dir.empty()) spec.out_dir = opts.out_dir;
  if (const auto seed = seed_from_env()) spec.seed = *seed;

  const RunOutcome outcome = run_experiment(spec, text);
  for (const std::string& f : outcome.files) {
    std::cout << "wrote " << outcome.out_dir << "/" << f << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust identification of linear one-step dynamics from "
               "snapshot data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> methods = {"dmd", "standard", "krdmd",
                                            "nrdmd", "robust-standard"};
  const std::vector<std::string> systems = {
      "linear2x2",     "ring",          "slow_manifold",
      "van_der_pol",   "random_linear", "generalized_slow_manifold"};
  const std::vector<std::string> noises = {"none", "gaussian", "laplace",
                                           "student_t", "cauchy"};

  SimulateOpts sim;
  CLI::App* c_sim =
      app.add_subcommand("simulate", "Integrate a benchmark system to CSV");
  c_sim->add_option("--system", sim.system, "Benchmark system")
      ->check(CLI::IsMember(systems));
  c_sim->add_option("--dt", sim.dt, "Sampling step");
  c_sim->add_option("--steps", sim.steps, "Number of steps (writes steps+1 rows)");
  c_sim->add_option("--x0", sim.x0_text, "Initial state, comma separated");
  c_sim->add_option("--out", sim.out, "Output CSV path");
  c_sim->add_option("--s,--oscillators", sim.oscillators,
                    "Oscillator count (ring)");
  c_sim->add_option("--damping", sim.damping, "Per-angle damping (ring)");
  c_sim->add_option("--dim", sim.dim, "State dimension (random systems)");
  c_sim->add_option("--sm-mu", sim.sm_mu, "Slow rate (slow_manifold)");
  c_sim->add_option("--sm-lambda", sim.sm_lambda, "Fast rate (slow_manifold)");
  c_sim->add_option("--vdp-mu", sim.vdp_mu, "Nonlinearity (van_der_pol)");
  c_sim->add_flag("--vdp-no-restoring", sim.vdp_no_restoring,
                  "Drop the restoring term (van_der_pol)");
  c_sim->add_option("--seed", sim.seed, "Seed for randomly drawn systems");
  c_sim->callback([&sim] { run_simulate(sim); });

  InjectOpts inj;
  CLI::App* c_inj =
      app.add_subcommand("inject", "Contaminate a snapshot CSV");
  c_inj->add_option("--in", inj.in, "Input CSV")->required();
  c_inj->add_option("--out", inj.out, "Output CSV path");
  c_inj->add_option("--window", inj.windows,
                    "Outlier window start:end:magnitude (repeatable)");
  c_inj->add_option("--noise", inj.noise, "Dense noise kind")
      ->check(CLI::IsMember(noises));
  c_inj->add_option("--sigma", inj.sigma, "Gaussian standard deviation");
  c_inj->add_option("--variance", inj.variance, "Laplace variance");
  c_inj->add_option("--dof", inj.dof, "Student-t degrees of freedom");
  c_inj->add_option("--gamma", inj.gamma, "Cauchy half-width at half-maximum");
  c_inj->add_flag("--spike", inj.spike, "Add sparse spikes over dense jitter");
  c_inj->add_option("--spike-mu", inj.spike_mu, "Spike size");
  c_inj->add_option("--spike-p", inj.spike_p, "Spike probability per entry");
  c_inj->add_option("--spike-eta", inj.spike_eta, "Dense jitter size");
  c_inj->add_option("--seed", inj.seed, "Contamination seed");
  c_inj->callback([&inj] { run_inject(inj); });

  FitOpts fit;
  CLI::App* c_fit =
      app.add_subcommand("fit", "Fit a one-step operator to snapshots");
  c_fit->add_option("--in", fit.in, "Trajectory CSV (overlapping snapshots)");
  c_fit->add_option("--y", fit.y_path, "CSV holding the Y snapshot columns");
  c_fit->add_option("--yp", fit.yp_path, "CSV holding the Y' snapshot columns");
  c_fit->add_option("--method", fit.method, "Estimator")
      ->required()
      ->check(CLI::IsMember(methods));
  c_fit->add_option("--out", fit.out_prefix, "Output prefix for JSON files");
  c_fit->add_option("--delta", fit.delta, "Huber corner");
  c_fit->add_option("--b", fit.b, "Outlier weight cutoff");
  c_fit->add_option("--tol", fit.tol, "IRLS stopping tolerance");
  c_fit->add_option("--max-iter", fit.max_iter, "IRLS sweep limit");
  c_fit->add_option("--scale", fit.scale, "Projection scale estimator")
      ->check(CLI::IsMember({"s1", "s2"}));
  c_fit->add_option("--dof", fit.dof,
                    "Flagging degrees of freedom (0 = stacked dimension)");
  c_fit->add_option("--rank", fit.rank,
                    "Reduced rank (0 = auto, standard/robust-standard)");
  c_fit->add_option("--gamma", fit.gamma, "Ridge strength (robust-standard)");
  c_fit->add_option("--quantile", fit.quantile, "Flagging quantile");
  c_fit->add_option("--bm", fit.bm, "Finite-sample scale factor");
  c_fit->add_flag("--freeze-scale", fit.freeze_scale,
                  "Keep the residual scale from the initial fit instead of "
                  "letting it track the iteration");
  c_fit->callback([&fit] { run_fit(fit); });

  ReconstructOpts rec;
  CLI::App* c_rec = app.add_subcommand(
      "reconstruct", "Roll a fitted operator forward from an initial state");
  c_rec->add_option("--fit", rec.fit_path, "Operator estimate JSON")
      ->required();
  c_rec->add_option("--truth", rec.truth,
                    "Reference CSV (initial state, horizon, error)");
  c_rec->add_option("--x0", rec.x0_text, "Initial state, comma separated");
  c_rec->add_option("--steps", rec.steps, "Steps to roll forward");
  c_rec->add_option("--mode", rec.mode, "free_run or one_step")
      ->check(CLI::IsMember({"free_run", "one_step"}));
  c_rec->add_option("--out", rec.out, "Output CSV path");
  c_rec->callback([&rec] { run_reconstruct(rec); });

  CompareOpts cmp;
  CLI::App* c_cmp = app.add_subcommand(
      "compare", "Tabulate fitted spectra and reconstruction errors");
  c_cmp->add_option("--truth", cmp.truth, "Reference trajectory CSV")
      ->required();
  c_cmp->add_option("--fit", cmp.fits,
                    "name=estimate.json (repeatable)");
  c_cmp->add_option("--recon", cmp.recons,
                    "name=trajectory.csv (repeatable)");
  c_cmp->add_option("--out", cmp.out, "Summary CSV path");
  c_cmp->add_option("--long", cmp.long_out, "Long-format CSV path");
  c_cmp->add_option("--timings", cmp.timings_path,
                    "timings.json from a run (fills the wall_ms column)");
  c_cmp->callback([&cmp] { run_compare(cmp); });

  RunOpts run;
  CLI::App* c_run = app.add_subcommand(
      "run", "Execute a full experiment described by a spec file");
  c_run->add_option("spec", run.spec_path, "Experiment spec (key = value)")
      ->required();
  c_run->add_option("--out-dir", run.out_dir, "Override the spec out_dir");
  c_run->callback([&run] { run_run(run); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
