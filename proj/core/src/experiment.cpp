#include "rdmd/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "rdmd/errors.hpp"
#include "rdmd/modal.hpp"
#include "rdmd/rng.hpp"
#include "rdmd/serialize.hpp"
#include "rdmd/version.hpp"

namespace rdmd {
namespace {

using nlohmann::json;

const std::vector<std::string> kKnownMethods = {
    "dmd", "standard", "krdmd", "nrdmd", "robust-standard"};

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::stringstream ss(s);
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

double parse_double(const std::string& value, const std::string& key) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw ParseError("key '" + key + "': cannot parse '" + value +
                     "' as a number");
  }
  return out;
}

long parse_int(const std::string& value, const std::string& key) {
  long out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw ParseError("key '" + key + "': cannot parse '" + value +
                     "' as an integer");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw ParseError("key '" + key + "': cannot parse '" + value +
                     "' as an unsigned integer");
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") {
    return true;
  }
  if (value == "false" || value == "0" || value == "off" || value == "no") {
    return false;
  }
  throw ParseError("key '" + key + "': cannot parse '" + value +
                   "' as a boolean");
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentSpec parse_experiment_text(const std::string& text,
                                     const std::string& origin) {
  ExperimentSpec spec;
  SpikePlan spike;
  bool spike_enabled = false;

  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ": line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "system") {
      spec.system = value;
    } else if (key == "dim") {
      spec.dim = static_cast<int>(parse_int(value, key));
    } else if (key == "oscillators") {
      spec.oscillators = static_cast<int>(parse_int(value, key));
    } else if (key == "damping") {
      spec.damping = parse_double(value, key);
    } else if (key == "sm_mu") {
      spec.sm_mu = parse_double(value, key);
    } else if (key == "sm_lambda") {
      spec.sm_lambda = parse_double(value, key);
    } else if (key == "vdp_mu") {
      spec.vdp_mu = parse_double(value, key);
    } else if (key == "vdp_no_restoring") {
      spec.vdp_no_restoring = parse_bool(value, key);
    } else if (key == "dt") {
      spec.dt = parse_double(value, key);
    } else if (key == "steps") {
      spec.steps = static_cast<int>(parse_int(value, key));
    } else if (key == "x0") {
      spec.x0.clear();
      for (const std::string& part : split(value, ',')) {
        spec.x0.push_back(parse_double(part, key));
      }
    } else if (key == "seed") {
      spec.seed = parse_u64(value, key);
    } else if (key == "noise") {
      try {
        spec.plan.noise = noise_kind_from_name(value);
      } catch (const Error& e) {
        throw ParseError(origin + ": key 'noise': " + e.what());
      }
    } else if (key == "noise_sigma") {
      spec.plan.gaussian_sigma = parse_double(value, key);
    } else if (key == "noise_variance") {
      spec.plan.laplace_variance = parse_double(value, key);
    } else if (key == "noise_dof") {
      spec.plan.student_dof = static_cast<int>(parse_int(value, key));
    } else if (key == "noise_gamma") {
      spec.plan.cauchy_gamma = parse_double(value, key);
    } else if (key == "window") {
      const std::vector<std::string> parts = split(value, ':');
      if (parts.size() != 3) {
        throw ParseError(origin +
                         ": key 'window': expected 'start:end:magnitude'");
      }
      OutlierWindow win;
      win.t_start = parse_double(parts[0], key);
      win.t_end = parse_double(parts[1], key);
      win.magnitude = parse_double(parts[2], key);
      spec.plan.windows.push_back(win);
    } else if (key == "spike") {
      spike_enabled = parse_bool(value, key);
    } else if (key == "spike_mu") {
      spike.mu = parse_double(value, key);
    } else if (key == "spike_p") {
      spike.p = parse_double(value, key);
    } else if (key == "spike_eta") {
      spike.eta = parse_double(value, key);
    } else if (key == "methods") {
      spec.methods = split(value, ',');
      for (const std::string& m : spec.methods) {
        if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) ==
            kKnownMethods.end()) {
          throw ParseError(origin + ": key 'methods': unknown method '" + m +
                           "'");
        }
      }
      if (spec.methods.empty()) {
        throw ParseError(origin + ": key 'methods': empty list");
      }
    } else if (key == "rank") {
      spec.rank = static_cast<int>(parse_int(value, key));
    } else if (key == "delta") {
      spec.huber.delta = parse_double(value, key);
    } else if (key == "b") {
      spec.huber.b = parse_double(value, key);
    } else if (key == "irls_tol") {
      spec.huber.irls_tol = parse_double(value, key);
    } else if (key == "max_iter") {
      spec.huber.max_iter = static_cast<int>(parse_int(value, key));
    } else if (key == "bm") {
      spec.huber.bm = parse_double(value, key);
    } else if (key == "gamma") {
      spec.huber.gamma = parse_double(value, key);
    } else if (key == "freeze_scale") {
      spec.huber.freeze_scale = parse_bool(value, key);
    } else if (key == "scale_estimator") {
      if (value == "s1") {
        spec.scale_estimator = ScaleEstimatorKind::MadS1;
      } else if (value == "s2") {
        spec.scale_estimator = ScaleEstimatorKind::QnS2;
      } else {
        throw ParseError(origin +
                         ": key 'scale_estimator': expected s1 or s2");
      }
    } else if (key == "quantile") {
      spec.quantile = parse_double(value, key);
    } else if (key == "dof") {
      spec.dof = static_cast<int>(parse_int(value, key));
    } else if (key == "reconstruct") {
      if (value != "free_run" && value != "one_step" && value != "none") {
        throw ParseError(origin +
                         ": key 'reconstruct': expected free_run, one_step "
                         "or none");
      }
      spec.reconstruct_mode = value;
    } else if (key == "out_dir") {
      spec.out_dir = value;
    } else {
      throw ParseError(origin + ": line " + std::to_string(line_no) +
                       ": unknown key '" + key + "'");
    }
  }

  if (spike_enabled) spec.plan.spike = spike;
  return spec;
}

ExperimentSpec parse_experiment(const std::string& path) {
  return parse_experiment_text(read_text_file(path), path);
}

BenchmarkSystem build_system(const ExperimentSpec& spec) {
  if (spec.system == "linear2x2") return make_linear2x2();
  if (spec.system == "ring") return make_ring(spec.oscillators, spec.damping);
  if (spec.system == "slow_manifold") {
    return make_slow_manifold(spec.sm_mu, spec.sm_lambda);
  }
  if (spec.system == "van_der_pol") {
    return make_van_der_pol(spec.vdp_mu, spec.vdp_no_restoring);
  }
  if (spec.system == "random_linear") {
    return make_random_linear(spec.dim, Rng(spec.seed).child(3).seed());
  }
  if (spec.system == "generalized_slow_manifold") {
    return make_generalized_slow_manifold(spec.dim,
                                          Rng(spec.seed).child(3).seed());
  }
  throw InvalidInputError("unknown system '" + spec.system + "'");
}

std::string resolved_text(const ExperimentSpec& spec) {
  std::string out;
  const auto put = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  put("system", spec.system);
  put("dim", std::to_string(spec.dim));
  put("oscillators", std::to_string(spec.oscillators));
  put("damping", g17(spec.damping));
  put("sm_mu", g17(spec.sm_mu));
  put("sm_lambda", g17(spec.sm_lambda));
  put("vdp_mu", g17(spec.vdp_mu));
  put("vdp_no_restoring", spec.vdp_no_restoring ? "true" : "false");
  put("dt", g17(spec.dt));
  put("steps", std::to_string(spec.steps));
  {
    std::vector<double> x0 = spec.x0;
    if (x0.empty()) {
      const Eigen::VectorXd d = build_system(spec).default_x0();
      x0.assign(d.data(), d.data() + d.size());
    }
    std::string joined;
    for (std::size_t i = 0; i < x0.size(); ++i) {
      if (i) joined += ',';
      joined += g17(x0[i]);
    }
    put("x0", joined);
  }
  put("seed", std::to_string(spec.seed));
  put("noise", noise_kind_name(spec.plan.noise));
  put("noise_sigma", g17(spec.plan.gaussian_sigma));
  put("noise_variance", g17(spec.plan.laplace_variance));
  put("noise_dof", std::to_string(spec.plan.student_dof));
  put("noise_gamma", g17(spec.plan.cauchy_gamma));
  for (const OutlierWindow& win : spec.plan.windows) {
    put("window", g17(win.t_start) + ":" + g17(win.t_end) + ":" +
                      g17(win.magnitude));
  }
  put("spike", spec.plan.spike.has_value() ? "true" : "false");
  {
    const SpikePlan sp = spec.plan.spike.value_or(SpikePlan{});
    put("spike_mu", g17(sp.mu));
    put("spike_p", g17(sp.p));
    put("spike_eta", g17(sp.eta));
  }
  {
    std::string joined;
    for (std::size_t i = 0; i < spec.methods.size(); ++i) {
      if (i) joined += ',';
      joined += spec.methods[i];
    }
    put("methods", joined);
  }
  put("rank", std::to_string(spec.rank));
  put("delta", g17(spec.huber.delta));
  put("b", g17(spec.huber.b));
  put("irls_tol", g17(spec.huber.irls_tol));
  put("max_iter", std::to_string(spec.huber.max_iter));
  put("bm", g17(spec.huber.bm));
  put("gamma", g17(spec.huber.gamma));
  put("freeze_scale", spec.huber.freeze_scale ? "true" : "false");
  put("scale_estimator",
      spec.scale_estimator == ScaleEstimatorKind::MadS1 ? "s1" : "s2");
  put("quantile", g17(spec.quantile));
  put("dof", std::to_string(spec.dof));
  put("reconstruct", spec.reconstruct_mode);
  put("out_dir", spec.out_dir);
  return out;
}

RunOutcome run_experiment(const ExperimentSpec& spec,
                          const std::string& spec_text) {
  namespace fs = std::filesystem;
  using clock = std::chrono::steady_clock;

  fs::create_directories(spec.out_dir);

  RunOutcome outcome;
  outcome.out_dir = spec.out_dir;
  std::vector<std::pair<std::string, std::string>> hashed_files;
  std::map<std::string, double> wall_ms;

  const auto emit = [&](const std::string& rel, const std::string& content) {
    write_text_file((fs::path(spec.out_dir) / rel).string(), content);
    hashed_files.emplace_back(rel, content_hash(content));
    outcome.files.push_back(rel);
  };
  const auto timed = [&wall_ms](const std::string& stage, auto&& fn) {
    const auto t0 = clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      wall_ms[stage] =
          std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    } else {
      auto result = fn();
      wall_ms[stage] =
          std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      return result;
    }
  };

  // --- simulate the clean reference and the contaminated data ------------
  const BenchmarkSystem sys = build_system(spec);
  Eigen::VectorXd x0;
  if (spec.x0.empty()) {
    x0 = sys.default_x0();
  } else {
    x0 = Eigen::Map<const Eigen::VectorXd>(
        spec.x0.data(), static_cast<Eigen::Index>(spec.x0.size()));
  }

  const TimeSeries truth = timed(
      "simulate", [&] { return simulate(sys, x0, spec.dt, spec.steps); });
  emit("truth.csv", write_csv_text(truth));

  ContaminationPlan plan = spec.plan;
  plan.seed = spec.seed;
  const TimeSeries data =
      timed("contaminate", [&] { return contaminate(truth, plan); });
  emit("data.csv", write_csv_text(data));

  const SnapshotPair pair = build_pair(data);

  // --- fit every requested method ----------------------------------------
  const bool any_robust =
      std::any_of(spec.methods.begin(), spec.methods.end(),
                  [](const std::string& m) { return m != "dmd" && m != "standard"; });
  OutlierReport report;
  if (any_robust) {
    OutlierOptions opts;
    opts.scale_estimator = spec.scale_estimator;
    opts.b = spec.huber.b;
    opts.quantile = spec.quantile;
    opts.dof = spec.dof;
    report = timed("outlier_weights",
                   [&] { return detect_outliers(pair.Y, pair.Yp, opts); });
  }

  const bool do_recon = spec.reconstruct_mode != "none";
  const ReconMode recon_mode = spec.reconstruct_mode == "one_step"
                                   ? ReconMode::OneStep
                                   : ReconMode::FreeRun;

  json manifest_methods = json::array();
  std::string summary_csv =
      "method,eig1_re,eig1_im,eig2_re,eig2_im,final_cum_err,iterations,"
      "converged\n";
  std::vector<std::pair<std::string, ReconstructionResult>> recons;

  for (const std::string& method : spec.methods) {
    const OperatorEstimate est = timed("fit." + method, [&] {
      if (method == "dmd") return exact_dmd(pair);
      if (method == "standard") return standard_dmd(pair, spec.rank);
      if (method == "krdmd") return krdmd(pair, spec.huber, report);
      if (method == "nrdmd") return nrdmd(pair, spec.huber, report);
      if (method == "robust-standard") {
        return robust_standard_dmd(pair, spec.rank, spec.huber, report);
      }
      throw InvalidInputError("unknown method '" + method + "'");
    });

    emit("fit." + method + ".json", to_json_string(est));
    const Spectrum sp = spectrum(est);
    emit("spectrum." + method + ".json", to_json_string(sp));
    if (method != "dmd" && method != "standard") {
      emit("report." + method + ".json", to_json_string(est.outliers));
    }

    std::string final_err;
    double final_err_value = 0.0;
    if (do_recon) {
      ReconstructionResult recon =
          reconstruct(est, x0, spec.steps, recon_mode, &truth);
      emit("recon." + method + ".csv",
           reconstruction_csv(recon, truth.labels));
      final_err_value =
          recon.cumulative_error(recon.cumulative_error.size() - 1);
      final_err = g17(final_err_value);
      recons.emplace_back(method, std::move(recon));
    }

    const auto eig_or_zero = [&sp](Eigen::Index i) {
      return i < sp.count() ? sp.eig_continuous(i)
                            : std::complex<double>(0.0, 0.0);
    };
    summary_csv += method;
    for (Eigen::Index i = 0; i < 2; ++i) {
      summary_csv += ',' + g17(eig_or_zero(i).real()) + ',' +
                     g17(eig_or_zero(i).imag());
    }
    summary_csv += ',' + final_err;
    summary_csv += ',' + std::to_string(est.iterations);
    summary_csv += est.converged ? ",true\n" : ",false\n";

    json jm;
    jm["method"] = method;
    jm["iterations"] = est.iterations;
    jm["converged"] = est.converged;
    json eigs = json::array();
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(2, sp.count()); ++i) {
      json e;
      const std::complex<double> z = sp.eig_continuous(i);
      if (std::isfinite(z.real())) {
        e["re"] = z.real();
      } else {
        e["re"] = nullptr;
      }
      e["im"] = z.imag();
      eigs.push_back(std::move(e));
    }
    jm["leading_continuous_eigenvalues"] = std::move(eigs);
    if (final_err.empty()) {
      jm["final_cumulative_error"] = nullptr;
    } else {
      jm["final_cumulative_error"] = final_err_value;
    }
    manifest_methods.push_back(std::move(jm));
  }

  emit("summary.csv", summary_csv);

  if (do_recon && !recons.empty()) {
    std::string long_csv = "t,channel,truth";
    for (const auto& [name, recon] : recons) long_csv += ',' + name;
    long_csv += '\n';
    for (Eigen::Index k = 0; k <= spec.steps; ++k) {
      for (Eigen::Index i = 0; i < truth.dim(); ++i) {
        long_csv += g17(truth.time_at(k)) + ',' +
                    truth.labels[static_cast<std::size_t>(i)] + ',' +
                    g17(truth.samples(i, k));
        for (const auto& [name, recon] : recons) {
          long_csv += ',' + g17(recon.trajectory(i, k));
        }
        long_csv += '\n';
      }
    }
    emit("long.csv", long_csv);
  }

  emit("spec_resolved.txt", resolved_text(spec));

  // --- manifest (deterministic) and timings (not) ------------------------
  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["kind"] = "run_manifest";
  manifest["tool_version"] = kVersion;
  manifest["spec_hash"] = content_hash(spec_text);
  manifest["system"] = spec.system;
  manifest["seed"] = spec.seed;
  json files = json::array();
  for (const auto& [rel, hash] : hashed_files) {
    json f;
    f["path"] = rel;
    f["hash"] = hash;
    files.push_back(std::move(f));
  }
  manifest["files"] = std::move(files);
  manifest["methods"] = std::move(manifest_methods);
  emit("manifest.json", manifest.dump(2) + "\n");

  json timings;
  timings["schema_version"] = kSchemaVersion;
  timings["kind"] = "run_timings";
  timings["wall_ms"] = wall_ms;
  write_text_file((fs::path(spec.out_dir) / "timings.json").string(),
                  timings.dump(2) + "\n");
  outcome.files.push_back("timings.json");

  return outcome;
}

}  // namespace rdmd
