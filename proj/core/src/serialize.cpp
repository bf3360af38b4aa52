#include "rdmd/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rdmd/errors.hpp"

namespace rdmd {
namespace {

using nlohmann::json;

const char* scale_kind_name(ScaleEstimatorKind kind) {
  return kind == ScaleEstimatorKind::MadS1 ? "s1" : "s2";
}

ScaleEstimatorKind scale_kind_from_name(const std::string& name) {
  if (name == "s1") return ScaleEstimatorKind::MadS1;
  if (name == "s2") return ScaleEstimatorKind::QnS2;
  throw ParseError("unknown scale estimator '" + name + "'");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty()) {
    throw ParseError(what + ": expected a non-empty array of rows");
  }
  const std::size_t ncols = rows[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != ncols) {
      throw ParseError(what + ": ragged row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < ncols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j].get<double>();
    }
  }
  return m;
}

json complex_to_json(const std::complex<double>& z) {
  json obj;
  // Non-finite parts (the -inf decay-rate sentinel) serialize as null.
  if (std::isfinite(z.real())) {
    obj["re"] = z.real();
  } else {
    obj["re"] = nullptr;
  }
  if (std::isfinite(z.imag())) {
    obj["im"] = z.imag();
  } else {
    obj["im"] = nullptr;
  }
  return obj;
}

json report_to_json(const OutlierReport& report) {
  json j;
  j["d_ps"] = report.d_ps;
  j["weights"] = report.weights;
  json flags = json::array();
  for (char f : report.flags) flags.push_back(f != 0);
  j["flags"] = std::move(flags);
  j["threshold"] = report.threshold;
  j["dof"] = report.dof;
  j["quantile"] = report.quantile;
  j["b"] = report.b;
  j["scale_estimator"] = scale_kind_name(report.scale_estimator);
  j["warnings"] = report.warnings;
  return j;
}

OutlierReport report_from_json(const json& j) {
  OutlierReport report;
  report.d_ps = j.at("d_ps").get<std::vector<double>>();
  report.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& f : j.at("flags")) report.flags.push_back(f.get<bool>() ? 1 : 0);
  report.threshold = j.at("threshold").get<double>();
  report.dof = j.at("dof").get<int>();
  report.quantile = j.value("quantile", 0.975);
  report.b = j.at("b").get<double>();
  report.scale_estimator =
      scale_kind_from_name(j.at("scale_estimator").get<std::string>());
  report.warnings = j.value("warnings", std::vector<std::string>{});
  return report;
}

json spectrum_to_json_obj(const Spectrum& sp) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "spectrum";
  json disc = json::array();
  json cont = json::array();
  for (Eigen::Index i = 0; i < sp.count(); ++i) {
    disc.push_back(complex_to_json(sp.eig_discrete(i)));
    cont.push_back(complex_to_json(sp.eig_continuous(i)));
  }
  j["discrete"] = std::move(disc);
  j["continuous"] = std::move(cont);
  json modes = json::array();
  for (Eigen::Index c = 0; c < sp.modes.cols(); ++c) {
    json mode = json::array();
    for (Eigen::Index r = 0; r < sp.modes.rows(); ++r) {
      mode.push_back(complex_to_json(sp.modes(r, c)));
    }
    modes.push_back(std::move(mode));
  }
  j["modes"] = std::move(modes);
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string to_json_string(const OutlierReport& report) {
  json j = report_to_json(report);
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "outlier_report";
  return dump(j);
}

std::string to_json_string(const Spectrum& sp) {
  return dump(spectrum_to_json_obj(sp));
}

std::string to_json_string(const OperatorEstimate& est) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "operator_estimate";
  j["method"] = est.method;
  j["dt"] = est.dt;
  j["dim"] = est.reduced() ? est.T.rows() : est.A.rows();
  j["reduced_dim"] = est.reduced() ? est.A.rows() : 0;
  j["A"] = matrix_to_json(est.A);
  if (est.reduced()) {
    j["T"] = matrix_to_json(est.T);
  } else {
    j["T"] = nullptr;
  }
  j["iterations"] = est.iterations;
  j["converged"] = est.converged;
  j["scale"] = est.scale;
  const bool robust = est.method == "krdmd" || est.method == "nrdmd" ||
                      est.method == "robust-standard";
  if (robust) {
    json cfg;
    cfg["delta"] = est.config.delta;
    cfg["b"] = est.config.b;
    cfg["tol"] = est.config.irls_tol;
    cfg["max_iter"] = est.config.max_iter;
    cfg["bm"] = est.config.bm;
    cfg["gamma"] = est.config.gamma;
    cfg["freeze_scale"] = est.config.freeze_scale;
    j["config"] = std::move(cfg);
  } else {
    j["config"] = nullptr;
  }
  j["objective_trace"] = est.objective_trace;
  if (est.outliers.d_ps.empty()) {
    j["outliers"] = nullptr;
  } else {
    j["outliers"] = report_to_json(est.outliers);
  }
  j["warnings"] = est.warnings;
  if (est.A.rows() == est.A.cols() && est.dt > 0.0) {
    j["spectrum"] = spectrum_to_json_obj(spectrum(est));
  }
  return dump(j);
}

OperatorEstimate estimate_from_json(const std::string& text,
                                    const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    if (j.value("kind", "") != "operator_estimate") {
      throw ParseError(origin + ": not an operator_estimate document");
    }
    OperatorEstimate est;
    est.method = j.at("method").get<std::string>();
    est.dt = j.at("dt").get<double>();
    est.A = matrix_from_json(j.at("A"), origin + ": A");
    if (j.contains("T") && !j["T"].is_null()) {
      est.T = matrix_from_json(j["T"], origin + ": T");
    }
    est.iterations = j.value("iterations", 0);
    est.converged = j.value("converged", true);
    est.scale = j.value("scale", 0.0);
    if (j.contains("config") && !j["config"].is_null()) {
      const json& cfg = j["config"];
      est.config.delta = cfg.value("delta", est.config.delta);
      est.config.b = cfg.value("b", est.config.b);
      est.config.irls_tol = cfg.value("tol", est.config.irls_tol);
      est.config.max_iter = cfg.value("max_iter", est.config.max_iter);
      est.config.bm = cfg.value("bm", est.config.bm);
      est.config.gamma = cfg.value("gamma", est.config.gamma);
      est.config.freeze_scale =
          cfg.value("freeze_scale", est.config.freeze_scale);
    }
    est.objective_trace = j.value("objective_trace", std::vector<double>{});
    if (j.contains("outliers") && !j["outliers"].is_null()) {
      est.outliers = report_from_json(j["outliers"]);
    }
    est.warnings = j.value("warnings", std::vector<std::string>{});
    return est;
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

OperatorEstimate read_estimate(const std::string& path) {
  return estimate_from_json(read_text_file(path), path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << content;
  if (!out) throw Error(path + ": write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string reconstruction_csv(const ReconstructionResult& recon,
                               const std::vector<std::string>& labels) {
  const Eigen::Index dim = recon.trajectory.rows();
  const bool with_error = recon.cumulative_error.size() > 0;
  const auto g17 = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  std::string out = "t";
  for (Eigen::Index i = 0; i < dim; ++i) {
    out += ',';
    out += static_cast<Eigen::Index>(labels.size()) == dim
               ? labels[static_cast<std::size_t>(i)]
               : "x" + std::to_string(i + 1);
  }
  if (with_error) out += ",cum_err";
  out += '\n';
  for (Eigen::Index k = 0; k < recon.trajectory.cols(); ++k) {
    out += g17(recon.dt * static_cast<double>(k));
    for (Eigen::Index i = 0; i < dim; ++i) {
      out += ',';
      out += g17(recon.trajectory(i, k));
    }
    if (with_error) {
      out += ',';
      out += g17(recon.cumulative_error(k));
    }
    out += '\n';
  }
  return out;
}

std::string content_hash(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rdmd
