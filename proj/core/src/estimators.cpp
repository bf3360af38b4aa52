#include "rdmd/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "rdmd/errors.hpp"

namespace rdmd {
namespace {

constexpr double kMadConsistency = 1.4826;
constexpr double kScaleFloorRel = 1e-12;
constexpr double kScaleFloorAbs = 1e-300;

void check_config(const HuberConfig& cfg) {
  if (!(cfg.delta > 0.0)) throw InvalidInputError("huber: delta must be > 0");
  if (!(cfg.b > 0.0)) throw InvalidInputError("huber: b must be > 0");
  if (!(cfg.irls_tol > 0.0)) throw InvalidInputError("huber: irls_tol must be > 0");
  if (cfg.max_iter < 1) throw InvalidInputError("huber: max_iter must be >= 1");
  if (!(cfg.bm > 0.0)) throw InvalidInputError("huber: bm must be > 0");
  if (!(cfg.gamma >= 0.0)) throw InvalidInputError("huber: gamma must be >= 0");
}

void check_report(const OutlierReport& outliers, Eigen::Index n) {
  if (static_cast<Eigen::Index>(outliers.weights.size()) != n) {
    throw InvalidInputError(
        "outlier report covers " + std::to_string(outliers.weights.size()) +
        " transitions but the data has " + std::to_string(n));
  }
  for (double w : outliers.weights) {
    if (!(w > 0.0) || w > 1.0) {
      throw InvalidInputError("outlier weights must lie in (0, 1]");
    }
  }
}

// Minimum-norm least-squares solve of D x = rhs (column-wise).
Eigen::MatrixXd lstsq(const Eigen::MatrixXd& design, const Eigen::MatrixXd& rhs,
                      Eigen::Index* rank_out = nullptr) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  if (rank_out) *rank_out = cod.rank();
  return cod.solve(rhs);
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& mat) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(mat)
      .pseudoInverse();
}

// Standardized-residual Huber cost: sum_k w_k^2 rho(u_k) with
// u_k = r_k / (s * w_k); used with per-row scalars and with column norms.
double huber_objective(const Eigen::VectorXd& magnitudes,
                       const std::vector<double>& w, double s, double delta) {
  double j = 0.0;
  for (Eigen::Index k = 0; k < magnitudes.size(); ++k) {
    const double wk = w[static_cast<std::size_t>(k)];
    j += wk * wk * huber_rho(magnitudes(k) / (s * wk), delta);
  }
  return j;
}

}  // namespace

double huber_rho(double r, double delta) {
  const double a = std::abs(r);
  if (a <= delta) return 0.5 * r * r;
  return delta * a - 0.5 * delta * delta;
}

double huber_psi(double r, double delta) {
  if (std::abs(r) <= delta) return r;
  return r > 0.0 ? delta : -delta;
}

double huber_weight(double u, double delta) {
  const double a = std::abs(u);
  if (a <= delta) return 1.0;  // covers u == 0 without a 0/0
  return delta / a;
}

double robust_scale(std::span<const double> magnitudes, double bm,
                    std::vector<std::string>* warnings) {
  if (!(bm > 0.0)) throw InvalidInputError("robust_scale: bm must be > 0");
  if (magnitudes.empty()) {
    throw InsufficientDataError("robust_scale: no residuals");
  }
  double max_mag = 0.0;
  for (double v : magnitudes) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInputError("robust_scale: magnitudes must be finite and >= 0");
    }
    max_mag = std::max(max_mag, v);
  }
  const double raw = kMadConsistency * bm * median(magnitudes);
  const double floor =
      max_mag > 0.0 ? kScaleFloorRel * max_mag : kScaleFloorAbs;
  if (raw < floor) {
    if (warnings) {
      warnings->push_back(
          "robust_scale: residual scale " + std::to_string(raw) +
          " is degenerate (near-exact fit); floored at " +
          std::to_string(floor));
    }
    return floor;
  }
  return raw;
}

Eigen::MatrixXd OperatorEstimate::full_operator() const {
  if (!reduced()) return A;
  return T * A * pinv(T);
}

Residuals residuals(const SnapshotPair& pair, const Eigen::MatrixXd& A_full) {
  if (A_full.rows() != pair.dim() || A_full.cols() != pair.dim()) {
    throw InvalidInputError("residuals: operator shape does not match data");
  }
  Residuals res;
  res.R = pair.Yp - A_full * pair.Y;
  res.norms = res.R.colwise().norm();
  return res;
}

OperatorEstimate exact_dmd(const SnapshotPair& pair) {
  if (pair.count() < 1) throw InsufficientDataError("exact_dmd: no snapshots");

  // A Y = Y'  <=>  Y^T A^T = Y'^T; solve as least squares on the tall/wide
  // system instead of forming Y Y^T and inverting it.
  Eigen::Index rank = 0;
  const Eigen::MatrixXd at =
      lstsq(pair.Y.transpose(), pair.Yp.transpose(), &rank);

  OperatorEstimate est;
  est.A = at.transpose();
  est.method = "dmd";
  est.dt = pair.dt;
  if (rank < pair.dim()) {
    est.warnings.push_back(
        "exact_dmd: snapshot matrix has rank " + std::to_string(rank) +
        " < state dimension " + std::to_string(pair.dim()) +
        "; returning the minimum-norm solution");
  }
  return est;
}

OperatorEstimate standard_dmd(const SnapshotPair& pair, int rank) {
  if (pair.count() < 1) throw InsufficientDataError("standard_dmd: no snapshots");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(pair.Y,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  if (!(smax > 0.0)) {
    throw NumericalError("standard_dmd: snapshot matrix is zero");
  }

  const double floor = 1e-12 * smax;
  Eigen::Index numerical_rank = 0;
  while (numerical_rank < sigma.size() && sigma(numerical_rank) > floor) {
    ++numerical_rank;
  }

  OperatorEstimate est;
  Eigen::Index r = numerical_rank;
  if (rank > 0) {
    if (rank > numerical_rank) {
      throw InvalidInputError(
          "standard_dmd: requested rank " + std::to_string(rank) +
          " exceeds the numerical rank " + std::to_string(numerical_rank) +
          " of the snapshot matrix; at most " + std::to_string(numerical_rank) +
          " directions survive truncation");
    }
    r = rank;
  }
  if (r < sigma.size() && rank <= 0) {
    est.warnings.push_back(
        "standard_dmd: dropped " + std::to_string(sigma.size() - r) +
        " singular value(s) below 1e-12 * sigma_max");
  }

  const Eigen::MatrixXd u = svd.matrixU().leftCols(r);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(r);
  const Eigen::VectorXd sinv = sigma.head(r).cwiseInverse();

  est.A = u.transpose() * pair.Yp * v * sinv.asDiagonal();
  est.T = u;
  est.method = "standard";
  est.dt = pair.dt;
  return est;
}

OperatorEstimate krdmd(const SnapshotPair& pair, const HuberConfig& cfg,
                       const OutlierReport& outliers) {
  check_config(cfg);
  check_report(outliers, pair.count());
  const Eigen::Index m = pair.dim();
  const Eigen::Index n = pair.count();
  const std::vector<double>& w = outliers.weights;

  OperatorEstimate init = exact_dmd(pair);
  OperatorEstimate est;
  est.method = "krdmd";
  est.dt = pair.dt;
  est.config = cfg;
  est.outliers = outliers;
  est.warnings = std::move(init.warnings);
  est.A.resize(m, m);

  const Eigen::MatrixXd yt = pair.Y.transpose();  // n x m design, shared
  std::vector<double> row_scales(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> row_traces(static_cast<std::size_t>(m));
  int floored_rows = 0;
  int deficient_sweeps = 0;
  int max_sweeps = 0;
  bool all_converged = true;

  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd target = pair.Yp.row(i).transpose();
    Eigen::VectorXd a = init.A.row(i).transpose();
    Eigen::VectorXd r = target - yt * a;

    const auto row_scale = [&](bool* floored) {
      std::vector<std::string> warn;
      const double value = robust_scale(
          std::span<const double>(r.cwiseAbs().eval().data(),
                                  static_cast<std::size_t>(n)),
          cfg.bm, &warn);
      if (floored) *floored = !warn.empty();
      return value;
    };

    bool floored = false;
    double s = row_scale(&floored);

    auto& trace = row_traces[static_cast<std::size_t>(i)];
    bool converged = false;
    int sweeps = 0;

    // One reweighted solve at the current scale; updates a and r in place.
    const auto sweep = [&]() {
      Eigen::VectorXd q(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        const double u = r(k) / (s * w[static_cast<std::size_t>(k)]);
        q(k) = huber_weight(u, cfg.delta);
      }
      const Eigen::VectorXd sq = q.cwiseSqrt();
      Eigen::Index sweep_rank = 0;
      const Eigen::VectorXd a_new =
          lstsq(sq.asDiagonal() * yt, sq.asDiagonal() * target, &sweep_rank);
      if (sweep_rank < m) ++deficient_sweeps;
      const double step = (a_new - a).norm();
      a = a_new;
      r = target - yt * a;
      ++sweeps;
      return step;
    };

    // Tracking pass: the scale follows the residuals of each new iterate and
    // the absolute step rule decides when the pair (coefficients, scale) has
    // settled.
    if (!cfg.freeze_scale) {
      while (sweeps < cfg.max_iter) {
        const double step = sweep();
        s = row_scale(&floored);
        if (step <= cfg.irls_tol) break;
      }
    }

    // Fixed-scale pass: with s held constant every reweighted solve decreases
    // the objective, so the recorded trace is nonincreasing.
    trace.push_back(huber_objective(r.cwiseAbs(), w, s, cfg.delta));
    while (sweeps < cfg.max_iter) {
      const double step = sweep();
      trace.push_back(huber_objective(r.cwiseAbs(), w, s, cfg.delta));
      if (step <= cfg.irls_tol) {
        converged = true;
        break;
      }
    }

    if (floored) ++floored_rows;
    est.A.row(i) = a.transpose();
    row_scales[static_cast<std::size_t>(i)] = s;
    max_sweeps = std::max(max_sweeps, sweeps);
    all_converged = all_converged && converged;
  }

  if (floored_rows > 0) {
    est.warnings.push_back("krdmd: " + std::to_string(floored_rows) +
                           " row(s) hit the residual scale floor "
                           "(near-exact fit)");
  }
  if (!all_converged) {
    est.warnings.push_back(
        "krdmd: at least one row used the full iteration budget without "
        "meeting the step tolerance");
  }
  if (deficient_sweeps > 0) {
    est.warnings.push_back(
        "krdmd: weighted normal system was rank deficient in " +
        std::to_string(deficient_sweeps) +
        " sweep(s); minimum-norm pseudo-inverse step used");
  }

  // Combined objective: sum of the per-row costs, rows that stopped early
  // contributing their final value onward.
  est.objective_trace.assign(static_cast<std::size_t>(max_sweeps) + 1, 0.0);
  for (const auto& trace : row_traces) {
    for (std::size_t t = 0; t <= static_cast<std::size_t>(max_sweeps); ++t) {
      est.objective_trace[t] += t < trace.size() ? trace[t] : trace.back();
    }
  }
  est.iterations = max_sweeps;
  est.converged = all_converged;
  est.scale = median(row_scales);
  return est;
}

OperatorEstimate nrdmd(const SnapshotPair& pair, const HuberConfig& cfg,
                       const OutlierReport& outliers) {
  check_config(cfg);
  check_report(outliers, pair.count());
  const Eigen::Index n = pair.count();
  const std::vector<double>& w = outliers.weights;

  OperatorEstimate init = exact_dmd(pair);
  OperatorEstimate est;
  est.method = "nrdmd";
  est.dt = pair.dt;
  est.config = cfg;
  est.outliers = outliers;
  est.warnings = std::move(init.warnings);

  Eigen::MatrixXd a = std::move(init.A);
  Eigen::MatrixXd r = pair.Yp - a * pair.Y;
  Eigen::VectorXd norms = r.colwise().norm();

  bool floored = false;
  const auto col_scale = [&]() {
    std::vector<std::string> warn;
    const double value = robust_scale(
        std::span<const double>(norms.data(), static_cast<std::size_t>(n)),
        cfg.bm, &warn);
    floored = !warn.empty();
    return value;
  };
  double s = col_scale();

  const Eigen::MatrixXd yt = pair.Y.transpose();
  const Eigen::MatrixXd ypt = pair.Yp.transpose();
  bool converged = false;
  bool deficiency_warned = false;
  int sweeps = 0;

  const auto sweep = [&]() {
    Eigen::VectorXd q(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double u = norms(k) / (s * w[static_cast<std::size_t>(k)]);
      q(k) = huber_weight(u, cfg.delta);
    }
    const Eigen::VectorXd sq = q.cwiseSqrt();
    Eigen::Index sweep_rank = 0;
    const Eigen::MatrixXd a_new =
        lstsq(sq.asDiagonal() * yt, sq.asDiagonal() * ypt, &sweep_rank)
            .transpose();
    if (sweep_rank < pair.dim() && !deficiency_warned) {
      deficiency_warned = true;
      est.warnings.push_back(
          "nrdmd: weighted normal system rank deficient; minimum-norm "
          "pseudo-inverse step used");
    }
    const double step = (a_new - a).norm();
    a = a_new;
    r = pair.Yp - a * pair.Y;
    norms = r.colwise().norm();
    ++sweeps;
    return step;
  };

  // Tracking pass: the scale follows the residuals of each new iterate.
  if (!cfg.freeze_scale) {
    while (sweeps < cfg.max_iter) {
      const double step = sweep();
      s = col_scale();
      if (step <= cfg.irls_tol) break;
    }
  }

  // Fixed-scale pass: records the (nonincreasing) objective trace.
  est.objective_trace.push_back(huber_objective(norms, w, s, cfg.delta));
  while (sweeps < cfg.max_iter) {
    const double step = sweep();
    est.objective_trace.push_back(huber_objective(norms, w, s, cfg.delta));
    if (step <= cfg.irls_tol) {
      converged = true;
      break;
    }
  }
  if (floored) {
    est.warnings.push_back(
        "nrdmd: residual scale sits at its numerical floor (near-exact fit)");
  }
  if (!converged) {
    est.warnings.push_back(
        "nrdmd: iteration budget exhausted before the step tolerance was met");
  }

  est.A = std::move(a);
  est.iterations = sweeps;
  est.converged = converged;
  est.scale = s;
  return est;
}

OperatorEstimate robust_standard_dmd(const SnapshotPair& pair,
                                     const Eigen::MatrixXd& basis,
                                     const HuberConfig& cfg,
                                     const OutlierReport& outliers) {
  check_config(cfg);
  check_report(outliers, pair.count());
  const Eigen::Index m = pair.dim();
  const Eigen::Index n = pair.count();
  const Eigen::Index c = basis.cols();
  const std::vector<double>& w = outliers.weights;

  if (basis.rows() != m) {
    throw InvalidInputError("robust_standard_dmd: basis rows != state dim");
  }
  if (c < 1) throw InvalidInputError("robust_standard_dmd: empty basis");
  if (c >= m) {
    throw InvalidInputError(
        "robust_standard_dmd: reduced dimension " + std::to_string(c) +
        " must be strictly less than the state dimension " +
        std::to_string(m) + "; a square basis makes T T^+ the identity and "
        "removes the robustness of the fit");
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> basis_cod(basis);
  if (basis_cod.rank() < c) {
    throw InvalidInputError("robust_standard_dmd: basis is rank deficient");
  }
  const Eigen::MatrixXd tp = basis_cod.pseudoInverse();  // c x m

  OperatorEstimate est;
  est.method = "robust-standard";
  est.dt = pair.dt;
  est.config = cfg;
  est.T = basis;
  est.outliers = outliers;

  // Ridge gamma scaled by the mean diagonal of the unweighted reduced
  // normal matrix, so the knob is dimensionless.
  const Eigen::MatrixXd yt_t = pair.Y.transpose() * basis;    // n x c
  const Eigen::MatrixXd ypt_t = pair.Yp.transpose() * basis;  // n x c
  const double norm_trace = (tp * pair.Y * yt_t).trace();
  const double gamma_eff =
      cfg.gamma * std::max(norm_trace, 0.0) / static_cast<double>(c);
  const double gamma2 = gamma_eff * gamma_eff;

  const auto sweep_update = [&](const Eigen::VectorXd& q) {
    // (T^+ Y' Q Y^T T) (T^+ Y Q Y^T T + gamma^2 I)^{-1}
    const Eigen::MatrixXd numer = tp * pair.Yp * (q.asDiagonal() * yt_t);
    Eigen::MatrixXd denom = tp * pair.Y * (q.asDiagonal() * yt_t);
    denom.diagonal().array() += gamma2;
    // A = numer * denom^{-1}  <=>  denom^T A^T = numer^T
    Eigen::MatrixXd a_new = Eigen::PartialPivLU<Eigen::MatrixXd>(
                                denom.transpose())
                                .solve(numer.transpose())
                                .transpose();
    if (!a_new.allFinite()) {
      // Only reachable with gamma = 0 and a rank-deficient reduced system.
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
          denom.transpose());
      a_new = cod.solve(numer.transpose()).transpose();
      if (!a_new.allFinite()) {
        throw NumericalError(
            "robust_standard_dmd: reduced normal matrix is singular; "
            "increase gamma");
      }
    }
    return a_new;
  };

  Eigen::MatrixXd a = sweep_update(Eigen::VectorXd::Ones(n));
  const auto full_residual_norms = [&](const Eigen::MatrixXd& a_red) {
    return (pair.Yp - basis * a_red * (tp * pair.Y)).colwise().norm().eval();
  };
  Eigen::VectorXd norms = full_residual_norms(a);

  bool floored = false;
  const auto col_scale = [&]() {
    std::vector<std::string> warn;
    const double value = robust_scale(
        std::span<const double>(norms.data(), static_cast<std::size_t>(n)),
        cfg.bm, &warn);
    floored = !warn.empty();
    return value;
  };
  double s = col_scale();

  bool converged = false;
  int sweeps = 0;

  const auto sweep = [&]() {
    Eigen::VectorXd q(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double u = norms(k) / (s * w[static_cast<std::size_t>(k)]);
      q(k) = huber_weight(u, cfg.delta);
    }
    const Eigen::MatrixXd a_new = sweep_update(q);
    const double step = (a_new - a).norm();
    a = a_new;
    norms = full_residual_norms(a);
    ++sweeps;
    return step;
  };

  // Tracking pass: the scale follows the residuals of each new iterate.
  if (!cfg.freeze_scale) {
    while (sweeps < cfg.max_iter) {
      const double step = sweep();
      s = col_scale();
      if (step <= cfg.irls_tol) break;
    }
  }

  // Fixed-scale pass: records the (nonincreasing) objective trace.
  est.objective_trace.push_back(huber_objective(norms, w, s, cfg.delta));
  while (sweeps < cfg.max_iter) {
    const double step = sweep();
    est.objective_trace.push_back(huber_objective(norms, w, s, cfg.delta));
    if (step <= cfg.irls_tol) {
      converged = true;
      break;
    }
  }
  if (floored) {
    est.warnings.push_back(
        "robust_standard_dmd: residual scale sits at its numerical floor "
        "(near-exact fit)");
  }
  if (!converged) {
    est.warnings.push_back(
        "robust_standard_dmd: iteration budget exhausted before the step "
        "tolerance was met");
  }

  est.A = std::move(a);
  est.iterations = sweeps;
  est.converged = converged;
  est.scale = s;
  return est;
}

OperatorEstimate robust_standard_dmd(const SnapshotPair& pair, int rank,
                                     const HuberConfig& cfg,
                                     const OutlierReport& outliers) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(pair.Y, Eigen::ComputeThinU);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  if (!(smax > 0.0)) {
    throw NumericalError("robust_standard_dmd: snapshot matrix is zero");
  }
  Eigen::Index numerical_rank = 0;
  while (numerical_rank < sigma.size() &&
         sigma(numerical_rank) > 1e-12 * smax) {
    ++numerical_rank;
  }
  Eigen::Index r = rank;
  if (rank <= 0) {
    // Auto choice: keep every informative direction while preserving the
    // c' < m robustness condition.
    r = std::min(numerical_rank, pair.dim() - 1);
  } else if (rank > numerical_rank) {
    throw InvalidInputError(
        "robust_standard_dmd: requested rank " + std::to_string(rank) +
        " exceeds the numerical rank " + std::to_string(numerical_rank) +
        " of the snapshot matrix");
  }
  if (r < 1) {
    throw InvalidInputError("robust_standard_dmd: no usable reduced rank");
  }
  return robust_standard_dmd(pair, svd.matrixU().leftCols(r).eval(), cfg,
                             outliers);
}

}  // namespace rdmd
