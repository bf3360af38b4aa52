#include "rdmd/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rdmd/errors.hpp"

namespace rdmd {
namespace {

// Consistency factors that make the estimators unbiased for the standard
// deviation under normal data.
constexpr double kMadConsistency = 1.4826;
constexpr double kPairwiseConsistency = 1.1926;

void require_finite(std::span<const double> xs, const char* who) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw InvalidInputError(std::string(who) + ": non-finite input value");
    }
  }
}

// k-th smallest (0-based) of a scratch copy.
double order_statistic(std::vector<double> v, std::size_t k) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k),
                   v.end());
  return v[k];
}

}  // namespace

double median(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientDataError("median: empty input");
  require_finite(xs, "median");
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower =
      *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double lomed(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientDataError("lomed: empty input");
  require_finite(xs, "lomed");
  // floor((n+1)/2)-th order statistic, 1-based; (n-1)/2 when 0-based.
  return order_statistic(std::vector<double>(xs.begin(), xs.end()),
                         (xs.size() - 1) / 2);
}

double mad(std::span<const double> xs) {
  const double center = median(xs);
  std::vector<double> dev(xs.size());
  std::transform(xs.begin(), xs.end(), dev.begin(),
                 [center](double x) { return std::abs(x - center); });
  return kMadConsistency * median(dev);
}

double scale_s1(std::span<const double> projections) {
  return mad(projections);
}

double scale_s2(std::span<const double> projections) {
  const std::size_t n = projections.size();
  if (n < 2) throw InsufficientDataError("scale_s2: need at least 2 values");
  require_finite(projections, "scale_s2");

  std::vector<double> x(projections.begin(), projections.end());
  std::sort(x.begin(), x.end());

  // Inner estimate for point k: the h-th smallest of its distances to the
  // other n-1 points, h = floor(n/2).  In sorted order those neighbors form
  // a contiguous window around k; taking `a` of them on the left gives the
  // radius max(x[k]-x[k-a], x[k+h-a]-x[k]).  The left term grows with `a`
  // and the right term shrinks, so the minimum sits where they cross and a
  // binary search finds it.  Every candidate is an actual pairwise
  // difference, so the result matches the quadratic evaluation bit for bit.
  const std::size_t h = n / 2;
  std::vector<double> inner(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = (h > n - 1 - k) ? h - (n - 1 - k) : 0;
    const std::size_t hi = std::min(h, k);
    const auto left = [&](std::size_t a) {
      return a > 0 ? x[k] - x[k - a] : 0.0;
    };
    const auto right = [&](std::size_t a) {
      return h - a > 0 ? x[k + h - a] - x[k] : 0.0;
    };
    // First a in [lo, hi] where the left radius catches up with the right.
    std::size_t first = hi + 1;
    {
      std::size_t a = lo, b = hi;
      while (a <= b) {
        const std::size_t mid = a + (b - a) / 2;
        if (left(mid) >= right(mid)) {
          first = mid;
          if (mid == 0) break;
          b = mid - 1;
        } else {
          a = mid + 1;
        }
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a :
         {first > lo ? first - 1 : lo, std::min(first, hi)}) {
      if (a < lo || a > hi) continue;
      best = std::min(best, std::max(left(a), right(a)));
    }
    inner[k] = best;
  }

  return kPairwiseConsistency * order_statistic(std::move(inner), (n - 1) / 2);
}

Eigen::MatrixXd direction_set(const Eigen::MatrixXd& points) {
  const Eigen::Index d = points.rows();
  const Eigen::Index n = points.cols();
  if (n < 1) throw InsufficientDataError("direction_set: no points");

  Eigen::VectorXd v_med(d);
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = points(i, j);
    v_med(i) = median(row);
  }

  Eigen::MatrixXd dirs(d, n);
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd v = points.col(j) - v_med;
    if (v.isZero(0.0)) continue;  // point sits exactly on the median vector
    dirs.col(kept++) = v;
  }
  dirs.conservativeResize(d, kept);
  return dirs;
}

std::vector<double> projection_statistics(const Eigen::MatrixXd& points,
                                          ScaleEstimatorKind kind,
                                          std::vector<std::string>* warnings) {
  const Eigen::Index n = points.cols();
  if (n < 3) {
    throw InsufficientDataError(
        "projection_statistics: need at least 3 points");
  }
  if (!points.allFinite()) {
    throw InvalidInputError("projection_statistics: non-finite point");
  }

  const Eigen::MatrixXd dirs = direction_set(points);
  std::vector<double> d_ps(static_cast<std::size_t>(n), 0.0);
  if (dirs.cols() == 0) {
    if (warnings) {
      warnings->push_back(
          "projection_statistics: all points coincide with the "
          "coordinate-wise median; outlyingness set to zero");
    }
    return d_ps;
  }

  std::vector<double> proj(static_cast<std::size_t>(n));
  Eigen::Index usable = 0;
  for (Eigen::Index c = 0; c < dirs.cols(); ++c) {
    Eigen::Map<Eigen::VectorXd> pm(proj.data(), n);
    pm = points.transpose() * dirs.col(c);
    const double s = (kind == ScaleEstimatorKind::MadS1) ? scale_s1(proj)
                                                         : scale_s2(proj);
    if (s == 0.0) continue;  // direction carries no spread information
    ++usable;
    const double center = median(proj);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double cand =
          std::abs(proj[static_cast<std::size_t>(k)] - center) / s;
      auto& cur = d_ps[static_cast<std::size_t>(k)];
      cur = std::max(cur, cand);
    }
  }
  if (usable == 0 && warnings) {
    warnings->push_back(
        "projection_statistics: projected spread is zero in every "
        "direction; data is degenerate and outlyingness was set to zero");
  }
  return d_ps;
}

std::vector<double> mahalanobis(const Eigen::MatrixXd& points) {
  const Eigen::Index d = points.rows();
  const Eigen::Index n = points.cols();
  if (n <= d) {
    throw InsufficientDataError(
        "mahalanobis: need more points than dimensions (got " +
        std::to_string(n) + " points in R^" + std::to_string(d) + ")");
  }
  if (!points.allFinite()) {
    throw InvalidInputError("mahalanobis: non-finite point");
  }

  const Eigen::VectorXd mean = points.rowwise().mean();
  const Eigen::MatrixXd centered = points.colwise() - mean;
  const Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) {
    throw NumericalError("mahalanobis: covariance eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double tol = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  if (ev.minCoeff() <= tol) {
    throw NumericalError(
        "mahalanobis: sample covariance is singular (rank-deficient point "
        "cloud); use projection statistics instead");
  }
  const Eigen::MatrixXd inv = es.eigenvectors() *
                              ev.cwiseInverse().asDiagonal() *
                              es.eigenvectors().transpose();

  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd diff = centered.col(k);
    out[static_cast<std::size_t>(k)] =
        std::sqrt(std::max(0.0, diff.dot(inv * diff)));
  }
  return out;
}

int OutlierReport::flagged_count() const {
  return static_cast<int>(std::count(flags.begin(), flags.end(), char{1}));
}

OutlierReport weights_from_ps(const std::vector<double>& d_ps, double b,
                              int dof, double quantile) {
  if (!(b > 0.0)) throw InvalidInputError("weights_from_ps: b must be positive");
  if (dof < 1) throw InvalidInputError("weights_from_ps: dof must be >= 1");
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw InvalidInputError("weights_from_ps: quantile must lie in (0, 1)");
  }

  OutlierReport report;
  report.d_ps = d_ps;
  report.b = b;
  report.dof = dof;
  report.quantile = quantile;
  report.threshold = chi_square_quantile(quantile, static_cast<double>(dof));
  report.weights.resize(d_ps.size());
  report.flags.resize(d_ps.size());
  for (std::size_t k = 0; k < d_ps.size(); ++k) {
    const double d = d_ps[k];
    if (!(d >= 0.0)) {
      throw InvalidInputError("weights_from_ps: negative or NaN statistic");
    }
    const double d2 = d * d;
    report.weights[k] = (d == 0.0) ? 1.0 : std::min(1.0, b / d2);
    report.flags[k] = (d2 > report.threshold) ? 1 : 0;
  }
  return report;
}

Eigen::MatrixXd stack_transitions(const Eigen::MatrixXd& Y,
                                  const Eigen::MatrixXd& Yp) {
  if (Y.rows() != Yp.rows() || Y.cols() != Yp.cols()) {
    throw InvalidInputError("stack_transitions: Y and Y' shapes differ");
  }
  Eigen::MatrixXd z(2 * Y.rows(), Y.cols());
  z.topRows(Y.rows()) = Y;
  z.bottomRows(Y.rows()) = Yp;
  return z;
}

OutlierReport detect_outliers(const Eigen::MatrixXd& Y,
                              const Eigen::MatrixXd& Yp,
                              const OutlierOptions& opts) {
  const Eigen::MatrixXd z = stack_transitions(Y, Yp);
  std::vector<std::string> warnings;
  const std::vector<double> d_ps =
      projection_statistics(z, opts.scale_estimator, &warnings);
  const int dof = opts.dof > 0 ? opts.dof : static_cast<int>(z.rows());
  OutlierReport report = weights_from_ps(d_ps, opts.b, dof, opts.quantile);
  report.scale_estimator = opts.scale_estimator;
  report.warnings = std::move(warnings);
  return report;
}

}  // namespace rdmd
