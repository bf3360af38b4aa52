#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace rdmd {

// Which scale estimate normalizes the projected spreads when computing
// projection statistics.
//   MadS1: 1.4826 * median |x - median(x)|              (breakdown 50%,
//          degenerate when over half the projections coincide)
//   QnS2:  1.1926 * lomed_k lomed_{j != k} |x_k - x_j|  (pairwise
//          differences; no centering, robust to asymmetric contamination)
enum class ScaleEstimatorKind { MadS1, QnS2 };

// Sample median: mean of the two central order statistics for even n.
double median(std::span<const double> xs);

// Low median: the floor((n+1)/2)-th order statistic (1-based), i.e. the
// lower of the two central values when n is even.
double lomed(std::span<const double> xs);

// Median absolute deviation about the median, scaled by 1.4826 for
// consistency with the standard deviation at the normal.
double mad(std::span<const double> xs);

// Scale of a set of 1-D projections; same arithmetic as mad().
double scale_s1(std::span<const double> projections);

// Pairwise-difference scale: 1.1926 * lomed_k lomed_{j != k} |x_k - x_j|.
// Runs in O(n log n); the result is always an actual pairwise difference
// times the consistency factor, bit-identical to the O(n^2) evaluation.
double scale_s2(std::span<const double> projections);

// Directions v_k = p_k - v_med from the coordinate-wise median of the point
// cloud through each point.  Columns of `points` are the points; columns of
// the result are the (unnormalized) directions.  Points coinciding with the
// median vector yield the zero direction and are dropped.
Eigen::MatrixXd direction_set(const Eigen::MatrixXd& points);

// Projection statistic per point: the worst-case standardized outlyingness
//   d_k = max_v |p_k.v - median_j(p_j.v)| / scale(p.v)
// over the direction set above.  Directions whose projected scale is zero
// carry no information and are skipped; if every direction degenerates the
// statistics are all zero and a warning is recorded.
std::vector<double> projection_statistics(
    const Eigen::MatrixXd& points,
    ScaleEstimatorKind kind = ScaleEstimatorKind::QnS2,
    std::vector<std::string>* warnings = nullptr);

// Classical Mahalanobis distance of each column from the sample mean, using
// the sample covariance.  Kept for comparison; it suffers from masking and
// is not used by the robust estimators.
std::vector<double> mahalanobis(const Eigen::MatrixXd& points);

// Outlyingness scores and the weights/flags derived from them.
struct OutlierReport {
  std::vector<double> d_ps;     // projection statistic per point
  std::vector<double> weights;  // min(1, b / d_k^2), 1 when d_k = 0
  std::vector<char> flags;      // d_k^2 > chi-square cutoff
  double threshold = 0.0;       // chi2_quantile(quantile, dof)
  int dof = 0;
  double quantile = 0.975;
  double b = 1.5;
  ScaleEstimatorKind scale_estimator = ScaleEstimatorKind::QnS2;
  std::vector<std::string> warnings;

  int flagged_count() const;
};

// Turn raw projection statistics into weights and chi-square flags.
OutlierReport weights_from_ps(const std::vector<double>& d_ps, double b,
                              int dof, double quantile);

struct OutlierOptions {
  ScaleEstimatorKind scale_estimator = ScaleEstimatorKind::QnS2;
  double b = 1.5;          // weight cutoff: w = min(1, b / d^2)
  double quantile = 0.975; // chi-square flagging quantile
  int dof = 0;             // 0 -> dimension of the stacked points
};

// Stack each transition into z_k = [y_k; y_{k+1}] so that outlyingness is
// judged on the pair a residual depends on, not on single snapshots.
Eigen::MatrixXd stack_transitions(const Eigen::MatrixXd& Y,
                                  const Eigen::MatrixXd& Yp);

// Full pipeline: stack transitions, score them, derive weights and flags.
OutlierReport detect_outliers(const Eigen::MatrixXd& Y,
                              const Eigen::MatrixXd& Yp,
                              const OutlierOptions& opts = {});

// Inverse CDF of the chi-square distribution with `dof` degrees of freedom,
// computed from the regularized incomplete gamma function by bisection.
// Accurate to ~1e-10 in the argument; dof may be any positive real.
double chi_square_quantile(double quantile, double dof);

// Regularized lower incomplete gamma P(a, x); exposed for testing.
double regularized_gamma_p(double a, double x);

}  // namespace rdmd
