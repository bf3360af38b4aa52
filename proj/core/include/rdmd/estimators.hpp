#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "rdmd/robust_stats.hpp"
#include "rdmd/snapshots.hpp"

namespace rdmd {

// Tuning for the Huber M-estimators and their IRLS solvers.
struct HuberConfig {
  double delta = 1.5;      // Huber corner; quadratic below, linear above
  double b = 1.5;          // outlier weight cutoff, w = min(1, b / d^2)
  double irls_tol = 0.01;  // stop when successive estimates move less than this
  int max_iter = 50;
  double bm = 1.0;         // finite-sample factor in the robust residual scale
  double gamma = 1e-6;     // Tikhonov strength (reduced robust fit only),
                           // relative to the mean diagonal of the normal matrix
  // The robust residual scale normally tracks the iteration: it is
  // re-estimated from the residuals of every new iterate until the step
  // size falls below irls_tol, after which a final pass runs at the settled
  // scale (that last pass is a majorize-minimize scheme, so its objective
  // trace is nonincreasing).  Without tracking, a scale taken from the
  // initial least-squares residuals stays inflated by whatever
  // contamination distorted that fit, and moderate outliers are never
  // rejected.  Set freeze_scale to keep the initial scale instead.
  bool freeze_scale = false;
};

double huber_rho(double r, double delta);
double huber_psi(double r, double delta);
// IRLS multiplier psi(u)/u = min(1, delta/|u|); exactly 1 at u = 0.
double huber_weight(double u, double delta);

// Robust residual scale 1.4826 * bm * median(magnitudes), floored at
// 1e-12 times the largest magnitude so later divisions stay finite.  A hit
// of the floor (an essentially exact fit) is recorded as a warning.
double robust_scale(std::span<const double> magnitudes, double bm,
                    std::vector<std::string>* warnings = nullptr);

// A fitted one-step operator.  Full-state estimates leave `T` empty and put
// the m x m operator in `A`.  Reduced estimates store the c' x c' operator
// in `A` and the m x c' basis in `T`; the full-state action is T A T^+.
struct OperatorEstimate {
  Eigen::MatrixXd A;
  Eigen::MatrixXd T;
  std::string method;
  double dt = 0.0;
  int iterations = 0;      // IRLS sweeps performed (0 for direct fits)
  bool converged = true;   // false if max_iter hit before the tolerance
  double scale = 0.0;      // robust residual scale used by the final sweep
  HuberConfig config;      // tuning the robust fits ran with (defaults
                           // otherwise); serialized so results are auditable
  OutlierReport outliers;  // weights/flags the fit was computed with
  // Objective values from the fixed-scale pass: the value at its starting
  // iterate, then one entry per sweep.  The scale is constant over the
  // pass, so the trace is nonincreasing.
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;

  bool reduced() const { return T.size() != 0; }
  // T A T^+ for reduced estimates, A itself otherwise.
  Eigen::MatrixXd full_operator() const;
};

struct Residuals {
  Eigen::MatrixXd R;      // column k: y'_k - A y_k in the full state space
  Eigen::VectorXd norms;  // Euclidean norm per column
};

Residuals residuals(const SnapshotPair& pair, const Eigen::MatrixXd& A_full);

// Least-squares fit A = Y' Y^T (Y Y^T)^{-1}, solved via QR of Y^T rather
// than the normal equations.  Rank-deficient Y falls back to a pseudo-
// inverse solve and records a warning.
OperatorEstimate exact_dmd(const SnapshotPair& pair);

// Reduced fit through the rank-r SVD Y = U S V^*: A = U^T Y' V S^{-1} with
// T = U.  `rank` <= 0 keeps every direction above the relative floor
// 1e-12 * sigma_max (anything below it is dropped with a warning); an
// explicit `rank` above the numerical rank is refused.
OperatorEstimate standard_dmd(const SnapshotPair& pair, int rank = 0);

// Row-wise robust fit: each row of A minimizes a Huber cost over its own
// residuals, standardized by the row's robust scale and the per-transition
// outlier weights.  Rows are solved independently by IRLS from the
// least-squares initializer, with the row scale tracking the iteration as
// described on HuberConfig.
OperatorEstimate krdmd(const SnapshotPair& pair, const HuberConfig& cfg,
                       const OutlierReport& outliers);

// Vector robust fit: one Huber cost on the Euclidean norms of the residual
// columns, so one multiplier per transition scales the whole column.
// Initialized at the exact-DMD estimate; the norm scale tracks the
// iteration as described on HuberConfig.
OperatorEstimate nrdmd(const SnapshotPair& pair, const HuberConfig& cfg,
                       const OutlierReport& outliers);

// Robust fit of the reduced operator on a fixed basis T (m x c', full
// column rank): the norm-type IRLS carried out in the reduced coordinates
// with residuals still measured in the full space, plus a Tikhonov term to
// keep the reduced normal matrix invertible.  Requires c' < m; with a
// square basis the projector T T^+ is the identity and the reweighting
// cannot reject anything, so that case is refused.
OperatorEstimate robust_standard_dmd(const SnapshotPair& pair,
                                     const Eigen::MatrixXd& T,
                                     const HuberConfig& cfg,
                                     const OutlierReport& outliers);

// Same fit with T taken as the rank-`rank` POD basis of Y (the left
// singular vectors), mirroring the basis choice of standard_dmd.
OperatorEstimate robust_standard_dmd(const SnapshotPair& pair, int rank,
                                     const HuberConfig& cfg,
                                     const OutlierReport& outliers);

}  // namespace rdmd
