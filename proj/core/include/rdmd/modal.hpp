#pragma once

#include <Eigen/Dense>

#include "rdmd/estimators.hpp"
#include "rdmd/snapshots.hpp"

namespace rdmd {

// Eigenstructure of a fitted one-step operator.
struct Spectrum {
  Eigen::VectorXcd eig_discrete;    // eigenvalues of the one-step map
  Eigen::VectorXcd eig_continuous;  // log(lambda)/dt, principal branch
  Eigen::MatrixXcd modes;           // full-state mode per eigenvalue (unit norm)

  Eigen::Index count() const { return eig_discrete.size(); }
};

// Eigendecomposition of the estimate.  Reduced operators are decomposed in
// their own coordinates and the modes lifted by T back to the full state.
// Eigenvalues are sorted by decreasing magnitude (ties by decreasing
// imaginary part); each mode is normalized and rotated so its largest
// entry is real and positive, making the output deterministic.  A zero
// discrete eigenvalue maps to continuous real part -infinity.
Spectrum spectrum(const OperatorEstimate& est, double dt = 0.0);

// Least-squares mode amplitudes for an initial state: modes * alpha ~ x0.
Eigen::VectorXcd mode_amplitudes(const Spectrum& sp, const Eigen::VectorXd& x0);

enum class ReconMode {
  FreeRun,  // x_{k+1} = A x_k from x0 only
  OneStep,  // x_{k+1} = A x_k with x_k taken from the reference trajectory
};

struct ReconstructionResult {
  Eigen::MatrixXd trajectory;        // dim x (steps + 1)
  Eigen::VectorXd cumulative_error;  // running sum of ||x_hat_k - x_k||;
                                     // empty when no reference was given
  ReconMode mode = ReconMode::FreeRun;
  double dt = 0.0;
};

// Roll the fitted operator forward for `steps` steps.  OneStep mode and the
// cumulative error both need `reference`; FreeRun works without it.
ReconstructionResult reconstruct(const OperatorEstimate& est,
                                 const Eigen::VectorXd& x0, int steps,
                                 ReconMode mode = ReconMode::FreeRun,
                                 const TimeSeries* reference = nullptr);

}  // namespace rdmd
