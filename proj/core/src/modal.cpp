#include "rdmd/modal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "rdmd/errors.hpp"

namespace rdmd {

Spectrum spectrum(const OperatorEstimate& est, double dt) {
  const double step = dt > 0.0 ? dt : est.dt;
  if (!(step > 0.0)) {
    throw InvalidInputError("spectrum: no positive time step available");
  }
  if (est.A.rows() != est.A.cols() || est.A.size() == 0) {
    throw InvalidInputError("spectrum: operator is not square");
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(est.A);
  if (es.info() != Eigen::Success) {
    throw NumericalError("spectrum: eigendecomposition failed");
  }

  Eigen::VectorXcd lambda = es.eigenvalues();
  Eigen::MatrixXcd modes = est.reduced()
                               ? (est.T.cast<std::complex<double>>() *
                                  es.eigenvectors())
                                     .eval()
                               : es.eigenvectors();

  // Deterministic order: decreasing |lambda|, ties by decreasing Im.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(lambda.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const double ma = std::abs(lambda(a));
                     const double mb = std::abs(lambda(b));
                     if (ma != mb) return ma > mb;
                     return lambda(a).imag() > lambda(b).imag();
                   });

  Spectrum sp;
  sp.eig_discrete.resize(lambda.size());
  sp.eig_continuous.resize(lambda.size());
  sp.modes.resize(modes.rows(), modes.cols());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const std::complex<double> ld = lambda(order[static_cast<std::size_t>(i)]);
    sp.eig_discrete(i) = ld;
    if (std::abs(ld) == 0.0) {
      // The one-step map annihilates this mode; its continuous-time decay
      // rate is unbounded below.
      sp.eig_continuous(i) = std::complex<double>(
          -std::numeric_limits<double>::infinity(), 0.0);
    } else {
      sp.eig_continuous(i) = std::log(ld) / step;
    }

    Eigen::VectorXcd v = modes.col(order[static_cast<std::size_t>(i)]);
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    // Fix the arbitrary complex phase: largest entry real and positive.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const std::complex<double> pivot = v(imax);
    if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
    sp.modes.col(i) = v;
  }
  return sp;
}

Eigen::VectorXcd mode_amplitudes(const Spectrum& sp,
                                 const Eigen::VectorXd& x0) {
  if (sp.modes.rows() != x0.size()) {
    throw InvalidInputError("mode_amplitudes: x0 does not match mode length");
  }
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd>(sp.modes)
      .solve(x0.cast<std::complex<double>>());
}

ReconstructionResult reconstruct(const OperatorEstimate& est,
                                 const Eigen::VectorXd& x0, int steps,
                                 ReconMode mode, const TimeSeries* reference) {
  if (steps < 1) throw InvalidInputError("reconstruct: steps must be >= 1");
  const Eigen::MatrixXd a = est.full_operator();
  if (a.rows() != x0.size()) {
    throw InvalidInputError("reconstruct: x0 does not match operator size");
  }
  if (mode == ReconMode::OneStep && reference == nullptr) {
    throw InvalidInputError(
        "reconstruct: one-step mode needs the reference trajectory");
  }
  if (reference != nullptr) {
    if (reference->dim() != a.rows()) {
      throw InvalidInputError("reconstruct: reference dim does not match");
    }
    if (reference->count() < steps + 1) {
      throw InsufficientDataError(
          "reconstruct: reference has " + std::to_string(reference->count()) +
          " samples, need " + std::to_string(steps + 1));
    }
  }

  ReconstructionResult out;
  out.mode = mode;
  out.dt = est.dt;
  out.trajectory.resize(a.rows(), steps + 1);
  out.trajectory.col(0) = x0;
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd prev = (mode == ReconMode::OneStep)
                                     ? reference->samples.col(k)
                                     : out.trajectory.col(k).eval();
    out.trajectory.col(k + 1) = a * prev;
  }

  if (reference != nullptr) {
    out.cumulative_error.resize(steps + 1);
    double acc = 0.0;
    for (int k = 0; k <= steps; ++k) {
      acc += (out.trajectory.col(k) - reference->samples.col(k)).norm();
      out.cumulative_error(k) = acc;
    }
  }
  return out;
}

}  // namespace rdmd
