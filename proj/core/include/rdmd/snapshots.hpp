#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace rdmd {

// A uniformly sampled trajectory: one column per time instant.
struct TimeSeries {
  double dt = 0.0;
  double t0 = 0.0;
  Eigen::MatrixXd samples;          // dim x (steps + 1)
  std::vector<std::string> labels;  // channel names; defaults to x1..xm
  // Exact time stamps as read from disk or produced by the simulator.  Kept
  // so a read/write round trip reproduces the file bit for bit even though
  // dt is re-derived from the first two stamps.  Empty means t0 + dt * k.
  std::vector<double> times;

  Eigen::Index dim() const { return samples.rows(); }
  Eigen::Index count() const { return samples.cols(); }
  double time_at(Eigen::Index k) const {
    return times.empty() ? t0 + dt * static_cast<double>(k)
                         : times[static_cast<std::size_t>(k)];
  }
};

// Throws InvalidInputError / InsufficientDataError when the series cannot
// feed the estimators (non-finite values, dt <= 0, fewer than 2 samples).
void validate(const TimeSeries& series);

// Snapshot matrices for one-step operator identification.  Column k of Y is
// the state at step k and column k of Yp is the state one step later.  When
// both come from a single trajectory, Yp is Y shifted by one column.
struct SnapshotPair {
  Eigen::MatrixXd Y;   // dim x N
  Eigen::MatrixXd Yp;  // dim x N
  double dt = 0.0;
  bool overlapping = true;  // Yp is the one-step shift of Y

  Eigen::Index dim() const { return Y.rows(); }
  Eigen::Index count() const { return Y.cols(); }
};

// Split a trajectory of N+1 samples into overlapping (Y, Y') with N columns.
SnapshotPair build_pair(const TimeSeries& series);

// Assemble a pair from separately measured Y and Y'; the one-step overlap
// between the two matrices is not assumed or checked.
SnapshotPair make_pair(Eigen::MatrixXd Y, Eigen::MatrixXd Yp, double dt);

// CSV with header "t,<name>,<name>,..." where the first column must be the
// time stamp.  Values are written with 17 significant digits so a
// write/read round trip reproduces every double exactly.  Reading checks
// that time is strictly increasing with constant spacing (relative
// tolerance 1e-9) and that every cell is a finite number; violations raise
// ParseError naming the row and column.
TimeSeries read_csv(const std::string& path);
void write_csv(const TimeSeries& series, const std::string& path);

// Same format, string-based; used by the file functions and by tests.
TimeSeries read_csv_text(const std::string& text, const std::string& origin);
std::string write_csv_text(const TimeSeries& series);

}  // namespace rdmd
