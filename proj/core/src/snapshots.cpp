#include "rdmd/snapshots.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rdmd/errors.hpp"

namespace rdmd {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no,
                  std::size_t col_no, const std::string& origin) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || cell.empty()) {
    throw ParseError(origin + ": line " + std::to_string(line_no) +
                     ", column " + std::to_string(col_no) +
                     ": cannot parse '" + cell + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw ParseError(origin + ": line " + std::to_string(line_no) +
                     ", column " + std::to_string(col_no) +
                     ": non-finite value '" + cell + "'");
  }
  return value;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void validate(const TimeSeries& series) {
  if (series.count() < 2) {
    throw InsufficientDataError(
        "time series: need at least 2 samples, got " +
        std::to_string(series.count()));
  }
  if (series.dim() < 1) {
    throw InvalidInputError("time series: no state channels");
  }
  if (!(series.dt > 0.0) || !std::isfinite(series.dt)) {
    throw InvalidInputError("time series: dt must be positive and finite");
  }
  if (!series.samples.allFinite()) {
    throw InvalidInputError("time series: non-finite sample");
  }
  if (!series.labels.empty() &&
      static_cast<Eigen::Index>(series.labels.size()) != series.dim()) {
    throw InvalidInputError("time series: label count does not match dim");
  }
  if (!series.times.empty() &&
      static_cast<Eigen::Index>(series.times.size()) != series.count()) {
    throw InvalidInputError("time series: time stamp count does not match samples");
  }
}

SnapshotPair build_pair(const TimeSeries& series) {
  validate(series);
  const Eigen::Index n = series.count() - 1;
  SnapshotPair pair;
  pair.Y = series.samples.leftCols(n);
  pair.Yp = series.samples.rightCols(n);
  pair.dt = series.dt;
  pair.overlapping = true;
  return pair;
}

SnapshotPair make_pair(Eigen::MatrixXd Y, Eigen::MatrixXd Yp, double dt) {
  if (Y.rows() != Yp.rows() || Y.cols() != Yp.cols()) {
    throw InvalidInputError("make_pair: Y and Y' shapes differ");
  }
  if (Y.cols() < 1) throw InsufficientDataError("make_pair: no snapshots");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInputError("make_pair: dt must be positive and finite");
  }
  if (!Y.allFinite() || !Yp.allFinite()) {
    throw InvalidInputError("make_pair: non-finite snapshot");
  }
  SnapshotPair pair;
  pair.Y = std::move(Y);
  pair.Yp = std::move(Yp);
  pair.dt = dt;
  pair.overlapping = false;
  return pair;
}

TimeSeries read_csv_text(const std::string& text, const std::string& origin) {
  std::vector<std::string> lines;
  {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }

  // Header row: "t" followed by one label per channel.
  std::size_t idx = 0;
  while (idx < lines.size() && trim(lines[idx]).empty()) ++idx;
  if (idx == lines.size()) throw ParseError(origin + ": empty file");
  const std::vector<std::string> header = split_csv_line(lines[idx]);
  if (header.empty() || header[0] != "t") {
    throw ParseError(origin + ": line " + std::to_string(idx + 1) +
                     ": first header column must be 't'");
  }
  if (header.size() < 2) {
    throw ParseError(origin + ": header declares no state channels");
  }
  const std::size_t width = header.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(width - 1);

  std::vector<double> times;
  std::vector<std::size_t> row_lines;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = idx + 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(lines[i]);
    if (cells.size() != width) {
      throw ParseError(origin + ": line " + std::to_string(i + 1) + ": has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(width));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      row[c] = parse_cell(cells[c], i + 1, c + 1, origin);
    }
    times.push_back(row[0]);
    row_lines.push_back(i + 1);
    rows.push_back(std::move(row));
  }

  if (times.size() < 2) {
    throw InsufficientDataError(origin +
                                ": need at least 2 data rows to define dt");
  }

  // Time must advance in constant steps (relative tolerance 1e-9).
  const double dt0 = times[1] - times[0];
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double step = times[k] - times[k - 1];
    if (!(step > 0.0)) {
      throw ParseError(origin + ": time is not strictly increasing at line " +
                       std::to_string(row_lines[k]));
    }
    const double tol = 1e-9 * std::max(std::abs(dt0), std::abs(step));
    if (std::abs(step - dt0) > tol) {
      throw ParseError(origin + ": non-uniform time spacing at line " +
                       std::to_string(row_lines[k]) + " (step " +
                       format_g17(step) + " vs " + format_g17(dt0) + ")");
    }
  }

  TimeSeries series;
  series.dt = dt0;
  series.t0 = times[0];
  series.times = times;
  series.labels.assign(header.begin() + 1, header.end());
  series.samples.resize(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      series.samples(i, static_cast<Eigen::Index>(k)) =
          rows[k][static_cast<std::size_t>(i) + 1];
    }
  }
  return series;
}

std::string write_csv_text(const TimeSeries& series) {
  validate(series);
  std::string out = "t";
  for (Eigen::Index i = 0; i < series.dim(); ++i) {
    out += ',';
    out += series.labels.empty() ? "x" + std::to_string(i + 1)
                                 : series.labels[static_cast<std::size_t>(i)];
  }
  out += '\n';
  for (Eigen::Index k = 0; k < series.count(); ++k) {
    out += format_g17(series.time_at(k));
    for (Eigen::Index i = 0; i < series.dim(); ++i) {
      out += ',';
      out += format_g17(series.samples(i, k));
    }
    out += '\n';
  }
  return out;
}

TimeSeries read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return read_csv_text(buf.str(), path);
}

void write_csv(const TimeSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << write_csv_text(series);
  if (!out) throw Error(path + ": write failed");
}

}  // namespace rdmd
