#include "rdmd/rng.hpp"

#include <cmath>

#include "rdmd/errors.hpp"

namespace rdmd {

double Rng::normal() {
  // Map the first uniform into (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

double Rng::laplace(double b) {
  if (!(b > 0.0)) throw InvalidInputError("laplace: scale must be positive");
  const double u = uniform() - 0.5;
  const double sign = (u < 0.0) ? -1.0 : 1.0;
  return -b * sign * std::log(1.0 - 2.0 * std::abs(u));
}

double Rng::cauchy(double gamma) {
  if (!(gamma > 0.0)) throw InvalidInputError("cauchy: scale must be positive");
  // Nudge away from u = 0.5 - eps tan blowup only happens at the endpoints,
  // which uniform() cannot hit exactly (u in [0,1)), so no guard is needed.
  return gamma * std::tan(M_PI * (uniform() - 0.5));
}

double Rng::student_t(int dof) {
  if (dof < 1) throw InvalidInputError("student_t: dof must be >= 1");
  const double z = normal();
  double chi2 = 0.0;
  for (int i = 0; i < dof; ++i) {
    const double g = normal();
    chi2 += g * g;
  }
  // A zero chi-square has probability zero but would divide by zero; fall
  // back to a tiny floor to stay finite.
  if (chi2 <= 0.0) chi2 = 1e-300;
  return z / std::sqrt(chi2 / static_cast<double>(dof));
}

}  // namespace rdmd
