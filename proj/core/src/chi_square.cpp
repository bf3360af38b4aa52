#include <cmath>
#include <limits>

#include "rdmd/errors.hpp"
#include "rdmd/robust_stats.hpp"

namespace rdmd {
namespace {

// Series expansion of P(a, x), effective for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x) by the modified Lentz
// method, effective for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double frac = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    frac *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return frac * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw InvalidInputError("regularized_gamma_p: a must be > 0");
  if (x < 0.0) throw InvalidInputError("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double chi_square_quantile(double quantile, double dof) {
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw InvalidInputError("chi_square_quantile: quantile must lie in (0, 1)");
  }
  if (!(dof > 0.0)) {
    throw InvalidInputError("chi_square_quantile: dof must be positive");
  }

  // CDF(x) = P(dof/2, x/2) is strictly increasing; bracket then bisect.
  const double a = 0.5 * dof;
  const auto cdf = [a](double x) { return regularized_gamma_p(a, 0.5 * x); };

  double lo = 0.0;
  double hi = dof + 10.0;
  for (int i = 0; i < 200 && cdf(hi) < quantile; ++i) hi *= 2.0;

  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval exhausted in doubles
    if (cdf(mid) < quantile) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace rdmd
