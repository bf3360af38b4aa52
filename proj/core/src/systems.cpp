#include "rdmd/systems.hpp"

#include <cmath>

#include "rdmd/errors.hpp"
#include "rdmd/rng.hpp"

namespace rdmd {
namespace {

Eigen::VectorXd ring_rhs(const BenchmarkSystem& sys, const Eigen::VectorXd& x) {
  const int s = sys.oscillators;
  Eigen::VectorXd dx(2 * s);
  for (int j = 0; j < s; ++j) {
    dx(j) = x(s + j);  // theta' = omega
  }
  for (int j = 0; j < s; ++j) {
    const int left = (j + s - 1) % s;
    const int right = (j + 1) % s;
    // Cyclic Laplacian coupling plus proportional damping on theta.
    const double laplacian = 2.0 * x(j) - x(left) - x(right);
    dx(s + j) = -laplacian - sys.damping * x(j);
  }
  return dx;
}

}  // namespace

std::string BenchmarkSystem::name() const {
  switch (kind) {
    case Kind::Linear2x2: return "linear2x2";
    case Kind::RingOscillators: return "ring";
    case Kind::SlowManifold: return "slow_manifold";
    case Kind::VanDerPol: return "van_der_pol";
    case Kind::RandomLinear: return "random_linear";
    case Kind::GeneralizedSlowManifold: return "generalized_slow_manifold";
  }
  return "unknown";
}

Eigen::VectorXd BenchmarkSystem::default_x0() const {
  switch (kind) {
    case Kind::Linear2x2:
      return Eigen::Vector2d(1.0, 0.0);
    case Kind::RingOscillators: {
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
      for (int j = 0; j < oscillators; ++j) {
        x0(j) = 0.5 * std::sin(2.0 * M_PI * j / oscillators);
      }
      return x0;
    }
    case Kind::SlowManifold:
      return Eigen::Vector2d(1.0, 0.0);
    case Kind::VanDerPol:
      return Eigen::Vector2d(2.0, 0.0);
    case Kind::RandomLinear:
      return Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim));
    case Kind::GeneralizedSlowManifold: {
      // Slow states sum to 1 so the fast block relaxes toward P(x1) = 1.
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
      const int d1 = dim / 2;
      x0.head(d1).setConstant(1.0 / static_cast<double>(d1));
      return x0;
    }
  }
  return Eigen::VectorXd::Zero(dim);
}

BenchmarkSystem make_linear2x2() {
  BenchmarkSystem sys;
  sys.kind = BenchmarkSystem::Kind::Linear2x2;
  sys.dim = 2;
  return sys;
}

BenchmarkSystem make_ring(int oscillators, double damping) {
  if (oscillators < 3) {
    throw InvalidInputError("make_ring: need at least 3 oscillators");
  }
  if (!(damping >= 0.0)) {
    throw InvalidInputError("make_ring: damping must be >= 0");
  }
  BenchmarkSystem sys;
  sys.kind = BenchmarkSystem::Kind::RingOscillators;
  sys.oscillators = oscillators;
  sys.damping = damping;
  sys.dim = 2 * oscillators;
  return sys;
}

BenchmarkSystem make_slow_manifold(double mu, double lambda) {
  BenchmarkSystem sys;
  sys.kind = BenchmarkSystem::Kind::SlowManifold;
  sys.dim = 2;
  sys.sm_mu = mu;
  sys.sm_lambda = lambda;
  return sys;
}

BenchmarkSystem make_van_der_pol(double mu, bool no_restoring) {
  BenchmarkSystem sys;
  sys.kind = BenchmarkSystem::Kind::VanDerPol;
  sys.dim = 2;
  sys.vdp_mu = mu;
  sys.vdp_no_restoring = no_restoring;
  return sys;
}

BenchmarkSystem make_random_linear(int dim, std::uint64_t seed) {
  if (dim < 1) throw InvalidInputError("make_random_linear: dim must be >= 1");
  BenchmarkSystem sys;
  sys.kind = BenchmarkSystem::Kind::RandomLinear;
  sys.dim = dim;

  Rng rng(seed);
  Eigen::MatrixXd g(dim, dim);
  for (int j = 0; j < dim; ++j) {      // column-major draw order
    for (int i = 0; i < dim; ++i) g(i, j) = rng.normal();
  }
  const Eigen::VectorXcd eigs =
      Eigen::EigenSolver<Eigen::MatrixXd>(g, false).eigenvalues();
  const double abscissa = eigs.real().maxCoeff();
  // Shift so the realized system decays with spectral abscissa -0.5.
  sys.theta = g - (abscissa + 0.5) * Eigen::MatrixXd::Identity(dim, dim);
  return sys;
}

BenchmarkSystem make_generalized_slow_manifold(int dim, std::uint64_t seed) {
  if (dim < 2 || dim % 2 != 0) {
    throw InvalidInputError(
        "make_generalized_slow_manifold: dim must be even and >= 2");
  }
  const int d1 = dim / 2;
  Rng rng(seed);
  Eigen::VectorXd mu(d1);
  for (int i = 0; i < d1; ++i) mu(i) = -0.5 + 0.45 * rng.uniform();
  return make_generalized_slow_manifold(mu, Eigen::VectorXd::Ones(dim - d1));
}

BenchmarkSystem make_generalized_slow_manifold(Eigen::VectorXd mu,
                                               Eigen::VectorXd lambda) {
  if (mu.size() < 1 || lambda.size() < 1) {
    throw InvalidInputError(
        "make_generalized_slow_manifold: empty rate vector");
  }
  if ((mu.array() >= 0.0).any()) {
    throw InvalidInputError(
        "make_generalized_slow_manifold: slow rates must be negative");
  }
  if ((lambda.array() <= 0.0).any()) {
    throw InvalidInputError(
        "make_generalized_slow_manifold: fast rates must be positive");
  }
  BenchmarkSystem sys;
  sys.kind = BenchmarkSystem::Kind::GeneralizedSlowManifold;
  sys.dim = static_cast<int>(mu.size() + lambda.size());
  sys.gsm_mu = std::move(mu);
  sys.gsm_lambda = std::move(lambda);
  return sys;
}

Eigen::VectorXd system_rhs(const BenchmarkSystem& sys,
                           const Eigen::VectorXd& x) {
  switch (sys.kind) {
    case BenchmarkSystem::Kind::Linear2x2: {
      return Eigen::Vector2d(-x(0) - 3.0 * x(1), x(0) + x(1));
    }
    case BenchmarkSystem::Kind::RingOscillators:
      return ring_rhs(sys, x);
    case BenchmarkSystem::Kind::SlowManifold: {
      return Eigen::Vector2d(sys.sm_mu * x(0),
                             sys.sm_lambda * (x(1) - x(0) * x(0)));
    }
    case BenchmarkSystem::Kind::VanDerPol: {
      double acc = sys.vdp_mu * (1.0 - x(0) * x(0)) * x(1);
      if (!sys.vdp_no_restoring) acc -= x(0);
      return Eigen::Vector2d(x(1), acc);
    }
    case BenchmarkSystem::Kind::RandomLinear:
      return sys.theta * x;
    case BenchmarkSystem::Kind::GeneralizedSlowManifold: {
      const Eigen::Index d1 = sys.gsm_mu.size();
      const Eigen::Index d2 = sys.gsm_lambda.size();
      Eigen::VectorXd dx(d1 + d2);
      dx.head(d1) = sys.gsm_mu.cwiseProduct(x.head(d1));
      const double p = x.head(d1).sum() * x.head(d1).sum();
      // Fast block relaxes toward the shared quadratic P(x1).
      dx.tail(d2) = -sys.gsm_lambda.cwiseProduct(
          x.tail(d2) - Eigen::VectorXd::Constant(d2, p));
      return dx;
    }
  }
  throw InvalidInputError("system_rhs: unknown system kind");
}

TimeSeries simulate(const BenchmarkSystem& sys, const Eigen::VectorXd& x0,
                    double dt, int steps) {
  if (x0.size() != sys.dim) {
    throw InvalidInputError("simulate: x0 has size " +
                            std::to_string(x0.size()) + ", system needs " +
                            std::to_string(sys.dim));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInputError("simulate: dt must be positive and finite");
  }
  if (steps < 1) throw InvalidInputError("simulate: steps must be >= 1");
  if (!x0.allFinite()) throw InvalidInputError("simulate: non-finite x0");

  TimeSeries out;
  out.dt = dt;
  out.t0 = 0.0;
  out.samples.resize(sys.dim, steps + 1);
  out.samples.col(0) = x0;
  out.times.resize(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    out.times[static_cast<std::size_t>(k)] = dt * static_cast<double>(k);
  }
  out.labels.resize(static_cast<std::size_t>(sys.dim));
  for (int i = 0; i < sys.dim; ++i) {
    out.labels[static_cast<std::size_t>(i)] = "x" + std::to_string(i + 1);
  }

  Eigen::VectorXd x = x0;
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd k1 = system_rhs(sys, x);
    const Eigen::VectorXd k2 = system_rhs(sys, x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = system_rhs(sys, x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = system_rhs(sys, x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      throw NumericalError(sys.name() + ": state diverged at step " +
                           std::to_string(k + 1) + " (t = " +
                           std::to_string(dt * (k + 1)) + ")");
    }
    out.samples.col(k + 1) = x;
  }
  return out;
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "laplace") return NoiseKind::Laplace;
  if (name == "student_t") return NoiseKind::StudentT;
  if (name == "cauchy") return NoiseKind::Cauchy;
  throw InvalidInputError("unknown noise kind '" + name + "'");
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Laplace: return "laplace";
    case NoiseKind::StudentT: return "student_t";
    case NoiseKind::Cauchy: return "cauchy";
  }
  return "none";
}

TimeSeries contaminate(const TimeSeries& series, const ContaminationPlan& plan) {
  validate(series);
  TimeSeries out = series;
  if (plan.empty()) return out;

  // Window shifts: map times to inclusive sample index ranges with a 1e-9
  // relative tolerance so window edges that coincide with a sample up to
  // roundoff still include it.
  for (const OutlierWindow& win : plan.windows) {
    if (!(win.t_end >= win.t_start)) {
      throw InvalidInputError("contaminate: window ends before it starts");
    }
    if (!std::isfinite(win.magnitude)) {
      throw InvalidInputError("contaminate: non-finite window magnitude");
    }
    const double q0 = (win.t_start - series.t0) / series.dt;
    const double q1 = (win.t_end - series.t0) / series.dt;
    const auto k_start = static_cast<Eigen::Index>(
        std::ceil(q0 - 1e-9 * std::max(1.0, std::abs(q0))));
    const auto k_end = static_cast<Eigen::Index>(
        std::floor(q1 + 1e-9 * std::max(1.0, std::abs(q1))));
    if (k_start < 0 || k_end > out.count() - 1) {
      throw InvalidInputError(
          "contaminate: window [" + std::to_string(win.t_start) + ", " +
          std::to_string(win.t_end) + "] extends outside the series horizon");
    }
    for (Eigen::Index k = k_start; k <= k_end; ++k) {
      out.samples.col(k).array() += win.magnitude;
    }
  }

  const Rng base(plan.seed);
  if (plan.noise != NoiseKind::None) {
    Rng rng = base.child(1);
    // Entry order: time-major, channel inner, so every entry has a fixed
    // position in the stream.
    for (Eigen::Index k = 0; k < out.count(); ++k) {
      for (Eigen::Index i = 0; i < out.dim(); ++i) {
        double noise = 0.0;
        switch (plan.noise) {
          case NoiseKind::Gaussian:
            if (!(plan.gaussian_sigma >= 0.0)) {
              throw InvalidInputError("contaminate: sigma must be >= 0");
            }
            noise = plan.gaussian_sigma * rng.normal();
            break;
          case NoiseKind::Laplace: {
            if (!(plan.laplace_variance > 0.0)) {
              throw InvalidInputError("contaminate: variance must be > 0");
            }
            noise = rng.laplace(std::sqrt(plan.laplace_variance / 2.0));
            break;
          }
          case NoiseKind::StudentT:
            noise = rng.student_t(plan.student_dof);
            break;
          case NoiseKind::Cauchy:
            noise = rng.cauchy(plan.cauchy_gamma);
            break;
          case NoiseKind::None:
            break;
        }
        out.samples(i, k) += noise;
      }
    }
  }

  if (plan.spike.has_value()) {
    const SpikePlan& sp = *plan.spike;
    if (!(sp.p >= 0.0 && sp.p <= 1.0)) {
      throw InvalidInputError("contaminate: spike probability must be in [0, 1]");
    }
    if (!(sp.eta >= 0.0) || !(sp.mu >= 0.0)) {
      throw InvalidInputError("contaminate: spike levels must be >= 0");
    }
    Rng rng = base.child(2);
    for (Eigen::Index k = 0; k < out.count(); ++k) {
      for (Eigen::Index i = 0; i < out.dim(); ++i) {
        double add = sp.eta * rng.normal();
        if (rng.bernoulli(sp.p)) add += sp.mu * rng.normal();
        out.samples(i, k) += add;
      }
    }
  }

  return out;
}

}  // namespace rdmd
