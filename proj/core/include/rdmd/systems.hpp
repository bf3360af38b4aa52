#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdmd/snapshots.hpp"

namespace rdmd {

// Autonomous benchmark dynamics integrated with classical fixed-step RK4.
struct BenchmarkSystem {
  enum class Kind {
    Linear2x2,                // x' = [[-1,-3],[1,1]] x, eigenvalues +-i sqrt(2)
    RingOscillators,          // theta' = omega, omega' = -(L + D) theta
    SlowManifold,             // x1' = mu x1, x2' = lambda (x2 - x1^2)
    VanDerPol,                // x1' = x2, x2' = mu (1 - x1^2) x2 - x1
    RandomLinear,             // x' = (G - h I) x, G Gaussian, abscissa -0.5
    GeneralizedSlowManifold,  // x1_i' = mu_i x1_i, x2' = -Lambda (x2 - P(x1))
  };

  Kind kind = Kind::Linear2x2;
  int dim = 2;

  // ring
  int oscillators = 15;
  double damping = 0.05;
  // slow manifold
  double sm_mu = -0.05;
  double sm_lambda = -1.0;
  // Van der Pol
  double vdp_mu = 1.0;
  bool vdp_no_restoring = false;  // drop the -x1 term (degenerate variant)
  // random linear: the realized system matrix
  Eigen::MatrixXd theta;
  // generalized slow manifold: per-channel rates, slow block then fast block
  Eigen::VectorXd gsm_mu;      // negative decay rates of the slow states
  Eigen::VectorXd gsm_lambda;  // positive attraction rates of the fast states

  std::string name() const;
  Eigen::VectorXd default_x0() const;
};

BenchmarkSystem make_linear2x2();
BenchmarkSystem make_ring(int oscillators, double damping = 0.05);
BenchmarkSystem make_slow_manifold(double mu = -0.05, double lambda = -1.0);
BenchmarkSystem make_van_der_pol(double mu = 1.0, bool no_restoring = false);
// Dense Gaussian matrix shifted to spectral abscissa -0.5; the draw is a
// pure function of the seed.
BenchmarkSystem make_random_linear(int dim, std::uint64_t seed);
// Half the channels decay slowly at rates drawn uniformly from
// [-0.5, -0.05]; the other half are attracted at unit rate to
// P(x1) = (sum_j x1_j)^2.  `dim` must be even.
BenchmarkSystem make_generalized_slow_manifold(int dim, std::uint64_t seed);
// Same dynamics with explicitly chosen rates (mu_i < 0, lambda_i > 0).
BenchmarkSystem make_generalized_slow_manifold(Eigen::VectorXd mu,
                                               Eigen::VectorXd lambda);

// Time derivative of the system at state x.
Eigen::VectorXd system_rhs(const BenchmarkSystem& system,
                           const Eigen::VectorXd& x);

// Integrate `steps` RK4 steps of size dt from x0; the result holds the
// steps+1 visited states starting at t = 0.  Divergence to a non-finite
// state raises NumericalError naming the step.
TimeSeries simulate(const BenchmarkSystem& system, const Eigen::VectorXd& x0,
                    double dt, int steps);

enum class NoiseKind { None, Gaussian, Laplace, StudentT, Cauchy };

// Constant shift added to every channel over [t_start, t_end], endpoints
// inclusive up to a 1e-9 relative tolerance on the sample index.
struct OutlierWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  double magnitude = 0.0;
};

// Dense Gaussian background of size eta plus sparse Gaussian spikes of
// size mu that hit each entry independently with probability p.
struct SpikePlan {
  double mu = 1.0;
  double p = 0.05;
  double eta = 1e-4;
};

struct ContaminationPlan {
  std::vector<OutlierWindow> windows;
  NoiseKind noise = NoiseKind::None;
  double gaussian_sigma = 0.1;    // standard deviation
  double laplace_variance = 0.01; // variance; scale b = sqrt(var / 2)
  int student_dof = 2;
  double cauchy_gamma = 2.0;      // half-width at half-maximum
  std::optional<SpikePlan> spike;
  std::uint64_t seed = 0;

  bool empty() const {
    return windows.empty() && noise == NoiseKind::None && !spike.has_value();
  }
};

// Apply the plan to a copy of the series: windows first, then noise, then
// spikes, each on its own child random stream so the pieces do not
// interact.  The same seed, plan and input always produce the same output;
// an empty plan returns the input unchanged.
TimeSeries contaminate(const TimeSeries& series, const ContaminationPlan& plan);

NoiseKind noise_kind_from_name(const std::string& name);
std::string noise_kind_name(NoiseKind kind);

}  // namespace rdmd
