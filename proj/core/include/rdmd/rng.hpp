#pragma once

#include <cstdint>

namespace rdmd {

// Counter-based pseudorandom generator built on the SplitMix64 finalizer.
//
// Draw i of the stream with seed s is mix64(s + (i+1) * 0x9E3779B97F4A7C15).
// The output is a pure function of (seed, counter), so identical seeds give
// identical streams on every platform and independent sub-streams can be
// derived without sharing state.  Quality is more than adequate for
// simulation noise; this is not a cryptographic generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  // Avalanching finalizer from SplitMix64; also used to derive sub-seeds.
  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Independent child stream for a pipeline stage identified by `tag`.
  // Children of the same parent with distinct tags do not collide, and the
  // parent's own counter is unaffected.
  Rng child(std::uint64_t tag) const {
    return Rng(mix64(seed_ ^ mix64(tag ^ 0x5851F42D4C957F2DULL)));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    return mix64(seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.  Each call consumes two uniforms and
  // discards the sine companion so the draw count per call is fixed.
  double normal();

  // Laplace with density (1/2b) exp(-|x|/b), via inverse CDF.
  double laplace(double b);

  // Cauchy with half-width at half-maximum `gamma`, via inverse CDF.
  double cauchy(double gamma);

  // Student-t with `dof` degrees of freedom: N(0,1) / sqrt(chi2_dof / dof),
  // the chi-square built as a sum of `dof` squared normals.
  double student_t(int dof);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace rdmd
