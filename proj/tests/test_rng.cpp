#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rdmd/errors.hpp"
#include "rdmd/rng.hpp"

using rdmd::Rng;

TEST_CASE("mix64 matches the published SplitMix64 output for state 0") {
  // First output of the reference SplitMix64 sequence seeded with 0.
  CHECK(Rng::mix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("streams are deterministic and seed-separated") {
  Rng a(42), b(42), c(43);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("golden first draws pin the stream layout") {
  Rng r(0);
  CHECK(r.next_u64() == 0x6E789E6AA1B965F4ULL);
  CHECK(r.next_u64() == 0x06C45D188009454FULL);
}

TEST_CASE("child streams are independent of parent consumption") {
  Rng parent(7);
  const std::uint64_t before = Rng(7).child(3).next_u64();
  parent.next_u64();
  parent.next_u64();
  CHECK(parent.child(3).next_u64() == before);

  // distinct tags give distinct streams
  CHECK(Rng(7).child(1).next_u64() != Rng(7).child(2).next_u64());
}

TEST_CASE("uniform stays in [0,1) with the right mean") {
  Rng r(1);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("normal has unit variance and zero mean") {
  Rng r(2);
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.02);
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("laplace variance is 2 b^2") {
  Rng r(3);
  const double b = 0.3;
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.laplace(b);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.02);
  CHECK(sq / n - mean * mean == doctest::Approx(2.0 * b * b).epsilon(0.1));
  CHECK_THROWS_AS(r.laplace(0.0), rdmd::InvalidInputError);
}

TEST_CASE("cauchy has median |x| equal to gamma") {
  Rng r(4);
  const double gamma = 2.0;
  const int n = 20001;
  std::vector<double> mags(n);
  for (double& m : mags) m = std::abs(r.cauchy(gamma));
  std::nth_element(mags.begin(), mags.begin() + n / 2, mags.end());
  CHECK(mags[n / 2] == doctest::Approx(gamma).epsilon(0.05));
  CHECK_THROWS_AS(r.cauchy(-1.0), rdmd::InvalidInputError);
}

TEST_CASE("student_t is heavy tailed at dof 2 and near normal at high dof") {
  Rng r(5);
  int big = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    if (std::abs(r.student_t(2)) > 10.0) ++big;
  }
  // P(|t_2| > 10) ~ 0.0098: expect ~490 exceedances, far above normal tails.
  CHECK(big > 100);

  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.student_t(30);
    sq += x * x;
  }
  // var(t_dof) = dof / (dof - 2)
  CHECK(sq / n == doctest::Approx(30.0 / 28.0).epsilon(0.08));
  CHECK_THROWS_AS(r.student_t(0), rdmd::InvalidInputError);
}

TEST_CASE("bernoulli frequency tracks p") {
  Rng r(6);
  int hits = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.05) ? 1 : 0;
  CHECK(hits / static_cast<double>(n) == doctest::Approx(0.05).epsilon(0.15));
  Rng z(7);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(z.bernoulli(0.0));
}
