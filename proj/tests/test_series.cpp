#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alp/series.hpp"
#include "oracles.hpp"

using namespace alp;

namespace {

const SeriesOptions kOpts{};

double direct_sum(const PowerGeometricTerm& t, Index lo, Index hi) {
  long double s = 0.0L;
  for (Index n = lo; n < hi; ++n) s += t.at(n);
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("finite ranges match a direct loop") {
  const PowerGeometricTerm terms[] = {{1.0, 0.5, 0.0}, {2.0, 1.0, 1.5}, {0.3, 0.9, -2.0}, {1.0, 1.1, 3.0}};
  for (const auto& t : terms) {
    const Estimate e = sum_range(t, 1, 200, kOpts);
    CHECK(oracle::rel_error(e.value, direct_sum(t, 1, 200)) < 1e-13);
  }
}

TEST_CASE("geometric series uses its closed form") {
  const Estimate e = sum_range({3.0, 0.25, 0.0}, 2, kUnbounded, kOpts);
  const double expected = 3.0 * 0.0625 / 0.75;
  CHECK(std::abs(e.value - expected) <= e.error + 1e-15);
}

TEST_CASE("power series bracket contains zeta") {
  for (double s : {1.5, 2.0, 3.0, 4.5}) {
    const Estimate e = sum_range({1.0, 1.0, s}, 1, kUnbounded, kOpts);
    REQUIRE(e.finite());
    CHECK(std::abs(e.value - oracle::zeta(s)) <= e.error + 1e-12);
    CHECK(e.error <= kOpts.tolerance);
  }
  const Estimate basel = sum_range({1.0, 1.0, 2.0}, 1, kUnbounded, kOpts);
  CHECK(std::abs(basel.value - std::numbers::pi * std::numbers::pi / 6.0) < 1e-9);
}

TEST_CASE("mixed power-geometric terms converge to the direct tail") {
  const PowerGeometricTerm t{1.0, 0.8, -3.0};
  const Estimate e = sum_range(t, 1, kUnbounded, kOpts);
  CHECK(std::abs(e.value - direct_sum(t, 1, 2000)) <= e.error + 1e-9);
}

TEST_CASE("divergent series report infinity") {
  CHECK_FALSE(sum_range({1.0, 1.0, 1.0}, 1, kUnbounded, kOpts).finite());
  CHECK_FALSE(sum_range({1.0, 1.0, 0.0}, 5, kUnbounded, kOpts).finite());
  CHECK_FALSE(sum_range({1.0, 1.2, 4.0}, 1, kUnbounded, kOpts).finite());
  CHECK(sum_range({0.0, 1.0, 0.0}, 1, kUnbounded, kOpts).value == 0.0);
}

TEST_CASE("summability follows the ratio and exponent") {
  CHECK(PowerGeometricTerm{1.0, 0.99, -10.0}.summable());
  CHECK(PowerGeometricTerm{1.0, 1.0, 1.0 + 1e-3}.summable());
  CHECK_FALSE(PowerGeometricTerm{1.0, 1.0, 1.0}.summable());
  CHECK_FALSE(PowerGeometricTerm{1.0, 1.0, 0.5}.summable());
}

TEST_CASE("empty ranges are zero") {
  CHECK(sum_range({1.0, 0.5, 0.0}, 7, 7, kOpts).value == 0.0);
}

TEST_CASE("neumaier sum keeps small terms") {
  NeumaierSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == doctest::Approx(1000.0));
}

TEST_CASE("environment caps partial sums") {
  setenv("ALP_MAX_TAIL_TERMS", "1234", 1);
  CHECK(SeriesOptions::from_environment().max_terms == 1234);
  unsetenv("ALP_MAX_TAIL_TERMS");
  CHECK(SeriesOptions::from_environment().max_terms == 1'000'000);
}
