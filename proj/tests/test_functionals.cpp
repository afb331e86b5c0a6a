#include <doctest.h>

#include <cmath>

#include "alp/errors.hpp"
#include "alp/families.hpp"
#include "alp/functionals.hpp"
#include "oracles.hpp"

using namespace alp;

namespace {

std::vector<double> weights(const MeasureSpace& s) {
  std::vector<double> w;
  for (const Cell& c : s.cells()) w.push_back(c.weight);
  return w;
}

std::vector<double> values(const MeasurableFn& f) { return {f.values().begin(), f.values().end()}; }

double frechet_oracle(const std::vector<double>& v, const std::vector<double>& w) {
  double best = oracle::measure_above(v, w, 0.0);
  for (double x : v) best = std::min(best, oracle::measure_above(v, w, std::abs(x)) + std::abs(x));
  return best;
}

}  // namespace

TEST_CASE("alpha norm of a two-cell function") {
  const SpacePtr s = make_space({{0, 0.2, true}, {1, 0.8, true}});
  const MeasurableFn f(s, {3.0, 0.5});
  CHECK(alpha_norm(f, 1.0).value == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(lp_norm(f, 1.0).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(frechet_mu(f) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("alpha norm agrees with a direct sum") {
  Rng rng(21);
  for (int t = 0; t < 300; ++t) {
    const SpacePtr s = random_finite_space(rng, 1 + rng() % 30);
    const MeasurableFn f = random_function(s, rng);
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      CHECK(oracle::rel_error(alpha_norm_pow(f, p).value, oracle::alpha_pow(values(f), weights(*s), p)) < 1e-12);
    }
  }
}

TEST_CASE("variational identity against subset enumeration") {
  Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    const SpacePtr s = random_finite_space(rng, 1 + rng() % 10);
    const MeasurableFn f = random_function(s, rng);
    const double p = uniform(rng, 1.0, 4.0);
    const std::vector<double> v = values(f);
    const std::vector<double> w = weights(*s);
    const oracle::SubsetMin m = oracle::variational_min(v, w, p);
    CHECK(oracle::rel_error(alpha_norm_pow(f, p).value, m.value) < 1e-12);
    std::uint32_t small = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) <= 1.0) small |= 1u << i;
    }
    long double at_small = 0.0L;
    for (std::size_t i = 0; i < v.size(); ++i) at_small += (small >> i & 1u) ? w[i] * std::pow(std::abs(v[i]), p) : w[i];
    CHECK(oracle::rel_error(static_cast<double>(at_small), m.value) < 1e-12);
    CHECK(alpha_norm_variational_identity(f, p).passed());
  }
}

TEST_CASE("variational brute force refuses large spaces") {
  Rng rng(23);
  const SpacePtr s = random_finite_space(rng, 21);
  CHECK_THROWS_AS(alpha_norm_variational_identity(random_function(s, rng), 1.0), Error);
}

TEST_CASE("frechet functional against threshold enumeration") {
  Rng rng(24);
  for (int t = 0; t < 300; ++t) {
    const SpacePtr s = random_finite_space(rng, 1 + rng() % 20);
    const MeasurableFn f = random_function(s, rng);
    const double expected = frechet_oracle(values(f), weights(*s));
    CHECK(std::abs(frechet_inf(f) - expected) < 1e-12 * std::max(1.0, expected));
    CHECK(frechet_mu(f) == std::min(frechet_inf(f), 1.0));
  }
}

TEST_CASE("seminorm on an infinite set is refused") {
  const SpacePtr s = make_space({}, {TailFamily::constant(1.0, 1)});
  MeasurableFn f(s);
  f.set_tail(0, {TailPiece::constant(1, 0.5)});
  CHECK_THROWS_AS(alpha_seminorm_on(f, 1.0, MeasurableSet::whole(s)), Error);
  MeasurableSet head = MeasurableSet::empty(s);
  head.set_tail(0, IndexRanges::span(1, 5));
  CHECK(alpha_seminorm_on(f, 1.0, head).value == doctest::Approx(2.0));
}

TEST_CASE("absolute continuity modulus matches a fractional knapsack") {
  Rng rng(25);
  for (int t = 0; t < 200; ++t) {
    const SpacePtr s = random_finite_space(rng, 1 + rng() % 16);
    const MeasurableFn f = random_function(s, rng);
    const double p = uniform(rng, 1.0, 3.0);
    const double delta = uniform(rng, 0.0, 2.0);
    const ModulusSample m = ac_modulus_at(f, p, delta);
    CHECK_FALSE(m.bound_not_value);
    const double expected = oracle::fractional_modulus(values(f), weights(*s), p, delta);
    CHECK(std::abs(m.omega - expected) <= 1e-12 * std::max(1.0, expected));
  }
}

TEST_CASE("modulus is non-decreasing in delta") {
  Rng rng(26);
  const SpacePtr s = random_finite_space(rng, 12);
  const MeasurableFn f = random_function(s, rng);
  const ACModulusCurve c = ac_modulus(f, 2.0, {0.01, 0.05, 0.1, 0.5, 1.0});
  for (std::size_t i = 1; i < c.samples.size(); ++i) CHECK(c.samples[i].omega >= c.samples[i - 1].omega);
}

TEST_CASE("membership verdicts") {
  SUBCASE("constant one on unit atoms is not a member") {
    const SpacePtr s = make_space({}, {TailFamily::constant(1.0, 1)});
    MeasurableFn f(s);
    f.set_tail(0, {TailPiece::constant(1, 1.0)});
    const MembershipResult r = lambda_p_member(f, 1.0, default_member_deltas());
    CHECK(r.verdict == Membership::non_member);
    CHECK(r.certificate_delta.has_value());
  }
  SUBCASE("dyadic growth is a member but not p-integrable") {
    const SpacePtr s = dyadic_atoms_space();
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const MeasurableFn f = dyadic_growth_function(s, p);
      const MembershipResult r = lambda_p_member(f, p, default_member_deltas());
      REQUIRE(r.verdict == Membership::member);
      CHECK_FALSE(lp_member(f, p));
      CHECK(alpha_norm_pow(f, p).value == doctest::Approx(1.0).epsilon(1e-12));
      for (const MembershipWitness& w : r.witnesses) {
        CHECK(w.set_measure.value < w.delta);
        CHECK(w.complement_integral.finite());
      }
      for (double d : {0.5, 0.01, 1e-4}) CHECK(std::isinf(ac_modulus_at(f, p, d).omega));
      CHECK(truncated_membership_check(f, p, default_member_deltas()).passed());
    }
  }
  SUBCASE("finite spaces always admit a cover") {
    Rng rng(27);
    for (int t = 0; t < 50; ++t) {
      const SpacePtr s = random_finite_space(rng, 1 + rng() % 12);
      const MeasurableFn f = random_function(s, rng);
      CHECK(lambda_p_member(f, 1.5, default_member_deltas()).verdict == Membership::member);
      CHECK(lp_member(f, 1.5));
    }
  }
  SUBCASE("delta grids must decrease") {
    const SpacePtr s = dyadic_atoms_space();
    CHECK_THROWS_AS(lambda_p_member(dyadic_growth_function(s, 1.0), 1.0, {0.1, 0.2}), Error);
  }
}

TEST_CASE("F-norm axioms hold on random triples") {
  Rng rng(28);
  for (double p : {1.0, 2.0, 3.0}) {
    const CheckReport r = fnorm_axioms_suite(16, p, 200, rng);
    CHECK(r.passed());
    CHECK(r.trials > 0);
  }
}

TEST_CASE("estimate chain holds on random instances") {
  Rng rng(29);
  const CheckReport r = estimate_chain_suite(300, rng);
  CHECK(r.passed());
}

TEST_CASE("variational identity suite") {
  Rng rng(30);
  CHECK(variational_identity_suite(50, 10, rng).passed());
}

TEST_CASE("alpha norm powers decrease in p") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const SpacePtr s = random_finite_space(rng, 10);
    const MeasurableFn f = random_function(s, rng);
    CHECK(alpha_monotone_in_p(f, 1.0, uniform(rng, 1.0, 5.0)).passed());
  }
}
