#include <doctest.h>

#include <cmath>

#include "alp/families.hpp"
#include "expect_error.hpp"

using namespace alp;

TEST_CASE("harmonic partition covers the unit interval") {
  for (Index n : {1, 7, 64, 1024}) {
    const SpacePtr s = harmonic_partition(n);
    CHECK(s->size() == static_cast<std::size_t>(n + 1));
    CHECK(s->total_measure().value == doctest::Approx(1.0).epsilon(1e-14));
    const Cell& first = s->cell(s->index_of(1));
    CHECK(first.weight == doctest::Approx(0.5));
  }
}

TEST_CASE("shrinking indicators integrate to 1/n and n times that") {
  const FnSequence a = chi_shrinking(100);
  const FnSequence b = n_chi_shrinking(100);
  for (Index n = 1; n <= 100; ++n) {
    CHECK(integrate_p(a.term(n), 1.0).value == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-13));
    CHECK(integrate_p(b.term(n), 1.0).value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(measure_of(b.term(n), 0.5).value == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-13));
  }
  CHECK(a.has_limit());
  CHECK(integrate_p(a.limit(), 1.0).value == 0.0);
}

TEST_CASE("escaping box keeps unit mass") {
  const FnSequence seq = escaping_box(32);
  CHECK_FALSE(seq.space()->finite_measure());
  for (Index n = 1; n <= 32; ++n) {
    const MeasurableFn& f = seq.term(n);
    CHECK(integrate_p(f, 1.0).value == doctest::Approx(1.0));
    CHECK(alpha_norm_pow(f, 2.0).value == doctest::Approx(1.0));
  }
}

TEST_CASE("dyadic growth has unit alpha norm for every p") {
  const SpacePtr s = dyadic_atoms_space();
  CHECK(s->total_measure().value == doctest::Approx(1.0).epsilon(1e-14));
  for (double p : {1.0, 2.0, 3.0}) {
    const MeasurableFn f = dyadic_growth_function(s, p);
    for (Index n = 1; n < 30; ++n) {
      CHECK(f.tail_value(0, n) == doctest::Approx(std::pow(2.0, static_cast<double>(n) / p)).epsilon(1e-13));
    }
    CHECK_FALSE(integrate_p(f, p).finite());
  }
}

TEST_CASE("random suite cycles through its kinds") {
  Rng rng(51);
  const SuiteKind expected[] = {SuiteKind::geometric, SuiteKind::alternating, SuiteKind::spike};
  for (int i = 0; i < 9; ++i) {
    const SuiteInstance inst = random_suite_instance(rng, i, 32);
    CHECK(inst.kind == expected[i % 3]);
    CHECK(inst.seq.size() == 32);
    CHECK(inst.seq.has_limit());
    CHECK(inst.p >= 1.0);
  }
}

TEST_CASE("random suite is reproducible from the seed") {
  Rng a(52);
  Rng b(52);
  for (int i = 0; i < 6; ++i) {
    const SuiteInstance x = random_suite_instance(a, i, 16);
    const SuiteInstance y = random_suite_instance(b, i, 16);
    CHECK(x.p == y.p);
    for (Index n = 1; n <= 16; ++n) {
      const auto vx = x.seq.term(n).values();
      const auto vy = y.seq.term(n).values();
      CHECK(std::equal(vx.begin(), vx.end(), vy.begin(), vy.end()));
    }
  }
}

TEST_CASE("alternating instances stay away from their limit") {
  Rng rng(53);
  for (int t = 0; t < 20; ++t) {
    const SuiteInstance inst = random_alternating_instance(rng, 16);
    for (Index n = 1; n <= 16; ++n) CHECK(alpha_distance_pow(inst.seq.term(n), inst.seq.limit(), inst.p) > 0.0);
  }
}

TEST_CASE("sequences reject terms from another space") {
  const SpacePtr s = make_space({{0, 1.0, true}});
  const SpacePtr other = make_space({{0, 1.0, true}});
  CHECK(error_kind([&] { FnSequence(s, {MeasurableFn(other, {1.0})}); }) == ErrorKind::InvalidArgument);
}
