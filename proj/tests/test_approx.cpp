#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alp/approx.hpp"
#include "alp/families.hpp"
#include "expect_error.hpp"
#include "oracles.hpp"

using namespace alp;

namespace {

GridFn box_indicator(Index cells) {
  GridBox b;
  b.lo[0] = -2.0;
  b.hi[0] = 2.0;
  b.cells[0] = cells;
  return GridFn::sample(b, [](const std::array<double, 3>& x) { return std::abs(x[0]) < 1.0 ? 1.0 : 0.0; });
}

GridFn line(std::vector<double> v) {
  GridBox b;
  b.cells[0] = static_cast<Index>(v.size());
  return GridFn{b, std::move(v)};
}

}  // namespace

TEST_CASE("ladder stays under the function and climbs") {
  Rng rng(61);
  for (int t = 0; t < 100; ++t) {
    const SpacePtr s = random_finite_space(rng, 12);
    const MeasurableFn f = random_function(s, rng);
    const auto ladder = simple_ladder(f, 12);
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      const double k = static_cast<double>(j + 1);
      for (std::size_t i = 0; i < s->size(); ++i) {
        const double fi = f.value(i);
        const double si = ladder[j].value(i);
        CHECK(std::abs(si) <= std::abs(fi));
        CHECK((si == 0.0 || std::signbit(si) == std::signbit(fi)));
        if (j > 0) CHECK(std::abs(ladder[j - 1].value(i)) <= std::abs(si));
        if (std::abs(fi) < k) CHECK(std::abs(fi - si) <= std::exp2(-k));
      }
    }
  }
}

TEST_CASE("ladder on an unbounded tail") {
  const SpacePtr s = dyadic_atoms_space();
  const MeasurableFn f = dyadic_growth_function(s, 2.0);
  const auto ladder = simple_ladder(f, 6);
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    for (Index n = 1; n < 80; ++n) {
      const double v = ladder[j].tail_value(0, n);
      CHECK(v <= f.tail_value(0, n));
      CHECK(v <= static_cast<double>(j + 1));
      if (j > 0) CHECK(ladder[j - 1].tail_value(0, n) <= v);
    }
  }
  CHECK(ladder.back().tail_value(0, 79) == 6.0);
}

TEST_CASE("ladder tails match the pointwise dyadic floor") {
  Rng rng(64);
  auto floor_ladder = [](double v, int j) {
    const double m = std::min(std::floor(std::abs(v) * std::exp2(j)) / std::exp2(j), static_cast<double>(j));
    return v < 0.0 ? -m : m;
  };
  for (int t = 0; t < 200; ++t) {
    const bool geometric = t % 2 == 0;
    const SpacePtr s = make_space({}, {geometric ? TailFamily::geometric(1.0, 0.5, 1) : TailFamily::power(1.0, 2.0, 1)});
    MeasurableFn f(s);
    const double b = uniform(rng, 0.01, 20.0) * (rng() % 2 ? 1.0 : -1.0);
    f.set_tail(0, {geometric ? TailPiece::geometric(1, b, uniform(rng, 0.3, 3.0))
                             : TailPiece::power(1, b, uniform(rng, -3.0, 3.0))});
    const auto ladder = simple_ladder(f, 10);
    for (int j = 1; j <= 10; ++j) {
      for (Index n = 1; n <= 400; ++n) {
        CHECK(ladder[static_cast<std::size_t>(j - 1)].tail_value(0, n) == floor_ladder(f.tail_value(0, n), j));
      }
    }
  }
  const SpacePtr s = make_space({}, {TailFamily::power(1.0, 2.0, 1)});
  MeasurableFn slow(s);
  slow.set_tail(0, {TailPiece::power(1, 1.0, -0.01)});
  const MeasurableFn s6 = simple_ladder(slow, 6).back();
  for (Index n : {Index{1}, Index{1000}, Index{1} << 40, Index{1} << 60}) {
    CHECK(s6.tail_value(0, n) == floor_ladder(slow.tail_value(0, n), 6));
  }
}

TEST_CASE("truncation certificates on the dyadic example") {
  const SpacePtr s = dyadic_atoms_space();
  for (double p : {1.0, 2.0, 3.0}) {
    const MeasurableFn f = dyadic_growth_function(s, p);
    for (double eps : {0.5, 0.1, 0.01}) {
      const Truncation t = truncate_to_lp(f, p, eps);
      CHECK(t.removed_measure.value < std::pow(eps, p));
      CHECK(t.distance.value < eps);
      CHECK(t.g_integral.finite());
    }
  }
  const Truncation t = truncate_to_lp(dyadic_growth_function(s, 2.0), 2.0, 0.1);
  CHECK(t.removed_measure.value == doctest::Approx(0.0078125));
  const Truncation one = truncate_to_lp(dyadic_growth_function(s, 1.0), 1.0, 0.1);
  CHECK(one.removed_measure.value == doctest::Approx(0.0625));
  CHECK(one.distance.value == doctest::Approx(0.0625));
}

TEST_CASE("truncation of an integrable function removes nothing") {
  Rng rng(63);
  for (int t = 0; t < 20; ++t) {
    const SpacePtr s = random_finite_space(rng, 8);
    const Truncation tr = truncate_to_lp(random_function(s, rng), 2.0, 0.1);
    CHECK(tr.removed.is_empty());
    CHECK(tr.distance.value == 0.0);
  }
}

TEST_CASE("truncation refuses non-members") {
  const SpacePtr s = make_space({}, {TailFamily::constant(1.0, 1)});
  MeasurableFn f(s);
  f.set_tail(0, {TailPiece::constant(1, 1.0)});
  CHECK(error_kind([&] { truncate_to_lp(f, 1.0, 0.1); }) == ErrorKind::NotMember);
}

TEST_CASE("rational net rounds to the dyadic grid") {
  const SpacePtr s = make_space({{0, 1.0, true}});
  const NetElement e = rational_simple_net(MeasurableFn(s, {std::numbers::pi}), 1.0, 0.01);
  CHECK(e.dyadic_level == 8);
  CHECK(e.s.value(0) == 3.140625);
  CHECK(e.distance.value < 0.02);

  const SpacePtr d = dyadic_atoms_space();
  const NetElement g = rational_simple_net(dyadic_growth_function(d, 2.0), 2.0, 0.1);
  CHECK(g.distance.value < 0.2);
  for (Index n = 1; n < 20; ++n) {
    const double v = g.s.tail_value(0, n) * std::exp2(g.dyadic_level);
    CHECK(v == std::floor(v));
  }
}

TEST_CASE("mollifier matches a direct 1D convolution") {
  Rng rng(62);
  for (int t = 0; t < 50; ++t) {
    const Index n = 8 + static_cast<Index>(rng() % 60);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = uniform(rng, -3.0, 3.0);
    const GridFn f = line(v);
    const int m = 2 + static_cast<int>(rng() % 6);
    const MollifyReport r = mollify(f, 1.0, m * f.box.side(0));
    const std::vector<double> expected = oracle::mollify_1d(v, m);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(r.phi.values[i] - expected[i]) < 1e-13);
  }
}

TEST_CASE("smoothing error of a box indicator scales like h") {
  const GridFn f = box_indicator(800);
  double previous = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    const MollifyReport r = mollify(f, 1.0, h);
    // Two jumps at 35h/128 each.
    CHECK(std::abs(r.lp_distance - 35.0 * h / 64.0) < 0.05 * 35.0 * h / 64.0);
    CHECK(r.lp_distance <= h);
    CHECK(r.support_within_h);
    CHECK(r.tv_phi <= r.tv_f + 1e-12);
    if (previous > 0.0) CHECK(previous / r.lp_distance == doctest::Approx(2.0).epsilon(0.05));
    previous = r.lp_distance;
  }
}

TEST_CASE("mollifier preserves constants away from the boundary") {
  GridBox b;
  b.dim = 2;
  b.cells = {20, 20, 1};
  const GridFn f = GridFn::sample(b, [](const std::array<double, 3>&) { return 1.0; });
  const MollifyReport r = mollify(f, 2.0, 2 * b.side(0));
  for (Index i = 2; i < 18; ++i) {
    for (Index j = 2; j < 18; ++j) CHECK(r.phi.values[b.flat({i, j, 0})] == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("kernel radius must be a multiple of the cell side") {
  const GridFn f = box_indicator(40);
  CHECK(error_kind([&] { mollify(f, 1.0, 0.15); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { mollify(f, 1.0, 0.01); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { mollify(f, 1.0, f.box.side(0)); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("smooth approximation lands within epsilon") {
  const GridFn f = box_indicator(800);
  for (double eps : {0.5, 0.2, 0.1}) {
    const SmoothApproximation a = smooth_approximation(f, 1.0, eps);
    CHECK(a.distance < eps);
    CHECK(a.smoothing.lp_distance < eps / 2.0);
  }
}

TEST_CASE("coarse grids are reported") {
  CHECK(error_kind([] { smooth_approximation(line({0.0, 1.0, 1.0, 0.0}), 1.0, 0.01); }) == ErrorKind::GridTooCoarse);
}

TEST_CASE("total variation with zero padding") {
  CHECK(total_variation(line({0.0, 1.0, 1.0, 0.0})) == 2.0);
  CHECK(total_variation(line({1.0, -1.0})) == 4.0);
  GridBox b;
  b.dim = 2;
  b.cells = {2, 2, 1};
  CHECK(total_variation(GridFn{b, {1.0, 1.0, 1.0, 1.0}}) == 8.0);
}
