#include "alp/families.hpp"

#include <cmath>

#include "alp/errors.hpp"

namespace alp {

namespace {

constexpr double kPs[] = {1.0, 1.5, 2.0, 3.0};

double pick_p(Rng& rng) { return kPs[rng() % 4]; }

}  // namespace

SpacePtr harmonic_partition(Index n_max) {
  require(n_max >= 1, "N_max must be >= 1");
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(n_max) + 1);
  for (Index k = 1; k <= n_max; ++k) {
    const double dk = static_cast<double>(k);
    cells.push_back({static_cast<int>(k), 1.0 / dk - 1.0 / (dk + 1.0), true});
  }
  cells.push_back({0, 1.0 / (static_cast<double>(n_max) + 1.0), true});
  return make_space(std::move(cells));
}

namespace {

FnSequence shrinking(Index n_max, bool scaled) {
  const SpacePtr space = harmonic_partition(n_max);
  auto term = [&](Index n) {
    const double height = scaled ? static_cast<double>(n) : 1.0;
    MeasurableFn f(space);
    for (Index k = n; k <= n_max; ++k) f.set_value(static_cast<std::size_t>(k - 1), height);
    f.set_value(static_cast<std::size_t>(n_max), height);
    return f;
  };
  return FnSequence::generate(space, n_max, term, MeasurableFn(space), scaled ? "n_chi_shrinking" : "chi_shrinking");
}

}  // namespace

FnSequence chi_shrinking(Index n_max) { return shrinking(n_max, false); }
FnSequence n_chi_shrinking(Index n_max) { return shrinking(n_max, true); }

FnSequence escaping_box(Index n_max) {
  require(n_max >= 1, "N_max must be >= 1");
  std::vector<Cell> cells;
  for (Index k = 0; k <= n_max; ++k) cells.push_back({static_cast<int>(k), 1.0, true});
  const SpacePtr space = make_space(std::move(cells), {TailFamily::constant(1.0, n_max + 1)});
  auto term = [&](Index n) {
    MeasurableFn f(space);
    f.set_value(static_cast<std::size_t>(n), 1.0);
    return f;
  };
  return FnSequence::generate(space, n_max, term, MeasurableFn(space), "escaping_box");
}

FnSequence constant_sequence(const MeasurableFn& f, Index n_max) {
  return FnSequence::generate(f.space(), n_max, [&](Index) { return f; }, f, "constant");
}

FnSequence scaled_sequence(const MeasurableFn& g, Index n_max, std::string name) {
  return FnSequence::generate(
      g.space(), n_max, [&](Index n) { return scale(g, 1.0 / static_cast<double>(n)); }, MeasurableFn(g.space()),
      std::move(name));
}

SpacePtr dyadic_atoms_space() { return make_space({}, {TailFamily::geometric(1.0, 0.5, 1)}); }

MeasurableFn dyadic_growth_function(const SpacePtr& space, double p) {
  require(p >= 1.0, "exponent p must be >= 1");
  MeasurableFn f(space);
  f.set_tail(0, {TailPiece::geometric(space->tails().at(0).start, 1.0, std::exp2(1.0 / p))});
  return f;
}

std::string_view to_string(SuiteKind k) noexcept {
  switch (k) {
    case SuiteKind::geometric:
      return "geometric";
    case SuiteKind::alternating:
      return "alternating";
    case SuiteKind::spike:
      return "spike";
  }
  return "geometric";
}

SuiteInstance random_geometric_instance(Rng& rng, Index n_max) {
  const SpacePtr space = random_finite_space(rng, 4 + rng() % 13, 0.5);
  const MeasurableFn f = random_function(space, rng);
  const MeasurableFn h = random_function(space, rng);
  const double A = uniform(rng, 0.1, 2.0);
  const double rho = uniform(rng, 0.1, 0.5);
  auto term = [&](Index n) { return add(f, scale(h, A * std::pow(rho, static_cast<double>(n)))); };
  return {SuiteKind::geometric, pick_p(rng), FnSequence::generate(space, n_max, term, f, "random_geometric")};
}

SuiteInstance random_alternating_instance(Rng& rng, Index n_max) {
  SpacePtr space;
  do {
    space = random_finite_space(rng, 4 + rng() % 13, 0.5);
  } while (space->finite_part_measure() <= 0.0);
  MeasurableFn f(space);
  MeasurableFn h(space);
  for (std::size_t i = 0; i < space->size(); ++i) {
    f.set_value(i, uniform(rng, -2.0, 2.0));
    const double mag = uniform(rng, 0.1, 2.0);
    h.set_value(i, uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag);
  }
  auto term = [&](Index n) { return add(f, scale(h, n % 2 == 0 ? 1.0 : -1.0)); };
  return {SuiteKind::alternating, pick_p(rng), FnSequence::generate(space, n_max, term, f, "random_alternating")};
}

SuiteInstance random_spike_instance(Rng& rng, Index n_max) {
  const double p = pick_p(rng);
  const double c = uniform(rng, 0.5, 1.0);
  const double rho = uniform(rng, 0.1, 0.3);
  const double kappa = uniform(rng, 0.5, 2.0);
  std::vector<Cell> cells;
  for (Index n = 1; n <= n_max; ++n) {
    cells.push_back({static_cast<int>(n), c * std::pow(rho, static_cast<double>(n)), uniform(rng, 0.0, 1.0) < 0.5});
  }
  const SpacePtr space = make_space(std::move(cells));
  auto term = [&](Index n) {
    MeasurableFn f(space);
    const auto i = static_cast<std::size_t>(n - 1);
    f.set_value(i, std::pow(kappa / space->cell(i).weight, 1.0 / p));
    return f;
  };
  return {SuiteKind::spike, p, FnSequence::generate(space, n_max, term, MeasurableFn(space), "random_spike")};
}

SuiteInstance random_suite_instance(Rng& rng, int index, Index n_max) {
  switch (index % 3) {
    case 0:
      return random_geometric_instance(rng, n_max);
    case 1:
      return random_alternating_instance(rng, n_max);
    default:
      return random_spike_instance(rng, n_max);
  }
}

}  // namespace alp
