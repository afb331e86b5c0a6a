#include "alp/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "alp/errors.hpp"

namespace alp {

namespace {

constexpr double kRelSlack = 1e-12;
constexpr Index kEnumerationCap = 4096;
constexpr Index kFrechetScanCap = 100'000;
constexpr std::size_t kMaxExactAtoms = 20;

void require_p(double p) { require(std::isfinite(p) && p >= 1.0, "exponent p must be >= 1"); }

double rel(double lhs, double rhs) { return (lhs - rhs) / std::max(1.0, std::abs(rhs)); }

double finite_or_inf(const Estimate& e) { return e.finite() ? e.value : kInf; }

}  // namespace

// ------------------------------------------------------------------- norms

Estimate alpha_norm_pow(const MeasurableFn& f, double p, const SeriesOptions& opts) {
  require_p(p);
  return integrate_p(pointwise_min_one(f), p, opts);
}

Estimate alpha_norm(const MeasurableFn& f, double p, const SeriesOptions& opts) {
  return root(alpha_norm_pow(f, p, opts), p);
}

Estimate alpha_seminorm_on(const MeasurableFn& f, double p, const MeasurableSet& F, const SeriesOptions& opts) {
  require_p(p);
  if (!F.measure(opts).finite()) fail(ErrorKind::InfiniteMeasureSet, "seminorm needs a set of finite measure");
  return root(integrate_p(pointwise_min_one(f), p, F, opts), p);
}

Estimate lp_norm(const MeasurableFn& f, double p, const SeriesOptions& opts) {
  require_p(p);
  return root(integrate_p(f, p, opts), p);
}

// --------------------------------------------------------------- Fréchet

double frechet_inf(const MeasurableFn& f, const SeriesOptions& opts) {
  double best = finite_or_inf(measure_of(f, 0.0, opts));
  auto candidate = [&](double v) {
    const double m = finite_or_inf(measure_of(f, v, opts));
    best = std::min(best, m + v);
    return m;
  };
  std::set<double> seen;
  for (double v : f.values()) {
    if (v != 0.0 && seen.insert(std::abs(v)).second) candidate(std::abs(v));
  }
  const MeasureSpace& space = *f.space();
  for (std::size_t t = 0; t < space.tails().size(); ++t) {
    const TailValues& tv = f.tail(t);
    for (std::size_t i = 0; i < tv.size(); ++i) {
      const TailPiece& piece = tv[i];
      if (piece.is_zero()) continue;
      const Index end = i + 1 < tv.size() ? tv[i + 1].from : kUnbounded;
      const int trend = piece.kind == PieceKind::explicit_values ? 2 : piece.trend();
      if (trend == 0) {
        candidate(std::abs(piece.coeff));
        continue;
      }
      if (trend == 1 && end == kUnbounded && !space.tails()[t].finite_mass()) {
        return kInf;  // every superlevel set contains an infinite-measure suffix
      }
      for (Index n = piece.from, k = 0; n < end && k < kFrechetScanCap; ++n, ++k) {
        const double v = std::abs(piece.at(n));
        if (v == 0.0 || !seen.insert(v).second) continue;
        if (trend > 0 && trend != 2 && v >= best) break;
        const double m = candidate(v);
        // Later values are smaller, so later candidates are at least m.
        if (trend < 0 && m >= best) break;
      }
    }
  }
  return best;
}

double frechet_mu(const MeasurableFn& f, const SeriesOptions& opts) { return std::min(frechet_inf(f, opts), 1.0); }

// ------------------------------------------------------------- AC modulus

namespace {

struct Item {
  double weight;
  double density;
};

double fractional_fill(const std::vector<Item>& sorted, double budget) {
  NeumaierSum s;
  for (const Item& it : sorted) {
    if (budget <= 0.0) break;
    const double take = std::min(it.weight, budget);
    s.add(take * it.density);
    budget -= take;
  }
  return s.value();
}

bool weights_vanish(const TailFamily& fam) { return fam.kind != TailKind::constant; }

// +inf when sets of measure < delta inside this unbounded family span already
// carry arbitrarily large p-integrals.
bool unbounded_modulus(const TailFamily& fam, const TailPiece& piece, double p, double delta) {
  const PowerGeometricTerm term = weighted_power_term(fam, piece, p).snapped();
  if (term.summable()) return false;
  if (fam.finite_mass()) return true;  // every suffix is small and carries infinite mass
  const bool small_atoms = weights_vanish(fam) || fam.scale < delta;
  if (!small_atoms) return false;
  const bool terms_grow = term.ratio > 1.0 || (term.ratio == 1.0 && term.exponent < 0.0);
  if (terms_grow) return true;
  // Density term/weight unbounded: fill budget delta with arbitrarily dense atoms.
  const PowerGeometricTerm w = fam.weight_term().snapped();
  const bool density_grows = term.ratio / w.ratio > 1.0 || (term.ratio == w.ratio && term.exponent < w.exponent);
  return density_grows;
}

}  // namespace

ModulusSample ac_modulus_at(const MeasurableFn& f, double p, double delta, const SeriesOptions& opts) {
  require_p(p);
  require(delta > 0.0 && std::isfinite(delta), "delta must be positive");
  const MeasureSpace& space = *f.space();
  std::vector<Item> divisible;
  std::vector<Item> atoms;
  double remainder_bound = 0.0;

  for (std::size_t i = 0; i < space.size(); ++i) {
    const Cell& c = space.cell(i);
    const double v = f.value(i);
    if (c.weight <= 0.0 || v == 0.0) continue;
    const Item it{c.weight, std::pow(std::abs(v), p)};
    (c.divisible ? divisible : atoms).push_back(it);
  }
  for (std::size_t t = 0; t < space.tails().size(); ++t) {
    const TailFamily& fam = space.tails()[t];
    for (const PieceSpan& sp : piece_spans(f.tail(t), IndexRanges::from(fam.start))) {
      if (sp.piece->is_zero()) continue;
      const bool family = sp.piece->kind != PieceKind::explicit_values;
      if (family && sp.hi == kUnbounded && unbounded_modulus(fam, *sp.piece, p, delta)) {
        return {delta, kInf, false};
      }
      const Index stop = sp.hi == kUnbounded || sp.hi - sp.lo > kEnumerationCap ? sp.lo + kEnumerationCap : sp.hi;
      for (Index n = sp.lo; n < stop; ++n) {
        const double w = fam.weight(n);
        const double v = sp.piece->at(n);
        if (w > 0.0 && v != 0.0) atoms.push_back({w, std::pow(std::abs(v), p)});
      }
      if (stop < sp.hi) {
        const PowerGeometricTerm term = weighted_power_term(fam, *sp.piece, p);
        if (term.summable()) {
          remainder_bound += sum_range(term, stop, sp.hi, opts).value;
        } else {
          // Non-summable bounded-density span: densities beyond the cut are at
          // most the last enumerated one.
          const double d = std::pow(std::abs(sp.piece->at(stop)), p);
          remainder_bound += delta * d;
        }
      }
    }
  }

  std::erase_if(atoms, [&](const Item& a) { return a.weight >= delta; });
  auto by_density = [](const Item& a, const Item& b) { return a.density > b.density; };
  ModulusSample out{delta, 0.0, remainder_bound > 1e-12};
  if (atoms.size() <= kMaxExactAtoms) {
    std::sort(divisible.begin(), divisible.end(), by_density);
    double best = fractional_fill(divisible, delta);
    const std::size_t k = atoms.size();
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      double w = 0.0;
      double v = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (mask & (1u << j)) {
          w += atoms[j].weight;
          v += atoms[j].weight * atoms[j].density;
        }
      }
      if (w >= delta) continue;
      best = std::max(best, v + fractional_fill(divisible, delta - w));
    }
    out.omega = best + remainder_bound;
  } else {
    divisible.insert(divisible.end(), atoms.begin(), atoms.end());
    std::sort(divisible.begin(), divisible.end(), by_density);
    out.omega = fractional_fill(divisible, delta) + remainder_bound;
    out.bound_not_value = true;
  }
  return out;
}

ACModulusCurve ac_modulus(const MeasurableFn& f, double p, const std::vector<double>& deltas,
                          const SeriesOptions& opts) {
  ACModulusCurve curve{p, {}};
  curve.samples.reserve(deltas.size());
  for (double d : deltas) curve.samples.push_back(ac_modulus_at(f, p, d, opts));
  return curve;
}

// ------------------------------------------------------------- membership

std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::member:
      return "member";
    case Membership::non_member:
      return "non_member";
    case Membership::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::vector<double> default_member_deltas() {
  std::vector<double> d;
  for (int k = 1; k <= 10; ++k) d.push_back(std::ldexp(1.0, -k));
  return d;
}

bool lp_member(const MeasurableFn& f, double p, const SeriesOptions& opts) {
  require_p(p);
  return integrate_p(f, p, opts).finite();
}

namespace {

struct Offender {
  std::size_t tail;
  Index from;
};

}  // namespace

MembershipResult lambda_p_member(const MeasurableFn& f, double p, const std::vector<double>& deltas,
                                 const SeriesOptions& opts) {
  require_p(p);
  require(!deltas.empty(), "membership needs at least one delta");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    require(deltas[i] > 0.0 && std::isfinite(deltas[i]), "deltas must be positive");
    require(i == 0 || deltas[i] < deltas[i - 1], "deltas must be strictly decreasing");
  }
  MembershipResult result;
  const SpacePtr& space = f.space();
  try {
    std::vector<Offender> offenders;
    for (std::size_t t = 0; t < space->tails().size(); ++t) {
      const TailFamily& fam = space->tails()[t];
      for (const PieceSpan& sp : piece_spans(f.tail(t), IndexRanges::from(fam.start))) {
        if (sp.piece->is_zero() || sp.hi != kUnbounded || sp.piece->kind == PieceKind::explicit_values) continue;
        if (weighted_power_term(fam, *sp.piece, p).summable()) continue;
        if (!fam.finite_mass()) {
          result.verdict = Membership::non_member;
          result.certificate_delta = deltas.front();
          result.reason = "tail " + std::to_string(t) + " carries an infinite p-integral on atoms of non-summable weight";
          return result;
        }
        offenders.push_back({t, sp.lo});
      }
    }
    for (double delta : deltas) {
      MeasurableSet cover = MeasurableSet::empty(space);
      const double budget = offenders.empty() ? delta : delta / static_cast<double>(offenders.size());
      for (const Offender& o : offenders) {
        const Index n = suffix_below(*space, o.tail, o.from, budget, opts);
        cover.set_tail(o.tail, cover.tail(o.tail).unite(IndexRanges::from(n)));
      }
      const Estimate mu = cover.measure(opts);
      const Estimate rest = integrate_p(f, p, cover.complement(), opts);
      if (!(mu.value < delta) || !rest.finite()) {
        result.verdict = Membership::inconclusive;
        result.reason = "cover construction failed at delta " + std::to_string(delta);
        return result;
      }
      result.witnesses.push_back({delta, cover, mu, rest});
    }
    result.verdict = Membership::member;
    result.reason = offenders.empty() ? "p-integral finite off the empty set" : "non-integrable tails covered by suffixes";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnsupportedFamilyCombination && e.kind() != ErrorKind::ToleranceNotReached) throw;
    result = MembershipResult{};
    result.verdict = Membership::inconclusive;
    result.reason = e.what();
  }
  return result;
}

CheckReport truncated_membership_check(const MeasurableFn& f, double p, const std::vector<double>& deltas,
                                       const SeriesOptions& opts) {
  CheckReport r{"truncated_membership", 1, {}, 0.0, json::object()};
  const MembershipResult left = lambda_p_member(f, p, deltas, opts);
  const Estimate alpha = alpha_norm(f, p, opts);
  const MembershipResult upper = lambda_p_member(above_threshold_part(f, 1.0), p, deltas, opts);
  Membership right = Membership::inconclusive;
  if (!alpha.finite()) {
    right = Membership::non_member;
  } else if (upper.verdict != Membership::inconclusive) {
    right = upper.verdict;
  }
  r.details["left"] = std::string(to_string(left.verdict));
  r.details["right"] = std::string(to_string(right));
  r.details["alpha_norm"] = alpha.finite() ? json(alpha.value) : json("inf");
  json witnesses = json::array();
  for (std::size_t i = 0; i < left.witnesses.size() && i < upper.witnesses.size(); ++i) {
    witnesses.push_back({{"delta", left.witnesses[i].delta},
                         {"left_measure", left.witnesses[i].set_measure.value},
                         {"right_measure", upper.witnesses[i].set_measure.value},
                         {"identical", left.witnesses[i].set == upper.witnesses[i].set}});
  }
  r.details["witnesses"] = witnesses;
  const bool decided = left.verdict != Membership::inconclusive && right != Membership::inconclusive;
  r.observe(decided && left.verdict != right ? 1.0 : 0.0, 0.0, {{"reason", "sides disagree"}});
  return r;
}

// ----------------------------------------------------------------- axioms

CheckReport fnorm_axioms_check(const SpacePtr& space, double p, int trials, Rng& rng) {
  require(trials >= 1, "trials must be >= 1");
  require_p(p);
  CheckReport r{"fnorm_axioms", trials, {}, 0.0, json::object()};
  for (int trial = 0; trial < trials; ++trial) {
    const MeasurableFn f = trial % 10 == 0 ? MeasurableFn(space) : random_function(space, rng);
    const MeasurableFn g = random_function(space, rng);
    const double lambda = trial % 7 == 0 ? -1.0 : uniform(rng, -1.0, 1.0);
    const json ctx{{"trial", trial}, {"p", p}, {"lambda", lambda}};

    const double nf = alpha_norm(f, p).value;
    const double ng = alpha_norm(g, p).value;

    auto tagged = [&](const char* axiom) {
      json c = ctx;
      c["axiom"] = axiom;
      return c;
    };
    r.observe(-nf, 0.0, tagged("nonnegative"));

    bool zero = true;
    for (std::size_t i = 0; i < space->size(); ++i) {
      if (space->cell(i).weight > 0.0 && f.value(i) != 0.0) zero = false;
    }
    r.observe((nf == 0.0) != zero ? 1.0 : 0.0, 0.0, tagged("definite"));

    r.observe(rel(alpha_norm(scale(f, lambda), p).value, nf), kRelSlack, tagged("scalar_monotone"));

    double prev = nf;
    for (int k = 1; k <= 60; ++k) {
      const double nk = alpha_norm(scale(f, std::ldexp(1.0, -k)), p).value;
      r.observe(rel(nk, prev), kRelSlack, tagged("scalar_continuity_monotone"));
      prev = nk;
    }
    r.observe(prev - 1e-9, 0.0, tagged("scalar_continuity_limit"));

    r.observe(rel(alpha_norm(add(f, g), p).value, nf + ng), kRelSlack, tagged("triangle"));
  }
  return r;
}

CheckReport fnorm_axioms_suite(std::size_t cells, double p, int trials, Rng& rng) {
  CheckReport total{"fnorm_axioms", 0, {}, 0.0, json::object()};
  for (int t = 0; t < trials; ++t) {
    const CheckReport one = fnorm_axioms_check(random_finite_space(rng, cells, 0.5), p, 1, rng);
    total.trials += 1;
    total.max_residual = std::max(total.max_residual, one.max_residual);
    for (const auto& v : one.violations) total.violations.push_back(v);
  }
  total.details["p"] = p;
  total.details["cells"] = cells;
  return total;
}

// --------------------------------------------------------- estimate chain

CheckReport estimate_chain_check(const MeasurableFn& f, double p, const MeasurableSet& F, double delta0) {
  require_p(p);
  require(delta0 > 0.0, "delta0 must be positive");
  CheckReport r{"estimate_chain", 1, {}, 0.0, json::object()};
  const Estimate muF = F.measure();
  if (!muF.finite()) fail(ErrorKind::InfiniteMeasureSet, "estimate chain needs μ(F) < ∞");
  const double seminorm_p = integrate_p(pointwise_min_one(f), p, F).value;
  const double inf_term = frechet_inf(f);
  const double alpha_p = finite_or_inf(alpha_norm_pow(f, p));
  const double upper = std::max(1.0, muF.value) * inf_term;
  const double outer = std::max(1.0, std::pow(delta0, -p)) * alpha_p + delta0;
  r.details = {{"seminorm_p", seminorm_p}, {"frechet_inf", number_or_inf(inf_term)}, {"bound_1", number_or_inf(upper)},
               {"bound_2", number_or_inf(outer)},       {"mu_F", muF.value},        {"delta0", delta0}};
  const json ctx{{"p", p}, {"delta0", delta0}};
  json c1 = ctx;
  c1["inequality"] = "seminorm <= max(1,mu(F)) * inf";
  r.observe(std::isinf(upper) ? 0.0 : rel(seminorm_p, upper), kRelSlack, c1);
  json c2 = ctx;
  c2["inequality"] = "inf <= max(1,delta0^-p) * alpha^p + delta0";
  r.observe(std::isinf(outer) ? 0.0 : rel(inf_term, outer), kRelSlack, c2);
  return r;
}

CheckReport estimate_chain_suite(int trials, Rng& rng) {
  static constexpr double kPs[] = {1.0, 1.5, 2.0, 3.0};
  CheckReport total{"estimate_chain", 0, {}, 0.0, json::object()};
  for (int t = 0; t < trials; ++t) {
    const auto cells = static_cast<std::size_t>(1 + rng() % 16);
    const SpacePtr space = random_finite_space(rng, cells, 0.5);
    const MeasurableFn f = random_function(space, rng);
    const MeasurableSet F = random_set(space, rng);
    const double p = kPs[rng() % 4];
    const double delta0 = std::pow(10.0, uniform(rng, -3.0, 1.0));
    const CheckReport one = estimate_chain_check(f, p, F, delta0);
    total.trials += 1;
    total.max_residual = std::max(total.max_residual, one.max_residual);
    for (auto v : one.violations) {
      v["trial"] = t;
      total.violations.push_back(std::move(v));
    }
  }
  return total;
}

// ---------------------------------------------------- variational identity

CheckReport alpha_norm_variational_identity(const MeasurableFn& f, double p) {
  require_p(p);
  const MeasureSpace& space = *f.space();
  require(!space.has_tails(), "variational identity needs a finite space");
  const std::size_t k = space.size();
  if (k > 20) fail(ErrorKind::BruteForceTooLarge, std::to_string(k) + " cells exceed the brute-force limit of 20");

  std::vector<double> inside(k);
  std::vector<double> outside(k);
  std::uint32_t natural = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = space.cell(i).weight;
    inside[i] = w * std::pow(std::abs(f.value(i)), p);
    outside[i] = w;
    if (std::abs(f.value(i)) <= 1.0) natural |= 1u << i;
  }
  auto objective = [&](std::uint32_t mask) {
    NeumaierSum s;
    for (std::size_t i = 0; i < k; ++i) s.add(mask & (1u << i) ? inside[i] : outside[i]);
    return s.value();
  };
  double best = kInf;
  std::uint32_t argmin = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    const double v = objective(static_cast<std::uint32_t>(mask));
    if (v < best) {
      best = v;
      argmin = static_cast<std::uint32_t>(mask);
    }
  }
  const double alpha_p = alpha_norm_pow(f, p).value;
  const double at_natural = objective(natural);

  CheckReport r{"variational_identity", 1, {}, 0.0, json::object()};
  r.details = {{"min", best}, {"alpha_p", alpha_p}, {"at_natural_B", at_natural}, {"argmin_mask", argmin}};
  r.observe(std::abs(best - alpha_p) / std::max(1.0, alpha_p), kRelSlack, {{"relation", "min == alpha^p"}});
  r.observe(std::abs(at_natural - best) / std::max(1.0, best), kRelSlack, {{"relation", "{|f|<=1} is a minimizer"}});
  return r;
}

CheckReport variational_identity_suite(int trials, std::size_t max_cells, Rng& rng) {
  static constexpr double kPs[] = {1.0, 1.5, 2.0, 3.0};
  CheckReport total{"variational_identity", 0, {}, 0.0, json::object()};
  for (int t = 0; t < trials; ++t) {
    const auto cells = static_cast<std::size_t>(1 + rng() % max_cells);
    const SpacePtr space = random_finite_space(rng, cells, 0.5);
    const double p = kPs[rng() % 4];
    const CheckReport one = alpha_norm_variational_identity(random_function(space, rng), p);
    total.trials += 1;
    total.max_residual = std::max(total.max_residual, one.max_residual);
    for (auto v : one.violations) {
      v["trial"] = t;
      total.violations.push_back(std::move(v));
    }
  }
  return total;
}

CheckReport alpha_monotone_in_p(const MeasurableFn& f, double p, double q) {
  require_p(p);
  require(q >= p, "alpha monotonicity needs p <= q");
  CheckReport r{"alpha_monotone_in_p", 1, {}, 0.0, json::object()};
  const double lq = finite_or_inf(alpha_norm_pow(f, q));
  const double lp = finite_or_inf(alpha_norm_pow(f, p));
  r.details = {{"alpha_q_pow", number_or_inf(lq)}, {"alpha_p_pow", number_or_inf(lp)}, {"p", p}, {"q", q}};
  r.observe(std::isinf(lp) ? 0.0 : rel(lq, lp), kRelSlack, {{"p", p}, {"q", q}});
  return r;
}

}  // namespace alp
