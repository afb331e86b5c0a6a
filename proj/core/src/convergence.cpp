#include "alp/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alp/errors.hpp"

namespace alp {

namespace {

constexpr Index kTightnessAtomCap = 4096;
constexpr Index kAeAtomDepth = 64;
constexpr double kBudgetShrink = 0.999999;

json trace_json(const std::vector<double>& trace) {
  json a = json::array();
  for (double x : trace) a.push_back(number_or_inf(x));
  return a;
}

std::vector<MeasurableFn> differences(const FnSequence& seq) {
  const MeasurableFn& f = seq.limit();
  std::vector<MeasurableFn> out;
  out.reserve(seq.terms().size());
  for (const auto& fn : seq.terms()) out.push_back(subtract(fn, f));
  return out;
}

double finite_or_inf(const Estimate& e) { return e.finite() ? e.value : kInf; }

ModeResult trace_mode(std::string name, std::vector<double> trace, double tol) {
  ModeResult r;
  r.mode = std::move(name);
  r.verdict = trace_verdict(trace, tol);
  r.trace = std::move(trace);
  return r;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Verdict trace_verdict(const std::vector<double>& trace, double tol) {
  require(tol > 0.0, "tolerance must be positive");
  if (trace.empty()) return Verdict::inconclusive;
  const std::size_t n = trace.size();
  const std::size_t quarter = n - std::max<std::size_t>(1, n / 4);
  const std::size_t half = n - std::max<std::size_t>(1, n / 2);
  const double last_quarter_max = *std::max_element(trace.begin() + static_cast<std::ptrdiff_t>(quarter), trace.end());
  const double last_half_min = *std::min_element(trace.begin() + static_cast<std::ptrdiff_t>(half), trace.end());
  if (last_quarter_max < tol) return Verdict::holds;
  if (last_half_min > 10.0 * tol) return Verdict::fails;
  return Verdict::inconclusive;
}

Verdict combine_all(const std::vector<Verdict>& verdicts) {
  bool all_hold = true;
  for (Verdict v : verdicts) {
    if (v == Verdict::fails) return Verdict::fails;
    if (v != Verdict::holds) all_hold = false;
  }
  return all_hold ? Verdict::holds : Verdict::inconclusive;
}

// -------------------------------------------------------------- FnSequence

FnSequence::FnSequence(SpacePtr space, std::vector<MeasurableFn> terms, std::optional<MeasurableFn> limit,
                       std::string name)
    : space_(std::move(space)), terms_(std::move(terms)), limit_(std::move(limit)), name_(std::move(name)) {
  require(space_ != nullptr, "sequence needs a space");
  require(!terms_.empty(), "sequence needs at least one term");
  for (const auto& t : terms_) require(t.space() == space_, "all terms must share the sequence space");
  require(!limit_ || limit_->space() == space_, "limit must live on the sequence space");
}

FnSequence FnSequence::generate(SpacePtr space, Index n_max, const std::function<MeasurableFn(Index)>& term,
                                std::optional<MeasurableFn> limit, std::string name) {
  require(n_max >= 1, "N_max must be >= 1");
  std::vector<MeasurableFn> terms;
  terms.reserve(static_cast<std::size_t>(n_max));
  for (Index n = 1; n <= n_max; ++n) terms.push_back(term(n));
  return FnSequence(std::move(space), std::move(terms), std::move(limit), std::move(name));
}

const MeasurableFn& FnSequence::limit() const {
  if (!limit_) fail(ErrorKind::MissingLimit, "sequence '" + name_ + "' has no candidate limit");
  return *limit_;
}

json ModeResult::to_json() const {
  return {{"mode", mode},
          {"verdict", std::string(to_string(verdict))},
          {"trace", trace_json(trace)},
          {"evidence", evidence},
          {"witnesses", witnesses}};
}

CheckOptions::CheckOptions() {
  for (int k = 0; k <= 10; ++k) measure_deltas.push_back(std::ldexp(1.0, -k));
  for (int k = 1; k <= 10; ++k) ui_deltas.push_back(std::ldexp(1.0, -k));
}

// --------------------------------------------------------------- distances

double alpha_distance_pow(const MeasurableFn& a, const MeasurableFn& b, double p) {
  require(a.space() == b.space(), "functions live on different spaces");
  const MeasureSpace& space = *a.space();
  if (a.has_nonzero_tail() || b.has_nonzero_tail()) return finite_or_inf(alpha_norm_pow(subtract(a, b), p));
  NeumaierSum s;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double d = std::min(std::abs(a.value(i) - b.value(i)), 1.0);
    if (d > 0.0) s.add(space.cell(i).weight * (p == 1.0 ? d : std::pow(d, p)));
  }
  return s.value();
}

// ------------------------------------------------------------ norm checks

ModeResult check_lp(const FnSequence& seq, double p, const CheckOptions& opts) {
  std::vector<double> trace;
  for (const auto& d : differences(seq)) trace.push_back(finite_or_inf(lp_norm(d, p)));
  ModeResult r = trace_mode("Lp", std::move(trace), opts.tol);
  r.evidence["quantity"] = "||f_n - f||_p";
  return r;
}

ModeResult check_alpha(const FnSequence& seq, double p, const CheckOptions& opts) {
  const MeasurableFn& f = seq.limit();
  std::vector<double> trace;
  for (const auto& fn : seq.terms()) trace.push_back(std::pow(alpha_distance_pow(fn, f, p), 1.0 / p));
  ModeResult r = trace_mode("alpha_p", std::move(trace), opts.tol);
  r.evidence["quantity"] = "||f_n - f||_alpha_p";
  return r;
}

ModeResult check_alpha_cauchy(const FnSequence& seq, double p, const CheckOptions& opts) {
  const Index n_max = seq.size();
  const Index window = std::max<Index>(1, n_max / 8);
  std::vector<double> trace;
  for (Index n = 1; n + 1 <= n_max; ++n) {
    double sup = 0.0;
    for (Index m = n + 1; m <= std::min(n_max, n + window); ++m) {
      sup = std::max(sup, alpha_distance_pow(seq.term(n), seq.term(m), p));
    }
    trace.push_back(std::pow(sup, 1.0 / p));
  }
  if (trace.empty()) trace.push_back(0.0);
  ModeResult r = trace_mode("alpha_cauchy", std::move(trace), opts.tol);
  r.evidence["window"] = window;
  r.evidence["quantity"] = "max_{n<m<=n+W} ||f_n - f_m||_alpha_p";
  return r;
}

// --------------------------------------------------------- measure checks

namespace {

ModeResult measure_mode(std::string name, const std::vector<MeasurableFn>& diffs, const MeasurableSet& within,
                        const CheckOptions& opts, json* per_delta) {
  std::vector<Verdict> verdicts;
  std::vector<double> worst;
  for (double delta : opts.measure_deltas) {
    std::vector<double> trace;
    trace.reserve(diffs.size());
    for (const auto& d : diffs) trace.push_back(finite_or_inf(measure_of(d, delta, within)));
    const Verdict v = trace_verdict(trace, opts.tol);
    verdicts.push_back(v);
    if (per_delta) per_delta->push_back({{"delta", delta}, {"verdict", std::string(to_string(v))}, {"trace", trace_json(trace)}});
    if (worst.empty()) worst.assign(trace.size(), 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i) worst[i] = std::max(worst[i], trace[i]);
  }
  ModeResult r;
  r.mode = std::move(name);
  r.verdict = combine_all(verdicts);
  r.trace = std::move(worst);
  return r;
}

std::vector<MeasurableSet> default_test_sets(const SpacePtr& space) {
  std::vector<MeasurableSet> sets;
  const std::size_t k = space->size();
  for (std::size_t div : {8u, 4u, 2u}) {
    const std::size_t len = std::max<std::size_t>(1, k / div);
    if (k == 0) break;
    MeasurableSet s = MeasurableSet::empty(space);
    for (std::size_t i = 0; i < len; ++i) s.set_fraction(i, 1.0);
    if (sets.empty() || !(sets.back() == s)) sets.push_back(std::move(s));
  }
  if (space->finite_measure()) sets.push_back(MeasurableSet::whole(space));
  return sets;
}

}  // namespace

ModeResult check_in_measure(const FnSequence& seq, const CheckOptions& opts) {
  json per_delta = json::array();
  ModeResult r = measure_mode("in_measure", differences(seq), MeasurableSet::whole(seq.space()), opts, &per_delta);
  r.evidence["per_delta"] = per_delta;
  r.evidence["quantity"] = "max over delta grid of mu(|f_n - f| > delta)";
  return r;
}

ModeResult check_local_in_measure(const FnSequence& seq, const std::vector<MeasurableSet>& test_sets,
                                  const CheckOptions& opts) {
  const std::vector<MeasurableSet> sets = test_sets.empty() ? default_test_sets(seq.space()) : test_sets;
  const auto diffs = differences(seq);
  std::vector<Verdict> verdicts;
  std::vector<double> worst;
  json per_set = json::array();
  for (const auto& s : sets) {
    const Estimate mu = s.measure();
    if (!mu.finite()) fail(ErrorKind::InfiniteMeasureSet, "local convergence test set has infinite measure");
    const ModeResult m = measure_mode("set", diffs, s, opts, nullptr);
    verdicts.push_back(m.verdict);
    per_set.push_back({{"measure", mu.value}, {"verdict", std::string(to_string(m.verdict))}});
    if (worst.empty()) worst.assign(m.trace.size(), 0.0);
    for (std::size_t i = 0; i < m.trace.size(); ++i) worst[i] = std::max(worst[i], m.trace[i]);
  }
  ModeResult r;
  r.mode = "local_in_measure";
  r.verdict = sets.empty() ? Verdict::holds : combine_all(verdicts);
  r.trace = std::move(worst);
  r.evidence["test_sets"] = per_set;
  return r;
}

// --------------------------------------------------------- almost in L_p

namespace {

struct Candidate {
  std::size_t cell;
  double density;
};

// Greedy cover of cells by decreasing density within `budget`, fractional on
// divisible cells. Returns the budget used.
double greedy_cells(MeasurableSet& E, std::vector<Candidate> items, double budget) {
  const MeasureSpace& space = *E.space();
  std::sort(items.begin(), items.end(), [](const Candidate& a, const Candidate& b) { return a.density > b.density; });
  double used = 0.0;
  for (const Candidate& c : items) {
    const Cell& cell = space.cell(c.cell);
    const double left = budget - used;
    if (left <= 0.0) break;
    if (cell.weight <= left) {
      E.set_fraction(c.cell, 1.0);
      used += cell.weight;
    } else if (cell.divisible) {
      E.set_fraction(c.cell, left / cell.weight);
      used = budget;
    }
  }
  return used;
}

ModeResult almost_lp_impl(const FnSequence& seq, double p, const CheckOptions& opts, const ModeResult& alpha) {
  const auto diffs = differences(seq);
  const SpacePtr& space = seq.space();
  const std::size_t first = diffs.size() / 2;

  std::vector<Candidate> items;
  for (std::size_t i = 0; i < space->size(); ++i) {
    double d = 0.0;
    for (std::size_t n = first; n < diffs.size(); ++n) d = std::max(d, std::pow(std::abs(diffs[n].value(i)), p));
    if (d > 0.0 && space->cell(i).weight > 0.0) items.push_back({i, d});
  }
  std::vector<std::size_t> active_tails;
  for (std::size_t t = 0; t < space->tails().size(); ++t) {
    for (std::size_t n = first; n < diffs.size(); ++n) {
      const auto& tv = diffs[n].tail(t);
      if (std::any_of(tv.begin(), tv.end(), [](const TailPiece& pc) { return !pc.is_zero(); })) {
        active_tails.push_back(t);
        break;
      }
    }
  }

  std::vector<Verdict> verdicts;
  json witnesses = json::array();
  std::vector<double> worst;
  for (double delta : opts.almost_deltas) {
    MeasurableSet E = MeasurableSet::empty(space);
    const double budget = kBudgetShrink * delta;
    double tail_budget = 0.0;
    for (std::size_t t : active_tails) {
      const TailFamily& fam = space->tails()[t];
      if (!fam.finite_mass()) continue;
      const double share = 0.5 * budget / static_cast<double>(active_tails.size());
      E.set_tail(t, IndexRanges::from(suffix_below(*space, t, fam.start, share)));
      tail_budget += share;
    }
    greedy_cells(E, items, budget - tail_budget);
    const MeasurableSet rest = E.complement();
    std::vector<double> trace;
    for (const auto& d : diffs) trace.push_back(finite_or_inf(integrate_p(d, p, rest)));
    const Verdict v = trace_verdict(trace, opts.tol);
    verdicts.push_back(v);
    witnesses.push_back({{"delta", delta},
                         {"measure", E.measure().value},
                         {"verdict", std::string(to_string(v))},
                         {"trace", trace_json(trace)}});
    if (worst.empty()) worst.assign(trace.size(), 0.0);
    for (std::size_t i = 0; i < trace.size(); ++i) worst[i] = std::max(worst[i], trace[i]);
  }
  ModeResult r;
  r.mode = "almost_Lp";
  r.trace = std::move(worst);
  r.witnesses = witnesses;
  r.evidence["witness_search"] = "heuristic";
  r.evidence["alpha_verdict"] = std::string(to_string(alpha.verdict));
  const Verdict all = combine_all(verdicts);
  if (alpha.verdict == Verdict::fails) {
    r.verdict = Verdict::fails;
    r.evidence["refuted_by"] = "alpha_p lower bound";
  } else if (all == Verdict::holds) {
    r.verdict = Verdict::holds;
  } else {
    r.verdict = Verdict::inconclusive;
  }
  return r;
}

}  // namespace

ModeResult check_almost_lp(const FnSequence& seq, double p, const CheckOptions& opts) {
  return almost_lp_impl(seq, p, opts, check_alpha(seq, p, opts));
}

// ------------------------------------------------- uniform p-integrability

ModeResult check_uniform_p_integrability(const FnSequence& seq, double p, const CheckOptions& opts) {
  require(!opts.ui_deltas.empty(), "uniform integrability needs a delta grid");
  std::vector<double> U;
  bool bound = false;
  for (double delta : opts.ui_deltas) {
    double sup = 0.0;
    for (const auto& fn : seq.terms()) {
      const ModulusSample s = ac_modulus_at(fn, p, delta);
      sup = std::max(sup, s.omega);
      bound = bound || s.bound_not_value;
    }
    U.push_back(sup);
  }
  ModeResult r;
  r.mode = "uniformly_p_integrable";
  r.trace = U;
  r.evidence["deltas"] = opts.ui_deltas;
  r.evidence["bound_not_value"] = bound;
  const std::size_t k = U.size();
  const double last = U.back();
  bool halving = k >= 3;
  for (std::size_t i = k >= 3 ? k - 2 : k; i < k; ++i) {
    halving = halving && U[i] <= 0.5 * (1.0 + 1e-9) * U[i - 1];
  }
  if (last < opts.tol || halving) {
    r.verdict = Verdict::holds;
  } else if (last > 10.0 * opts.tol && k >= 2 && last > 0.75 * U[k - 2]) {
    r.verdict = Verdict::fails;
  } else {
    r.verdict = Verdict::inconclusive;
  }
  return r;
}

// ---------------------------------------------------------------- tightness

namespace {

// Contribution of one atom or cell to the tightness functional.
double tight_density(double v, double p, bool alpha) {
  const double a = std::abs(v);
  return std::pow(alpha ? std::min(a, 1.0) : a, p);
}

ModeResult holdout_tightness(const FnSequence& seq, double p, const CheckOptions& opts, bool alpha,
                             std::string name) {
  const SpacePtr& space = seq.space();
  const auto& terms = seq.terms();
  const std::size_t half = std::max<std::size_t>(1, terms.size() / 2);

  auto residual = [&](const MeasurableFn& fn, const MeasurableSet& rest) {
    return finite_or_inf(integrate_p(alpha ? pointwise_min_one(fn) : fn, p, rest));
  };

  std::vector<Verdict> verdicts;
  json witnesses = json::array();
  std::vector<double> worst(terms.size(), 0.0);
  for (double eps : opts.epsilons) {
    const double target = std::pow(eps, p);
    MeasurableSet E = MeasurableSet::empty(space);
    if (space->finite_measure()) {
      E = MeasurableSet::whole(space);
    } else {
      struct Item {
        bool atom;
        std::size_t where;  // cell index or tail index
        Index n;
        double weight;
        std::vector<double> contrib;  // per held-in term
      };
      std::vector<Item> items;
      for (std::size_t i = 0; i < space->size(); ++i) {
        const double w = space->cell(i).weight;
        if (w <= 0.0) continue;
        Item it{false, i, 0, w, std::vector<double>(half)};
        bool any = false;
        for (std::size_t n = 0; n < half; ++n) {
          it.contrib[n] = w * tight_density(terms[n].value(i), p, alpha);
          any = any || it.contrib[n] > 0.0;
        }
        if (any) items.push_back(std::move(it));
      }
      for (std::size_t t = 0; t < space->tails().size(); ++t) {
        const TailFamily& fam = space->tails()[t];
        for (Index a = fam.start; a < fam.start + kTightnessAtomCap; ++a) {
          const double w = fam.weight(a);
          Item it{true, t, a, w, std::vector<double>(half)};
          bool any = false;
          for (std::size_t n = 0; n < half; ++n) {
            it.contrib[n] = w * tight_density(terms[n].tail_value(t, a), p, alpha);
            any = any || it.contrib[n] > 0.0;
          }
          if (any) items.push_back(std::move(it));
        }
      }
      std::vector<double> remaining(half);
      const MeasurableSet whole = MeasurableSet::whole(space);
      for (std::size_t n = 0; n < half; ++n) remaining[n] = residual(terms[n], whole);
      auto score = [](const Item& it) { return *std::max_element(it.contrib.begin(), it.contrib.end()) / it.weight; };
      std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) { return score(a) > score(b); });
      for (const Item& it : items) {
        if (*std::max_element(remaining.begin(), remaining.end()) < target) break;
        if (it.atom) {
          IndexRanges r = E.tail(it.where);
          r.add(it.n, it.n + 1);
          E.set_tail(it.where, r);
        } else {
          E.set_fraction(it.where, 1.0);
        }
        for (std::size_t n = 0; n < half; ++n) remaining[n] -= it.contrib[n];
      }
    }
    const MeasurableSet rest = E.complement();
    double sup = 0.0;
    for (std::size_t n = 0; n < terms.size(); ++n) {
      const double v = residual(terms[n], rest);
      worst[n] = std::max(worst[n], v);
      sup = std::max(sup, v);
    }
    const Verdict v = sup < target ? Verdict::holds : Verdict::fails;
    verdicts.push_back(v);
    witnesses.push_back({{"epsilon", eps},
                         {"measure", number_or_inf(finite_or_inf(E.measure()))},
                         {"sup", number_or_inf(sup)},
                         {"verdict", std::string(to_string(v))}});
  }
  ModeResult r;
  r.mode = std::move(name);
  r.verdict = combine_all(verdicts);
  r.trace = std::move(worst);
  r.witnesses = witnesses;
  r.evidence["construction"] = space->finite_measure() ? "E = X" : "greedy on first half, verified on all terms";
  return r;
}

}  // namespace

ModeResult check_alpha_tightness(const FnSequence& seq, double p, const CheckOptions& opts) {
  return holdout_tightness(seq, p, opts, true, "alpha_tight");
}

ModeResult check_lp_tail_control(const FnSequence& seq, double p, const CheckOptions& opts) {
  return holdout_tightness(seq, p, opts, false, "tail_control");
}

// ---------------------------------------------------------------------- ae

ModeResult check_ae(const FnSequence& seq, const CheckOptions& opts) {
  const auto diffs = differences(seq);
  const MeasureSpace& space = *seq.space();
  std::vector<Verdict> verdicts;
  int counts[3] = {0, 0, 0};
  std::vector<double> worst(diffs.size(), 0.0);
  auto point = [&](auto value_at) {
    std::vector<double> trace(diffs.size());
    for (std::size_t n = 0; n < diffs.size(); ++n) {
      trace[n] = std::abs(value_at(diffs[n]));
      worst[n] = std::max(worst[n], trace[n]);
    }
    const Verdict v = trace_verdict(trace, opts.tol);
    verdicts.push_back(v);
    ++counts[static_cast<int>(v)];
  };
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.cell(i).weight > 0.0) point([i](const MeasurableFn& d) { return d.value(i); });
  }
  for (std::size_t t = 0; t < space.tails().size(); ++t) {
    const Index start = space.tails()[t].start;
    for (Index a = start; a < start + kAeAtomDepth; ++a) {
      point([t, a](const MeasurableFn& d) { return d.tail_value(t, a); });
    }
  }
  ModeResult r;
  r.mode = "ae";
  r.verdict = combine_all(verdicts);
  r.trace = std::move(worst);
  r.evidence = {{"points_hold", counts[0]}, {"points_fail", counts[1]}, {"points_inconclusive", counts[2]},
                {"tail_atom_depth", kAeAtomDepth}};
  return r;
}

// ------------------------------------------------------------------- Vitali

namespace {

VitaliReport assemble(std::string variant, ModeResult target, std::vector<ModeResult> legs) {
  VitaliReport r;
  r.variant = std::move(variant);
  bool all_hold = true;
  bool any_fails = false;
  for (const auto& leg : legs) {
    all_hold = all_hold && leg.verdict == Verdict::holds;
    if (leg.verdict == Verdict::fails) {
      any_fails = true;
      r.failing_legs.push_back(leg.mode);
    }
  }
  r.consistent = !((target.verdict == Verdict::holds && any_fails) || (target.verdict == Verdict::fails && all_hold));
  r.target = std::move(target);
  r.legs = std::move(legs);
  return r;
}

ModeResult renamed(ModeResult m, std::string name) {
  m.mode = std::move(name);
  return m;
}

}  // namespace

VitaliReport vitali_classic(const FnSequence& seq, double p, const CheckOptions& opts) {
  std::vector<ModeResult> legs;
  legs.push_back(renamed(check_in_measure(seq, opts), "i_in_measure"));
  legs.push_back(renamed(check_lp_tail_control(seq, p, opts), "ii_a_tail_control"));
  legs.push_back(renamed(check_uniform_p_integrability(seq, p, opts), "ii_b_uniform_p_integrability"));
  VitaliReport r = assemble("classic", check_lp(seq, p, opts), std::move(legs));
  if (seq.space()->finite_measure()) r.note = "finite measure space: tail control holds with E = X";
  return r;
}

VitaliReport vitali_alpha(const FnSequence& seq, double p, const CheckOptions& opts) {
  std::vector<ModeResult> legs;
  legs.push_back(renamed(check_alpha(seq, p, opts), "i_alpha_p"));
  legs.push_back(renamed(check_uniform_p_integrability(seq, p, opts), "ii_uniform_p_integrability"));
  return assemble("alpha", check_lp(seq, p, opts), std::move(legs));
}

VitaliReport vitali_lambda(const FnSequence& seq, double p, const CheckOptions& opts) {
  std::vector<ModeResult> legs;
  legs.push_back(renamed(check_local_in_measure(seq, {}, opts), "i_local_in_measure"));
  legs.push_back(renamed(check_alpha_tightness(seq, p, opts), "ii_alpha_tight"));
  VitaliReport r = assemble("lambda", check_alpha(seq, p, opts), std::move(legs));
  if (seq.space()->finite_measure()) r.note = "finite measure space: tightness holds with E = X";
  return r;
}

json VitaliReport::to_json() const {
  json l = json::array();
  for (const auto& leg : legs) l.push_back(leg.to_json());
  return {{"variant", variant}, {"target", target.to_json()}, {"legs", l},
          {"consistent", consistent}, {"failing_legs", failing_legs}, {"note", note}};
}

// ---------------------------------------------------------- implication matrix

const std::vector<std::string>& implication_chain() {
  static const std::vector<std::string> chain{"Lp", "almost_Lp", "alpha_p", "in_measure", "local_in_measure"};
  return chain;
}

const ModeResult& ConvergenceReport::mode(std::string_view name) const {
  for (const auto& m : modes) {
    if (m.mode == name) return m;
  }
  fail(ErrorKind::InvalidArgument, "no mode named " + std::string(name));
}

json ConvergenceReport::to_json() const {
  json m = json::object();
  for (const auto& mode : modes) m[mode.mode] = mode.to_json();
  json v = json::array();
  for (const auto& [a, b] : violations) v.push_back({a, b});
  return {{"sequence", sequence},
          {"p", p},
          {"tol", tol},
          {"n_max", n_max},
          {"finite_measure", finite_measure},
          {"modes", m},
          {"implication_violations", v},
          {"finite_measure_modes_agree", finite_measure_modes_agree}};
}

ConvergenceReport implication_matrix(const FnSequence& seq, double p, const CheckOptions& opts, bool strict) {
  seq.limit();
  ConvergenceReport r;
  r.sequence = seq.name();
  r.p = p;
  r.tol = opts.tol;
  r.n_max = seq.size();
  r.finite_measure = seq.space()->finite_measure();

  ModeResult alpha = check_alpha(seq, p, opts);
  r.modes.push_back(check_lp(seq, p, opts));
  r.modes.push_back(almost_lp_impl(seq, p, opts, alpha));
  r.modes.push_back(std::move(alpha));
  r.modes.push_back(check_in_measure(seq, opts));
  r.modes.push_back(check_local_in_measure(seq, {}, opts));
  r.modes.push_back(check_ae(seq, opts));
  r.modes.push_back(check_alpha_cauchy(seq, p, opts));
  r.modes.push_back(check_uniform_p_integrability(seq, p, opts));
  r.modes.push_back(check_alpha_tightness(seq, p, opts));

  const auto& chain = implication_chain();
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    for (std::size_t j = i + 1; j < chain.size(); ++j) {
      if (r.mode(chain[i]).verdict == Verdict::holds && r.mode(chain[j]).verdict == Verdict::fails) {
        r.violations.emplace_back(chain[i], chain[j]);
      }
    }
  }
  if (r.finite_measure) {
    const Verdict a = r.mode("alpha_p").verdict;
    r.finite_measure_modes_agree = a == r.mode("in_measure").verdict && a == r.mode("local_in_measure").verdict;
  }
  if (strict && !r.violations.empty()) {
    const auto& [up, down] = r.violations.front();
    fail(ErrorKind::ImplicationViolation, up + " holds but " + down + " fails for sequence '" + seq.name() +
                                              "'; " + up + " trace tail " +
                                              trace_json(r.mode(up).trace).back().dump() + ", " + down +
                                              " trace tail " + trace_json(r.mode(down).trace).back().dump());
  }
  return r;
}

// ----------------------------------------------------- dominated convergence

namespace {

void check_domination(const FnSequence& seq, const MeasurableFn& g) {
  const MeasureSpace& space = *seq.space();
  const double slack = 1e-12;
  for (Index n = 1; n <= seq.size(); ++n) {
    const MeasurableFn& fn = seq.term(n);
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (std::abs(fn.value(i)) > std::abs(g.value(i)) * (1.0 + slack)) {
        fail(ErrorKind::DominationViolated, "term " + std::to_string(n) + " exceeds the dominator on cell " +
                                                std::to_string(space.cell(i).id));
      }
    }
    for (std::size_t t = 0; t < space.tails().size(); ++t) {
      const Index start = space.tails()[t].start;
      for (Index a = start; a < start + kTightnessAtomCap; ++a) {
        if (std::abs(fn.tail_value(t, a)) > std::abs(g.tail_value(t, a)) * (1.0 + slack)) {
          fail(ErrorKind::DominationViolated, "term " + std::to_string(n) + " exceeds the dominator on tail atom " +
                                                  std::to_string(a));
        }
      }
      // Beyond the enumerated atoms, compare matching families by coefficient.
      const TailPiece& pf = fn.tail(t).back();
      const TailPiece& pg = g.tail(t).back();
      if (pf.is_zero()) continue;
      const bool comparable = pf.kind == pg.kind && pf.rate == pg.rate;
      if (!comparable || std::abs(pf.coeff) > std::abs(pg.coeff) * (1.0 + slack)) {
        fail(ErrorKind::DominationViolated, "term " + std::to_string(n) + " is not dominated on the unbounded tail");
      }
    }
  }
}

}  // namespace

json DominatedReport::to_json() const {
  json w = json::array();
  for (const auto& m : dominator.witnesses) {
    w.push_back({{"delta", m.delta}, {"measure", m.set_measure.value},
                 {"complement_integral", number_or_inf(finite_or_inf(m.complement_integral))}});
  }
  return {{"alpha", alpha.to_json()},
          {"integrals", integrals.to_json()},
          {"dominator_membership", std::string(to_string(dominator.verdict))},
          {"dominator_witnesses", w}};
}

DominatedReport dominated_convergence_suite(const FnSequence& seq, double p, const MeasurableFn& g,
                                            const CheckOptions& opts) {
  require(g.space() == seq.space(), "dominator must live on the sequence space");
  const MeasurableFn& f = seq.limit();
  check_domination(seq, g);
  DominatedReport r;
  r.dominator = lambda_p_member(g, p, {0.5});
  if (r.dominator.verdict != Membership::member) {
    fail(ErrorKind::NotMember, "dominator is not in Lambda_p: " + r.dominator.reason);
  }
  r.alpha = check_alpha(seq, p, opts);

  const MeasurableSet rest = r.dominator.witnesses.front().set.complement();
  const double target = integrate_signed(f, rest).value;
  std::vector<double> trace;
  for (const auto& fn : seq.terms()) trace.push_back(std::abs(integrate_signed(fn, rest).value - target));
  r.integrals = trace_mode("integral_on_witness_complement", std::move(trace), opts.tol);
  r.integrals.evidence["limit_integral"] = target;
  return r;
}

}  // namespace alp
