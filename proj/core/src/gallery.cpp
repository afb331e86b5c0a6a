#include "alp/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "alp/errors.hpp"
#include "alp/families.hpp"

namespace alp {

namespace {

constexpr double kExactTol = 1e-12;
constexpr double kTailTol = 1e-8;

double rel_error(double computed, double expected) {
  if (computed == expected) return 0.0;
  if (std::isinf(computed) || std::isinf(expected)) return kInf;
  return std::abs(computed - expected) / std::max(std::abs(expected), 1e-300);
}

GalleryCheck compare(std::string quantity, double computed, double expected, double tol, std::string provenance,
                     std::string citation) {
  GalleryCheck c{std::move(quantity), computed, expected, rel_error(computed, expected), tol,
                 std::move(provenance), std::move(citation), false};
  c.passed = c.rel_error <= tol;
  return c;
}

GalleryCheck flag(std::string quantity, bool ok, bool expected, std::string provenance, std::string citation) {
  GalleryCheck c{std::move(quantity), ok ? 1.0 : 0.0, expected ? 1.0 : 0.0, ok == expected ? 0.0 : 1.0, 0.0,
                 std::move(provenance), std::move(citation), ok == expected};
  return c;
}

std::vector<GalleryInfo> build_catalog() {
  return {
      {"unbounded_ball",
       "f_n = n on a cube E_n of measure (eps/2)^p, cubes pairwise disjoint",
       {{"eps", 1.0, "0 < eps < 2"}, {"p", 1.0, "p >= 1"}, {"d", 1.0, "d in {1, 2, 3}"},
        {"n", 10000.0, "integer 1 <= n <= 1000000"}},
       {{"alpha_norm(f_n)", "eps/2 for every n", "closed_form", "single-cube integral of min(n,1)^p"},
        {"alpha_norm(f_n / n)", "eps/2 for every n", "closed_form", "single-cube integral of 1"}}},
      {"nonconvex",
       "g_K = (1/K) sum f_n leaves the ball B_R although every f_n lies in B_eps",
       {{"eps", 1.0, "0 < eps < 2"}, {"p", 1.0, "p >= 1"}, {"R", 2.0, "R > 0"}, {"d", 1.0, "d in {1, 2, 3}"}},
       {{"alpha_norm(g_K)^p", "(eps/2)^p K^-p sum_{n<=K} n^p", "closed_form", "disjoint cubes, values n/K <= 1"},
        {"K", "minimal K with (eps/2)^p K^-p sum n^p > R^p", "derived", "scan of the closed form"}}},
      {"frechet_pathology",
       "f(x) = x on [0, inf): the Frechet functional of f/k stays 1 while alpha seminorms vanish",
       {{"p", 1.0, "p >= 1"}, {"n", 64.0, "integer 1 <= n <= 100000"}, {"m", 16.0, "integer 1 <= m <= 100000"}},
       {{"frechet_mu(f/k)", "1 for every k", "closed_form", "mu(|f/k| > delta) is infinite for every delta"},
        {"alpha_seminorm_F(f/k)^p", "sum_{j<=m} min(j/k,1)^p on F = first m unit atoms", "closed_form",
         "finite sum over the window"}}},
      {"one_over_x",
       "step model of 1/x on the line: atoms near 0 of weight 2/n^2 carrying n, unit atoms carrying 1/n",
       {{"p", 2.0, "p >= 1"}},
       {{"alpha_norm^p", "pi^2/3 + 2 zeta(p) for p > 1, infinite for p = 1", "derived",
         "Basel sum plus zeta tail"},
        {"lambda_p membership", "member iff p > 1", "closed_form", "summability of n^-p"},
        {"L_p membership", "never", "closed_form", "divergence of sum 2 n^(p-2)"}}},
      {"finite_collapse",
       "random functions on finite-measure spaces are always in Lambda_p",
       {{"p", 1.0, "p >= 1"}, {"trials", 100.0, "integer 1 <= trials <= 100000"},
        {"cells", 16.0, "integer 1 <= cells <= 4096"}, {"seed", 1.0, "integer >= 0"}},
       {{"member fraction", "1", "closed_form", "every finite-valued function on a finite space"}}},
  };
}

const GalleryInfo& find_entry(const std::string& name) {
  for (const GalleryInfo& e : list_entries()) {
    if (e.name == name) return e;
  }
  fail(ErrorKind::UnknownEntry, "unknown gallery entry '" + name + "'");
}

GalleryParams resolve(const GalleryInfo& info, const GalleryParams& given) {
  GalleryParams out;
  for (const GalleryParam& p : info.params) out[p.name] = p.default_value;
  for (const auto& [k, v] : given) {
    if (!out.contains(k)) fail(ErrorKind::ParamOutOfDomain, "entry '" + info.name + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) fail(ErrorKind::ParamOutOfDomain, "parameter '" + k + "' must be finite");
    out[k] = v;
  }
  return out;
}

void domain(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::ParamOutOfDomain, what);
}

Index integer_param(const GalleryParams& ps, const std::string& key, Index lo, Index hi) {
  const double v = ps.at(key);
  domain(v == std::floor(v) && v >= static_cast<double>(lo) && v <= static_cast<double>(hi),
         key + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<Index>(v);
}

double exponent_param(const GalleryParams& ps) {
  const double p = ps.at("p");
  domain(p >= 1.0, "p must be >= 1");
  return p;
}

double eps_param(const GalleryParams& ps) {
  const double eps = ps.at("eps");
  domain(eps > 0.0 && eps < 2.0, "eps must lie in (0, 2) so that the cubes are disjoint");
  return eps;
}

/// Measure of one cube of side (ε/2)^{p/d}.
double cube_volume(double eps, double p, int d) { return std::pow(std::pow(eps / 2.0, p / d), d); }

/// N disjoint cubes (ids 1..N) plus the rest of the space as unit atoms.
SpacePtr cube_space(Index count, double volume) {
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(count));
  for (Index n = 1; n <= count; ++n) cells.push_back({static_cast<int>(n), volume, true});
  return make_space(std::move(cells), {TailFamily::constant(1.0, 1)});
}

GalleryReport run_unbounded_ball(const GalleryParams& ps) {
  const double eps = eps_param(ps);
  const double p = exponent_param(ps);
  const auto d = static_cast<int>(integer_param(ps, "d", 1, 3));
  const Index n_max = integer_param(ps, "n", 1, 1000000);
  const double vol = cube_volume(eps, p, d);
  const double target = eps / 2.0;

  GalleryReport r;
  double worst_f = target;
  double worst_scaled = target;
  json samples = json::array();
  for (Index n = 1; n <= n_max; ++n) {
    const SpacePtr space = make_space({{static_cast<int>(n), vol, true}}, {TailFamily::constant(1.0, 1)});
    const MeasurableFn f(space, {static_cast<double>(n)});
    const double a = alpha_norm(f, p).value;
    const double b = alpha_norm(scale(f, 1.0 / static_cast<double>(n)), p).value;
    if (rel_error(a, target) > rel_error(worst_f, target)) worst_f = a;
    if (rel_error(b, target) > rel_error(worst_scaled, target)) worst_scaled = b;
    if (n == 1 || n == n_max || (n & (n - 1)) == 0) {
      samples.push_back({{"n", n}, {"alpha_f", a}, {"alpha_scaled", b}, {"lp_f", lp_norm(f, p).value}});
    }
  }
  r.checks.push_back(compare("worst alpha_norm(f_n) over n", worst_f, target, kExactTol, "closed_form",
                             "single-cube integral of min(n,1)^p"));
  r.checks.push_back(compare("worst alpha_norm(f_n / n) over n", worst_scaled, target, kExactTol, "closed_form",
                             "single-cube integral of 1"));
  r.data["cube_volume"] = vol;
  r.data["samples"] = std::move(samples);
  r.data["note"] = "scalars 1/n tend to 0 while alpha_norm(f_n / n) stays eps/2: the ball is not topologically bounded";
  return r;
}

GalleryReport run_nonconvex(const GalleryParams& ps) {
  const double eps = eps_param(ps);
  const double p = exponent_param(ps);
  const double radius = ps.at("R");
  domain(radius > 0.0, "R must be positive");
  const auto d = static_cast<int>(integer_param(ps, "d", 1, 3));
  const double scale_p = std::pow(eps / 2.0, p);
  const double target = std::pow(radius, p);

  constexpr Index kMaxK = 1000000;
  Index k = 0;
  NeumaierSum powers;
  double closed_k = 0.0;
  double closed_prev = 0.0;
  while (true) {
    ++k;
    domain(k <= kMaxK, "no K <= 1000000 leaves the ball of radius R");
    closed_prev = closed_k;
    powers.add(std::pow(static_cast<double>(k), p));
    closed_k = scale_p * powers.value() / std::pow(static_cast<double>(k), p);
    if (closed_k > target * (1.0 + kExactTol)) break;
  }

  const double vol = cube_volume(eps, p, d);
  const SpacePtr space = cube_space(k, vol);
  auto average = [&](Index count) {
    std::vector<double> vals(static_cast<std::size_t>(k), 0.0);
    for (Index n = 1; n <= count; ++n) vals[static_cast<std::size_t>(n - 1)] += static_cast<double>(n) / count;
    return MeasurableFn(space, std::move(vals));
  };

  double worst_member = 0.0;
  for (Index n = 1; n <= k; ++n) {
    std::vector<double> vals(static_cast<std::size_t>(k), 0.0);
    vals[static_cast<std::size_t>(n - 1)] = static_cast<double>(n);
    worst_member = std::max(worst_member, alpha_norm(MeasurableFn(space, std::move(vals)), p).value);
  }
  const double g_k = alpha_norm_pow(average(k), p).value;
  const double g_prev = k > 1 ? alpha_norm_pow(average(k - 1), p).value : 0.0;
  const bool engine_minimal = g_k > target * (1.0 + kExactTol) && g_prev <= target * (1.0 + kExactTol);

  GalleryReport r;
  r.checks.push_back(compare("alpha_norm(g_K)^p", g_k, closed_k, kExactTol, "closed_form",
                             "disjoint cubes, values n/K <= 1"));
  r.checks.push_back(compare("alpha_norm(g_{K-1})^p", g_prev, closed_prev, kExactTol, "closed_form",
                             "disjoint cubes, values n/(K-1) <= 1"));
  r.checks.push_back(compare("K", engine_minimal ? static_cast<double>(k) : -1.0, static_cast<double>(k), 0.0,
                             "derived", "scan of the closed form"));
  r.checks.push_back(compare("max_n alpha_norm(f_n)", worst_member, eps / 2.0, kExactTol, "closed_form",
                             "single-cube integral"));
  r.checks.push_back(flag("every f_n lies in B_eps", worst_member < eps, true, "closed_form", "eps/2 < eps"));
  r.checks.push_back(flag("g_K lies outside B_R", std::pow(g_k, 1.0 / p) > radius, true, "derived",
                          "minimal K of the scan"));
  r.data["K"] = k;
  r.data["alpha_norm_g_K"] = std::pow(g_k, 1.0 / p);
  r.data["alpha_norm_g_K_minus_1"] = std::pow(g_prev, 1.0 / p);
  r.data["cube_volume"] = vol;
  return r;
}

GalleryReport run_frechet_pathology(const GalleryParams& ps) {
  const double p = exponent_param(ps);
  const Index n_max = integer_param(ps, "n", 1, 100000);
  const Index m = integer_param(ps, "m", 1, 100000);
  const SpacePtr space = make_space({}, {TailFamily::constant(1.0, 1)});
  MeasurableFn f(space);
  f.set_tail(0, {TailPiece::power(1, 1.0, -1.0)});
  MeasurableSet window = MeasurableSet::empty(space);
  window.set_tail(0, IndexRanges::span(1, m + 1));

  double worst_frechet = 1.0;
  double worst_semi_rel = 0.0;
  double worst_semi = 0.0;
  double worst_semi_expected = 0.0;
  bool alpha_infinite = true;
  json trace = json::array();
  for (Index k = 1; k <= n_max; ++k) {
    const MeasurableFn g = scale(f, 1.0 / static_cast<double>(k));
    const double fr = frechet_mu(g);
    if (std::abs(fr - 1.0) > std::abs(worst_frechet - 1.0)) worst_frechet = fr;
    const double semi = std::pow(alpha_seminorm_on(g, p, window).value, p);
    NeumaierSum closed;
    for (Index j = 1; j <= m; ++j) closed.add(std::pow(std::min(static_cast<double>(j) / k, 1.0), p));
    if (rel_error(semi, closed.value()) >= worst_semi_rel) {
      worst_semi_rel = rel_error(semi, closed.value());
      worst_semi = semi;
      worst_semi_expected = closed.value();
    }
    const double a = alpha_norm(g, p).value;
    alpha_infinite = alpha_infinite && std::isinf(a);
    trace.push_back({{"k", k}, {"frechet_mu", fr}, {"alpha_seminorm_F", std::pow(semi, 1.0 / p)},
                     {"alpha_norm", number_or_inf(a)}});
  }

  GalleryReport r;
  r.checks.push_back(compare("worst frechet_mu(f/k) over k", worst_frechet, 1.0, kExactTol, "closed_form",
                             "mu(|f/k| > delta) is infinite for every delta"));
  r.checks.push_back(compare("worst alpha_seminorm_F(f/k)^p over k", worst_semi, worst_semi_expected, kExactTol,
                             "closed_form", "finite sum over the window"));
  r.checks.push_back(flag("alpha_norm(f/k) infinite for every k", alpha_infinite, true, "closed_form",
                          "min(|f/k|,1) = 1 on infinitely many unit atoms"));
  r.data["trace"] = std::move(trace);
  r.data["note"] = "f/k tends to 0 pointwise and locally in alpha_p while frechet_mu stays at 1";
  return r;
}

GalleryReport run_one_over_x(const GalleryParams& ps) {
  const double p = exponent_param(ps);
  const SpacePtr space = make_space({}, {TailFamily::power(2.0, 2.0, 1), TailFamily::constant(2.0, 1)});
  MeasurableFn f(space);
  f.set_tail(0, {TailPiece::power(1, 1.0, -1.0)});
  f.set_tail(1, {TailPiece::power(1, 1.0, 1.0)});

  const Estimate a = alpha_norm_pow(f, p);
  const double expected = p > 1.0 ? std::numbers::pi * std::numbers::pi / 3.0 + 2.0 * std::riemann_zeta(p) : kInf;
  const MembershipResult mem = lambda_p_member(f, p, default_member_deltas());
  const bool in_lp = lp_member(f, p);
  const ACModulusCurve omega = ac_modulus(f, p, {0.5, 0.25, 0.125, 0.0625, 0.03125});

  GalleryReport r;
  r.checks.push_back(compare("alpha_norm^p", a.value, expected, kTailTol, "derived", "Basel sum plus zeta tail"));
  r.checks.push_back(flag("lambda_p membership", mem.verdict == Membership::member, p > 1.0, "closed_form",
                          "summability of n^-p"));
  r.checks.push_back(flag("L_p membership", in_lp, false, "closed_form", "divergence of sum 2 n^(p-2)"));
  if (mem.verdict == Membership::member) {
    bool certificates = true;
    for (const MembershipWitness& w : mem.witnesses) {
      certificates = certificates && w.set_measure.value + w.set_measure.error < w.delta && w.complement_integral.finite();
    }
    r.checks.push_back(flag("truncation certificates", certificates, true, "closed_form",
                            "every witness has measure below delta and integrable complement"));
  }
  json modulus = json::array();
  for (const ModulusSample& s : omega.samples) modulus.push_back({{"delta", s.delta}, {"omega", number_or_inf(s.omega)}});
  r.data["alpha_norm_pow_error"] = a.error;
  r.data["membership"] = std::string(to_string(mem.verdict));
  r.data["membership_reason"] = mem.reason;
  r.data["ac_modulus"] = std::move(modulus);
  return r;
}

GalleryReport run_finite_collapse(const GalleryParams& ps) {
  const double p = exponent_param(ps);
  const Index trials = integer_param(ps, "trials", 1, 100000);
  const Index cells = integer_param(ps, "cells", 1, 4096);
  const Index seed = integer_param(ps, "seed", 0, Index{1} << 53);
  Rng rng(static_cast<std::uint64_t>(seed));
  Index members = 0;
  json failures = json::array();
  for (Index t = 0; t < trials; ++t) {
    const SpacePtr space = random_finite_space(rng, static_cast<std::size_t>(cells));
    const MeasurableFn f = random_function(space, rng);
    const MembershipResult m = lambda_p_member(f, p, default_member_deltas());
    if (m.verdict == Membership::member) {
      ++members;
    } else if (failures.size() < 8) {
      failures.push_back({{"trial", t}, {"verdict", std::string(to_string(m.verdict))}, {"reason", m.reason}});
    }
  }
  GalleryReport r;
  r.checks.push_back(compare("member fraction", static_cast<double>(members) / static_cast<double>(trials), 1.0, 0.0,
                             "closed_form", "every finite-valued function on a finite space"));
  r.data["trials"] = trials;
  r.data["members"] = members;
  r.data["failures"] = std::move(failures);
  return r;
}

}  // namespace

json GalleryInfo::to_json() const {
  json ps = json::array();
  for (const GalleryParam& p : params) ps.push_back({{"name", p.name}, {"default", p.default_value}, {"domain", p.domain}});
  json ex = json::array();
  for (const GalleryExpectation& e : expected) {
    ex.push_back({{"quantity", e.quantity},
                  {"expression", e.expression},
                  {"provenance", e.provenance},
                  {"citation", e.citation}});
  }
  return {{"name", name}, {"summary", summary}, {"params", std::move(ps)}, {"expected", std::move(ex)}};
}

bool GalleryReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const GalleryCheck& c) { return c.passed; });
}

json GalleryReport::to_json() const {
  json cs = json::array();
  for (const GalleryCheck& c : checks) {
    cs.push_back({{"quantity", c.quantity},
                  {"computed", number_or_inf(c.computed)},
                  {"expected", number_or_inf(c.expected)},
                  {"rel_error", number_or_inf(c.rel_error)},
                  {"tolerance", c.tolerance},
                  {"provenance", c.provenance},
                  {"citation", c.citation},
                  {"passed", c.passed}});
  }
  return {{"entry", entry}, {"params", params}, {"passed", passed()}, {"checks", std::move(cs)}, {"data", data}};
}

const std::vector<GalleryInfo>& list_entries() {
  static const std::vector<GalleryInfo> catalog = build_catalog();
  return catalog;
}

GalleryReport run_entry(const std::string& name, const GalleryParams& params) {
  const GalleryInfo& info = find_entry(name);
  const GalleryParams ps = resolve(info, params);
  GalleryReport r;
  if (name == "unbounded_ball") {
    r = run_unbounded_ball(ps);
  } else if (name == "nonconvex") {
    r = run_nonconvex(ps);
  } else if (name == "frechet_pathology") {
    r = run_frechet_pathology(ps);
  } else if (name == "one_over_x") {
    r = run_one_over_x(ps);
  } else {
    r = run_finite_collapse(ps);
  }
  r.entry = name;
  r.params = ps;
  return r;
}

std::vector<FnSequence> gallery_sequences(Index n_max, double eps, double p) {
  require(n_max >= 1, "N_max must be >= 1");
  require(eps > 0.0 && eps < 2.0 && p >= 1.0, "gallery sequences need 0 < eps < 2 and p >= 1");
  const SpacePtr space = cube_space(n_max, std::pow(eps / 2.0, p));
  auto spike = [&](bool unit_height) {
    return [space, unit_height, n_max](Index n) {
      std::vector<double> vals(static_cast<std::size_t>(n_max), 0.0);
      vals[static_cast<std::size_t>(n - 1)] = unit_height ? 1.0 : static_cast<double>(n);
      return MeasurableFn(space, std::move(vals));
    };
  };
  std::vector<FnSequence> out;
  out.push_back(FnSequence::generate(space, n_max, spike(false), MeasurableFn(space), "ball_spikes"));
  out.push_back(FnSequence::generate(space, n_max, spike(true), MeasurableFn(space), "ball_spikes_scaled"));
  return out;
}

}  // namespace alp
