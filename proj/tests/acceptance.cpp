// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "alp/approx.hpp"
#include "alp/families.hpp"
#include "alp/gallery.hpp"
#include "oracles.hpp"

using namespace alp;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) note << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0: no runtime bound
  std::function<void(Outcome&)> body;
};

CheckOptions with_tol(double tol) {
  CheckOptions o;
  o.tol = tol;
  return o;
}

const GalleryCheck* find_check(const GalleryReport& r, const std::string& quantity) {
  for (const GalleryCheck& c : r.checks) {
    if (c.quantity == quantity) return &c;
  }
  return nullptr;
}

std::vector<double> cell_values(const MeasurableFn& f) { return {f.values().begin(), f.values().end()}; }

std::vector<double> cell_weights(const MeasureSpace& s) {
  std::vector<double> w;
  for (const Cell& c : s.cells()) w.push_back(c.weight);
  return w;
}

void gallery_exactness(Outcome& out) {
  double worst = 0.0;
  for (double eps : {0.5, 1.0, 1.9}) {
    for (double p : {1.0, 2.0, 3.0}) {
      for (double d : {1.0, 2.0}) {
        const GalleryReport r = run_entry("unbounded_ball", {{"eps", eps}, {"p", p}, {"d", d}, {"n", 10000}});
        for (const char* q : {"worst alpha_norm(f_n) over n", "worst alpha_norm(f_n / n) over n"}) {
          const GalleryCheck* c = find_check(r, q);
          out.expect(c != nullptr, std::string("missing check ") + q);
          if (c == nullptr) continue;
          const double err = oracle::rel_error(c->computed, eps / 2.0);
          worst = std::max(worst, err);
          out.expect(err <= 1e-12, "relative error above 1e-12");
        }
      }
    }
  }
  out.note << "18 parameter sets, worst relative error " << worst;
}

void nonconvexity(Outcome& out) {
  const GalleryReport r = run_entry("nonconvex", {{"p", 1.0}, {"eps", 1.0}, {"R", 2.0}});
  const long k = r.data.at("K").get<long>();
  const double gk = r.data.at("alpha_norm_g_K").get<double>();
  const double gk1 = r.data.at("alpha_norm_g_K_minus_1").get<double>();
  out.expect(k == 8, "K != 8");
  out.expect(oracle::rel_error(gk, 2.25) <= 1e-12, "||g_K|| != 2.25");
  out.expect(gk1 <= 2.0 * (1 + 1e-12), "K is not minimal");
  const GalleryCheck* inside = find_check(r, "every f_n lies in B_eps");
  out.expect(inside != nullptr && inside->passed, "some f_n outside B_1");
  out.expect(r.passed(), "entry checks failed");
  out.note << "K = " << k << ", ||g_K|| = " << gk << ", ||g_{K-1}|| = " << gk1;
}

void fnorm_axioms(Outcome& out) {
  Rng rng(1);
  int violations = 0;
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const CheckReport r = fnorm_axioms_suite(16, p, 1000, rng);
    violations += static_cast<int>(r.violations.size());
    out.expect(r.trials >= 1000, "fewer trials than requested");
  }
  out.expect(violations == 0, "axiom violations");
  out.note << "4 x 1000 trials on 16 cells, " << violations << " violations";
}

void variational_identity(Outcome& out) {
  Rng rng(2);
  double worst = 0.0;
  int minimizer_misses = 0;
  for (int t = 0; t < 200; ++t) {
    const SpacePtr s = random_finite_space(rng, 1 + rng() % 10);
    const MeasurableFn f = random_function(s, rng);
    const double p = uniform(rng, 1.0, 4.0);
    const std::vector<double> v = cell_values(f);
    const std::vector<double> w = cell_weights(*s);
    const oracle::SubsetMin m = oracle::variational_min(v, w, p);
    worst = std::max(worst, oracle::rel_error(alpha_norm_pow(f, p).value, m.value));
    long double at_small = 0.0L;
    for (std::size_t i = 0; i < v.size(); ++i) at_small += std::abs(v[i]) <= 1.0 ? w[i] * std::pow(std::abs(v[i]), p) : w[i];
    if (oracle::rel_error(static_cast<double>(at_small), m.value) > 1e-12) ++minimizer_misses;
  }
  Rng suite_rng(3);
  const CheckReport lib = variational_identity_suite(200, 10, suite_rng);
  out.expect(worst <= 1e-12, "alpha norm differs from the subset minimum");
  out.expect(minimizer_misses == 0, "{|f| <= 1} not optimal");
  out.expect(lib.passed(), "library identity suite reported violations");
  out.note << "200 instances, worst relative error " << worst << ", minimizer misses " << minimizer_misses;
}

void estimate_chain(Outcome& out) {
  Rng rng(4);
  const CheckReport r = estimate_chain_suite(1000, rng);
  out.expect(r.trials >= 1000, "fewer trials than requested");
  out.expect(r.passed(), "estimate chain violations");
  out.note << r.trials << " instances, " << r.violations.size() << " violations";
}

void vitali_triptych(Outcome& out) {
  using V = Verdict;
  const V H = V::holds;
  const V F = V::fails;
  const CheckOptions o = with_tol(0.01);
  struct Expect {
    FnSequence seq;
    std::map<std::string, std::map<std::string, V>> legs;  // variant -> mode -> verdict
    std::map<std::string, V> targets;
  };
  const std::vector<Expect> rows{
      {chi_shrinking(1024),
       {{"classic", {{"i_in_measure", H}, {"ii_a_tail_control", H}, {"ii_b_uniform_p_integrability", H}}},
        {"alpha", {{"i_alpha_p", H}, {"ii_uniform_p_integrability", H}}},
        {"lambda", {{"i_local_in_measure", H}, {"ii_alpha_tight", H}}}},
       {{"classic", H}, {"alpha", H}, {"lambda", H}}},
      {n_chi_shrinking(1024),
       {{"classic", {{"i_in_measure", H}, {"ii_b_uniform_p_integrability", F}}},
        {"alpha", {{"i_alpha_p", H}, {"ii_uniform_p_integrability", F}}},
        {"lambda", {{"i_local_in_measure", H}, {"ii_alpha_tight", H}}}},
       {{"classic", F}, {"alpha", F}, {"lambda", H}}},
      {escaping_box(1024),
       {{"classic", {{"i_in_measure", F}}},
        {"alpha", {{"i_alpha_p", F}}},
        {"lambda", {{"i_local_in_measure", H}, {"ii_alpha_tight", F}}}},
       {{"classic", F}, {"alpha", F}, {"lambda", F}}},
  };
  for (const Expect& e : rows) {
    const std::map<std::string, VitaliReport> reports{{"classic", vitali_classic(e.seq, 1.0, o)},
                                                      {"alpha", vitali_alpha(e.seq, 1.0, o)},
                                                      {"lambda", vitali_lambda(e.seq, 1.0, o)}};
    for (const auto& [variant, rep] : reports) {
      const std::string where = e.seq.name() + "/" + variant;
      out.expect(rep.consistent, where + " inconsistent");
      out.expect(rep.target.verdict == e.targets.at(variant), where + " target verdict");
      for (const auto& [mode, verdict] : e.legs.at(variant)) {
        bool found = false;
        for (const ModeResult& leg : rep.legs) {
          if (leg.mode != mode) continue;
          found = true;
          out.expect(leg.verdict == verdict, where + " leg " + mode);
        }
        out.expect(found, where + " missing leg " + mode);
      }
    }
  }
  Rng rng(5);
  int inconsistent = 0;
  int finite = 0;
  for (int i = 0; i < 200; ++i) {
    const SuiteInstance inst = random_suite_instance(rng, i);
    if (!inst.seq.space()->finite_measure()) continue;
    ++finite;
    const CheckOptions ro = with_tol(1e-3);
    for (const VitaliReport& r :
         {vitali_classic(inst.seq, inst.p, ro), vitali_alpha(inst.seq, inst.p, ro), vitali_lambda(inst.seq, inst.p, ro)}) {
      if (!r.consistent) ++inconsistent;
    }
  }
  out.expect(finite == 200, "random suite left finite spaces");
  out.expect(inconsistent == 0, "biconditional fired on the random suite");
  out.note << "3 sequences x 3 variants match; " << finite << " random instances, " << inconsistent
           << " inconsistent";
}

void implication_lattice(Outcome& out) {
  int reports = 0;
  int violations = 0;
  int disagreements = 0;
  auto record = [&](const FnSequence& seq, double p, double tol) {
    const ConvergenceReport r = implication_matrix(seq, p, with_tol(tol), false);
    ++reports;
    violations += static_cast<int>(r.violations.size());
    if (r.finite_measure && !r.finite_measure_modes_agree) ++disagreements;
  };
  Rng rng(6);
  for (int i = 0; i < 300; ++i) {
    const SuiteInstance inst = random_suite_instance(rng, i);
    record(inst.seq, inst.p, 1e-3);
  }
  for (double eps : {0.5, 1.0, 1.9}) {
    for (double p : {1.0, 2.0, 3.0}) {
      for (const FnSequence& seq : gallery_sequences(256, eps, p)) record(seq, p, 0.01);
    }
  }
  for (const FnSequence& seq : {chi_shrinking(256), n_chi_shrinking(256), escaping_box(256)}) record(seq, 1.0, 0.01);
  out.expect(violations == 0, "implication chain violated");
  out.expect(disagreements == 0, "finite-measure modes disagree");
  out.note << reports << " reports, " << violations << " violations, " << disagreements << " disagreements";
}

void membership_dichotomy(Outcome& out) {
  const SpacePtr s = dyadic_atoms_space();
  const std::vector<double> deltas = default_member_deltas();
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const MeasurableFn f = dyadic_growth_function(s, p);
    out.expect(lambda_p_member(f, p, deltas).verdict == Membership::member, "dyadic example not a member");
    out.expect(!lp_member(f, p), "dyadic example in L_p");
    const ACModulusCurve c = ac_modulus(f, p, deltas);
    double floor = std::numeric_limits<double>::infinity();
    for (const ModulusSample& m : c.samples) floor = std::min(floor, m.omega);
    out.expect(floor >= 1.0, "modulus tends to zero");
    for (double eps : {0.5, 0.1, 0.01}) {
      const Truncation t = truncate_to_lp(f, p, eps);
      out.expect(t.removed_measure.value < std::pow(eps, p), "removed measure too large");
      out.expect(t.g_integral.finite(), "truncation not integrable");
      out.expect(std::pow(t.distance.value, p) <= t.removed_measure.value * (1 + 1e-12) + 1e-15,
                 "distance exceeds removed measure");
      out.expect(t.distance.value < eps, "distance not below eps");
    }
  }
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0}) {
    const GalleryReport r = run_entry("one_over_x", {{"p", p}});
    out.expect(r.passed(), "one_over_x checks failed");
    const GalleryCheck* a = find_check(r, "alpha_norm^p");
    const GalleryCheck* lam = find_check(r, "lambda_p membership");
    const GalleryCheck* lp = find_check(r, "L_p membership");
    out.expect(a && lam && lp && lam->passed && lp->passed, "one_over_x membership");
    if (a) {
      const double expected = std::numbers::pi * std::numbers::pi / 3.0 + 2.0 * oracle::zeta(p);
      worst = std::max(worst, oracle::rel_error(a->computed, expected));
    }
  }
  out.expect(worst <= 1e-8, "one_over_x alpha norm off");
  out.note << "dyadic example member/not L_p for p in {1,1.5,2,3}; one_over_x worst relative error " << worst;
}

MeasurableFn random_member(Rng& rng) {
  const bool geometric = rng() % 2 == 0;
  const double a = uniform(rng, 0.2, 2.0);
  const SpacePtr s = geometric ? make_space({{0, uniform(rng, 0.1, 1.0), true}, {1, uniform(rng, 0.1, 1.0), true}},
                                            {TailFamily::geometric(a, uniform(rng, 0.2, 0.8), 1)})
                               : make_space({{0, uniform(rng, 0.1, 1.0), true}},
                                            {TailFamily::power(a, uniform(rng, 1.5, 4.0), 1)});
  std::vector<double> v(s->size());
  for (double& x : v) x = uniform(rng, -5.0, 5.0);
  MeasurableFn f(s, v);
  const double b = uniform(rng, 0.1, 3.0) * (rng() % 2 ? 1.0 : -1.0);
  f.set_tail(0, {geometric ? TailPiece::geometric(1, b, uniform(rng, 0.5, 3.0))
                           : TailPiece::power(1, b, -uniform(rng, 0.0, 3.0))});
  return f;
}

void approximation(Outcome& out) {
  Rng rng(7);
  int ladder_trials = 0;
  for (int t = 0; t < 200; ++t) {
    const SpacePtr s = random_finite_space(rng, 16);
    const MeasurableFn f = random_function(s, rng);
    for (const MeasurableFn& sk : simple_ladder(f, 10)) {
      for (std::size_t i = 0; i < s->size(); ++i) out.expect(std::abs(sk.value(i)) <= std::abs(f.value(i)), "ladder");
    }
    ++ladder_trials;
  }
  for (int t = 0; t < 100; ++t) {
    const MeasurableFn f = random_member(rng);
    for (const MeasurableFn& sk : simple_ladder(f, 8)) {
      for (std::size_t i = 0; i < f.space()->size(); ++i) {
        out.expect(std::abs(sk.value(i)) <= std::abs(f.value(i)), "ladder on cells");
      }
      for (Index n = 1; n <= 200; ++n) out.expect(std::abs(sk.tail_value(0, n)) <= std::abs(f.tail_value(0, n)), "ladder on tail");
    }
    ++ladder_trials;
  }

  int truncations = 0;
  int nontrivial = 0;
  int misses = 0;
  for (int t = 0; t < 500; ++t) {
    const double p = uniform(rng, 1.0, 3.0);
    const double eps = std::pow(10.0, uniform(rng, -2.0, 0.0));
    const MeasurableFn f = random_member(rng);
    const Truncation tr = truncate_to_lp(f, p, eps);
    ++truncations;
    if (!tr.removed.is_empty()) ++nontrivial;
    if (!(tr.distance.value < eps && tr.removed_measure.value < std::pow(eps, p) && tr.g_integral.finite())) ++misses;
  }
  out.expect(misses == 0, "truncation certificate missed");

  GridBox b;
  b.lo[0] = -2.0;
  b.hi[0] = 2.0;
  b.cells[0] = 800;
  const GridFn box = GridFn::sample(b, [](const std::array<double, 3>& x) { return std::abs(x[0]) < 1.0 ? 1.0 : 0.0; });
  std::vector<double> errors;
  for (double h : {0.1, 0.05, 0.025}) {
    const double e = mollify(box, 1.0, h).alpha_distance;
    out.expect(e <= h, "mollifier error above h");
    errors.push_back(e);
  }
  const double r1 = errors[0] / errors[1];
  const double r2 = errors[1] / errors[2];
  out.expect(r1 > 1.8 && r1 < 2.2 && r2 > 1.8 && r2 < 2.2, "mollifier rate not first order");
  out.note << ladder_trials << " ladder trials, " << truncations << " truncations (" << nontrivial << " removing a set) with " << misses
           << " misses, mollifier errors " << errors[0] << " " << errors[1] << " " << errors[2];
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gallery exactness", 1.0, gallery_exactness},
      {2, "non-convexity witness", 1.0, nonconvexity},
      {3, "F-norm axiom suite", 10.0, fnorm_axioms},
      {4, "variational identity oracle", 30.0, variational_identity},
      {5, "estimate chain", 0.0, estimate_chain},
      {6, "Vitali triptych", 60.0, vitali_triptych},
      {7, "implication lattice", 0.0, implication_lattice},
      {8, "membership dichotomy", 0.0, membership_dichotomy},
      {9, "approximation certificates", 0.0, approximation},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0) out.expect(secs < c.budget_s, "runtime over budget");
    if (!out.ok) ++failures;
    std::printf("%s  %d %-28s %8.3f s  %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                out.note.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
