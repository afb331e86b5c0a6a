#include <doctest.h>

#include <cmath>
#include <map>

#include "alp/families.hpp"
#include "expect_error.hpp"

using namespace alp;

namespace {

CheckOptions opts_with_tol(double tol) {
  CheckOptions o;
  o.tol = tol;
  return o;
}

std::map<std::string, Verdict> verdicts(const ConvergenceReport& r) {
  std::map<std::string, Verdict> out;
  for (const ModeResult& m : r.modes) out[m.mode] = m.verdict;
  return out;
}

constexpr Verdict H = Verdict::holds;
constexpr Verdict F = Verdict::fails;

}  // namespace

TEST_CASE("trace rule") {
  const std::vector<double> down{1, 0.5, 0.1, 0.01, 0.001, 0.0001, 0.0, 0.0};
  CHECK(trace_verdict(down, 0.01) == Verdict::holds);
  const std::vector<double> flat(8, 1.0);
  CHECK(trace_verdict(flat, 0.01) == Verdict::fails);
  const std::vector<double> between(8, 0.05);
  CHECK(trace_verdict(between, 0.01) == Verdict::inconclusive);
  std::vector<double> blip = down;
  blip[7] = 0.02;
  CHECK(trace_verdict(blip, 0.01) == Verdict::inconclusive);
  CHECK(trace_verdict({}, 0.01) == Verdict::inconclusive);
}

TEST_CASE("combining verdicts") {
  CHECK(combine_all({H, H}) == H);
  CHECK(combine_all({H, F, Verdict::inconclusive}) == F);
  CHECK(combine_all({H, Verdict::inconclusive}) == Verdict::inconclusive);
}

TEST_CASE("three canonical sequences on N = 1024") {
  const CheckOptions o = opts_with_tol(0.01);
  struct Row {
    FnSequence seq;
    std::map<std::string, Verdict> expected;
  };
  const std::vector<Row> rows{
      {chi_shrinking(1024),
       {{"Lp", H}, {"almost_Lp", H}, {"alpha_p", H}, {"in_measure", H}, {"local_in_measure", H},
        {"uniformly_p_integrable", H}, {"alpha_tight", H}}},
      {n_chi_shrinking(1024),
       {{"Lp", F}, {"almost_Lp", H}, {"alpha_p", H}, {"in_measure", H}, {"local_in_measure", H},
        {"uniformly_p_integrable", F}, {"alpha_tight", H}}},
      {escaping_box(1024),
       {{"Lp", F}, {"almost_Lp", F}, {"alpha_p", F}, {"in_measure", F}, {"local_in_measure", H},
        {"uniformly_p_integrable", H}, {"alpha_tight", F}}},
  };
  for (const Row& row : rows) {
    CAPTURE(row.seq.name());
    const ConvergenceReport r = implication_matrix(row.seq, 1.0, o);
    const auto got = verdicts(r);
    for (const auto& [mode, v] : row.expected) {
      CAPTURE(mode);
      CHECK(got.at(mode) == v);
    }
    CHECK(r.violations.empty());
    CHECK(r.finite_measure_modes_agree);
  }
}

TEST_CASE("Vitali legs agree with their targets on the canonical sequences") {
  const CheckOptions o = opts_with_tol(0.01);
  for (const FnSequence& seq : {chi_shrinking(512), n_chi_shrinking(512), escaping_box(512)}) {
    CAPTURE(seq.name());
    CHECK(vitali_classic(seq, 1.0, o).consistent);
    CHECK(vitali_alpha(seq, 1.0, o).consistent);
    CHECK(vitali_lambda(seq, 1.0, o).consistent);
  }
  const VitaliReport escape = vitali_lambda(escaping_box(512), 1.0, o);
  CHECK(escape.target.verdict == F);
  CHECK_FALSE(escape.failing_legs.empty());
}

TEST_CASE("random suite respects the implication chain") {
  Rng rng(41);
  const CheckOptions o = opts_with_tol(1e-3);
  for (int i = 0; i < 60; ++i) {
    const SuiteInstance inst = random_suite_instance(rng, i);
    CAPTURE(to_string(inst.kind));
    const ConvergenceReport r = implication_matrix(inst.seq, inst.p, o, false);
    CHECK(r.violations.empty());
    CHECK(r.finite_measure_modes_agree);
    const auto got = verdicts(r);
    switch (inst.kind) {
      case SuiteKind::geometric:
        for (const auto& m : implication_chain()) CHECK(got.at(m) == H);
        break;
      case SuiteKind::alternating:
        for (const auto& m : implication_chain()) CHECK(got.at(m) == F);
        break;
      case SuiteKind::spike:
        CHECK(got.at("Lp") == F);
        CHECK(got.at("alpha_p") == H);
        break;
    }
  }
}

TEST_CASE("strict mode is silent when the chain holds") {
  CHECK(error_kind([] { implication_matrix(escaping_box(64), 1.0, opts_with_tol(0.01), true); }) == std::nullopt);
}

TEST_CASE("Cauchy in alpha implies convergence to the limit") {
  Rng rng(42);
  const CheckOptions o = opts_with_tol(1e-3);
  for (int i = 0; i < 30; ++i) {
    const SuiteInstance inst = random_geometric_instance(rng, 64);
    const ModeResult c = check_alpha_cauchy(inst.seq, inst.p, o);
    if (c.verdict == H) CHECK(check_alpha(inst.seq, inst.p, o).verdict == H);
  }
}

TEST_CASE("scalar multiples shrink in alpha") {
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const SpacePtr s = random_finite_space(rng, 12);
    std::vector<double> v(s->size());
    for (double& x : v) x = uniform(rng, -10.0, 10.0);
    const FnSequence seq = scaled_sequence(MeasurableFn(s, v), 4096);
    CHECK(check_alpha(seq, 2.0, opts_with_tol(0.05)).verdict == H);
    const ModeResult m = check_alpha(seq, 2.0, opts_with_tol(0.05));
    for (std::size_t i = 1; i < m.trace.size(); ++i) CHECK(m.trace[i] <= m.trace[i - 1] * (1 + 1e-12));
  }
}

TEST_CASE("dominated convergence") {
  const CheckOptions o = opts_with_tol(0.01);
  SUBCASE("indicator sequence under the constant one") {
    const FnSequence seq = chi_shrinking(256);
    MeasurableFn g(seq.space(), std::vector<double>(seq.space()->size(), 1.0));
    const DominatedReport r = dominated_convergence_suite(seq, 1.0, g, o);
    CHECK(r.dominator.verdict == Membership::member);
    CHECK(r.alpha.verdict == H);
    CHECK(r.integrals.verdict == H);
  }
  SUBCASE("a dominator below the sequence is rejected") {
    const FnSequence seq = chi_shrinking(64);
    MeasurableFn g(seq.space(), std::vector<double>(seq.space()->size(), 0.5));
    CHECK(error_kind([&] { dominated_convergence_suite(seq, 1.0, g, o); }) == ErrorKind::DominationViolated);
  }
  SUBCASE("a dominator outside the space is rejected") {
    const FnSequence seq = escaping_box(64);
    MeasurableFn g(seq.space(), std::vector<double>(seq.space()->size(), 1.0));
    for (std::size_t t = 0; t < seq.space()->tails().size(); ++t) {
      g.set_tail(t, {TailPiece::constant(seq.space()->tails()[t].start, 1.0)});
    }
    CHECK(error_kind([&] { dominated_convergence_suite(seq, 1.0, g, o); }) == ErrorKind::NotMember);
  }
}

TEST_CASE("limit-based modes need a limit") {
  const SpacePtr s = make_space({{0, 1.0, true}});
  const FnSequence seq(s, {MeasurableFn(s, {1.0}), MeasurableFn(s, {1.0})});
  CHECK(error_kind([&] { check_alpha(seq, 1.0); }) == ErrorKind::MissingLimit);
  CHECK(error_kind([&] { check_alpha_cauchy(seq, 1.0); }) == std::nullopt);
}

TEST_CASE("alpha distance is symmetric and vanishes on the diagonal") {
  Rng rng(44);
  for (int t = 0; t < 50; ++t) {
    const SpacePtr s = random_finite_space(rng, 10);
    const MeasurableFn a = random_function(s, rng);
    const MeasurableFn b = random_function(s, rng);
    CHECK(alpha_distance_pow(a, a, 1.5) == 0.0);
    CHECK(alpha_distance_pow(a, b, 1.5) == doctest::Approx(alpha_distance_pow(b, a, 1.5)).epsilon(1e-14));
  }
}

TEST_CASE("reports serialize every mode") {
  const ConvergenceReport r = implication_matrix(chi_shrinking(64), 1.0, opts_with_tol(0.01));
  const json j = r.to_json();
  CHECK(j.at("sequence") == "chi_shrinking");
  for (const auto& m : implication_chain()) CHECK(j.at("modes").contains(m));
  CHECK(j.at("implication_violations").empty());
}
