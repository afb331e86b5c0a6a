#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alp/functionals.hpp"
#include "alp/report.hpp"

namespace alp {

enum class Verdict { holds, fails, inconclusive };
std::string_view to_string(Verdict v) noexcept;

/// holds: max of the last quarter < tol; fails: min of the last half > 10 tol.
Verdict trace_verdict(const std::vector<double>& trace, double tol);
/// holds if all hold, fails if any fails, inconclusive otherwise.
Verdict combine_all(const std::vector<Verdict>& verdicts);

/// Terms f_1..f_N on one space, with an optional candidate limit.
class FnSequence {
 public:
  FnSequence(SpacePtr space, std::vector<MeasurableFn> terms, std::optional<MeasurableFn> limit = std::nullopt,
             std::string name = "explicit");
  static FnSequence generate(SpacePtr space, Index n_max, const std::function<MeasurableFn(Index)>& term,
                             std::optional<MeasurableFn> limit = std::nullopt, std::string name = "generated");

  const SpacePtr& space() const noexcept { return space_; }
  const std::string& name() const noexcept { return name_; }
  Index size() const noexcept { return static_cast<Index>(terms_.size()); }
  /// 1-based.
  const MeasurableFn& term(Index n) const { return terms_.at(static_cast<std::size_t>(n - 1)); }
  const std::vector<MeasurableFn>& terms() const noexcept { return terms_; }
  bool has_limit() const noexcept { return limit_.has_value(); }
  const std::optional<MeasurableFn>& limit_opt() const noexcept { return limit_; }
  /// Throws MissingLimit when absent.
  const MeasurableFn& limit() const;

 private:
  SpacePtr space_;
  std::vector<MeasurableFn> terms_;
  std::optional<MeasurableFn> limit_;
  std::string name_;
};

struct ModeResult {
  std::string mode;
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> trace;
  json evidence = json::object();
  json witnesses = json::array();

  json to_json() const;
};

struct CheckOptions {
  double tol = 1e-6;
  /// δ grid for (local) convergence in measure: 2^0 .. 2^-10.
  std::vector<double> measure_deltas;
  /// δ values for the almost-L_p witness search.
  std::vector<double> almost_deltas{0.5, 0.25, 0.125, 0.0625};
  /// δ grid for the uniform p-integrability modulus: 2^-1 .. 2^-10.
  std::vector<double> ui_deltas;
  std::vector<double> epsilons{0.5, 0.25, 0.125};

  CheckOptions();
};

ModeResult check_lp(const FnSequence& seq, double p, const CheckOptions& opts = {});
ModeResult check_alpha(const FnSequence& seq, double p, const CheckOptions& opts = {});
/// Limit-free; window width N/8.
ModeResult check_alpha_cauchy(const FnSequence& seq, double p, const CheckOptions& opts = {});
ModeResult check_in_measure(const FnSequence& seq, const CheckOptions& opts = {});
/// Empty `test_sets` selects cell prefixes of K/8, K/4 and K/2 cells plus X
/// when μ(X) < ∞. Throws InfiniteMeasureSet on an infinite test set.
ModeResult check_local_in_measure(const FnSequence& seq, const std::vector<MeasurableSet>& test_sets = {},
                                  const CheckOptions& opts = {});
/// Greedy witness E_δ from sup_{n >= N/2} |f_n - f|^p; heuristic.
ModeResult check_almost_lp(const FnSequence& seq, double p, const CheckOptions& opts = {});
ModeResult check_uniform_p_integrability(const FnSequence& seq, double p, const CheckOptions& opts = {});
/// sup_n ‖f_n χ_{E^c}‖_{α_p} < ε with E built from the first half of the terms.
ModeResult check_alpha_tightness(const FnSequence& seq, double p, const CheckOptions& opts = {});
/// sup_n ∫_{E^c} |f_n|^p < ε^p, same construction.
ModeResult check_lp_tail_control(const FnSequence& seq, double p, const CheckOptions& opts = {});
/// Per cell |f_n - f| -> 0 (and tail atoms up to a fixed depth).
ModeResult check_ae(const FnSequence& seq, const CheckOptions& opts = {});

struct VitaliReport {
  std::string variant;
  ModeResult target;
  std::vector<ModeResult> legs;
  bool consistent = true;
  std::vector<std::string> failing_legs;
  std::string note;

  json to_json() const;
};

VitaliReport vitali_classic(const FnSequence& seq, double p, const CheckOptions& opts = {});
VitaliReport vitali_alpha(const FnSequence& seq, double p, const CheckOptions& opts = {});
VitaliReport vitali_lambda(const FnSequence& seq, double p, const CheckOptions& opts = {});

struct ConvergenceReport {
  std::string sequence;
  double p = 1.0;
  double tol = 0.0;
  Index n_max = 0;
  bool finite_measure = false;
  std::vector<ModeResult> modes;
  /// Pairs (upstream, downstream) where upstream holds and downstream fails.
  std::vector<std::pair<std::string, std::string>> violations;
  /// On finite-measure spaces: alpha_p, in_measure and local_in_measure agree.
  bool finite_measure_modes_agree = true;

  const ModeResult& mode(std::string_view name) const;
  json to_json() const;
};

/// The implication chain, in order.
const std::vector<std::string>& implication_chain();

/// Runs every checker. Throws ImplicationViolation when `strict` and some
/// implication of the chain breaks.
ConvergenceReport implication_matrix(const FnSequence& seq, double p, const CheckOptions& opts = {},
                                     bool strict = true);

struct DominatedReport {
  ModeResult alpha;
  ModeResult integrals;
  MembershipResult dominator;
  json to_json() const;
};

/// Verifies sup_n |f_n| <= g (DominationViolated otherwise) and g ∈ Λ_p
/// (NotMember otherwise), then checks ‖f_n - f‖_{α_p} -> 0 and
/// ∫_{E^c} f_n -> ∫_{E^c} f on a membership witness E of g.
DominatedReport dominated_convergence_suite(const FnSequence& seq, double p, const MeasurableFn& g,
                                            const CheckOptions& opts = {});

/// ‖a - b‖^p_{α_p}, with a direct loop when both tails vanish.
double alpha_distance_pow(const MeasurableFn& a, const MeasurableFn& b, double p);

}  // namespace alp
