#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alp/measure.hpp"
#include "alp/random.hpp"
#include "alp/report.hpp"

namespace alp {

/// ∫ min(|f|,1)^p, i.e. the p-th power of the alpha_p norm.
Estimate alpha_norm_pow(const MeasurableFn& f, double p, const SeriesOptions& opts = default_series_options());
/// (∫ min(|f|,1)^p)^(1/p); +inf when the integral diverges.
Estimate alpha_norm(const MeasurableFn& f, double p, const SeriesOptions& opts = default_series_options());
/// ‖f χ_F‖_{α_p}. Throws InfiniteMeasureSet when μ(F) = ∞.
Estimate alpha_seminorm_on(const MeasurableFn& f, double p, const MeasurableSet& F,
                           const SeriesOptions& opts = default_series_options());
/// ‖f‖_p, possibly +inf.
Estimate lp_norm(const MeasurableFn& f, double p, const SeriesOptions& opts = default_series_options());

/// inf over δ > 0 of μ(|f| > δ) + δ, without truncation (may be +inf).
double frechet_inf(const MeasurableFn& f, const SeriesOptions& opts = default_series_options());
/// min(frechet_inf(f), 1).
double frechet_mu(const MeasurableFn& f, const SeriesOptions& opts = default_series_options());

struct ModulusSample {
  double delta = 0.0;
  double omega = 0.0;
  /// Set when omega is only an upper bound (large atomic instances).
  bool bound_not_value = false;
};

/// ω(δ) = sup{∫_E |f|^p : μ(E) < δ} sampled on a δ grid.
struct ACModulusCurve {
  double p = 1.0;
  std::vector<ModulusSample> samples;
};

ModulusSample ac_modulus_at(const MeasurableFn& f, double p, double delta,
                            const SeriesOptions& opts = default_series_options());
ACModulusCurve ac_modulus(const MeasurableFn& f, double p, const std::vector<double>& deltas,
                          const SeriesOptions& opts = default_series_options());

enum class Membership { member, non_member, inconclusive };
std::string_view to_string(Membership m) noexcept;

struct MembershipWitness {
  double delta = 0.0;
  MeasurableSet set;
  Estimate set_measure;
  /// ∫ over the complement of the witness of |f|^p.
  Estimate complement_integral;
};

struct MembershipResult {
  Membership verdict = Membership::inconclusive;
  std::vector<MembershipWitness> witnesses;
  /// For non-members: a δ for which no admissible cover exists.
  std::optional<double> certificate_delta;
  std::string reason;
};

/// Decides f ∈ Λ_p by covering every non-integrable tail piece with a
/// suffix of small measure. `deltas` must be positive and strictly decreasing.
MembershipResult lambda_p_member(const MeasurableFn& f, double p, const std::vector<double>& deltas,
                                 const SeriesOptions& opts = default_series_options());
bool lp_member(const MeasurableFn& f, double p, const SeriesOptions& opts = default_series_options());

/// Default δ grid for membership queries: 2^-1 .. 2^-10.
std::vector<double> default_member_deltas();

/// Checks f ∈ Λ_p against the characterization through ‖f‖_{α_p} < ∞ and
/// covers of the part where |f| > 1.
CheckReport truncated_membership_check(const MeasurableFn& f, double p, const std::vector<double>& deltas,
                                       const SeriesOptions& opts = default_series_options());

/// F-norm axioms on random (f, g, λ) over `space`.
CheckReport fnorm_axioms_check(const SpacePtr& space, double p, int trials, Rng& rng);
/// Same, drawing a fresh `cells`-cell space for every trial.
CheckReport fnorm_axioms_suite(std::size_t cells, double p, int trials, Rng& rng);

/// ‖f‖^p_{α_p,F} ≤ max(1, μ(F))·I and I ≤ max(1, δ0^-p)·‖f‖^p_{α_p} + δ0,
/// where I = inf_δ {μ(|f|>δ) + δ}.
CheckReport estimate_chain_check(const MeasurableFn& f, double p, const MeasurableSet& F, double delta0);
CheckReport estimate_chain_suite(int trials, Rng& rng);

/// Brute force over cell subsets B of ∫_B |f|^p + μ(B^c) against ‖f‖^p_{α_p}.
/// Finite spaces only; BruteForceTooLarge above 20 cells.
CheckReport alpha_norm_variational_identity(const MeasurableFn& f, double p);
CheckReport variational_identity_suite(int trials, std::size_t max_cells, Rng& rng);

/// ‖f‖^q_{α_q} ≤ ‖f‖^p_{α_p} for 1 ≤ p ≤ q.
CheckReport alpha_monotone_in_p(const MeasurableFn& f, double p, double q);

}  // namespace alp
