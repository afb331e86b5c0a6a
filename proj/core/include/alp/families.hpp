#pragma once

#include "alp/convergence.hpp"
#include "alp/random.hpp"

namespace alp {

/// Cells (1/(k+1), 1/k] for k = 1..n_max (ids k) and (0, 1/(n_max+1)] (id 0)
/// partitioning (0, 1].
SpacePtr harmonic_partition(Index n_max);

/// f_n = χ_(0,1/n) on the harmonic partition, limit 0.
FnSequence chi_shrinking(Index n_max);
/// f_n = n χ_(0,1/n) on the harmonic partition, limit 0.
FnSequence n_chi_shrinking(Index n_max);
/// f_n = χ_(n,n+1) on unit cells 0..n_max of [0, ∞), the rest of the half
/// line being a constant-weight tail; limit 0.
FnSequence escaping_box(Index n_max);
FnSequence constant_sequence(const MeasurableFn& f, Index n_max);
/// f_n = g / n, limit 0.
FnSequence scaled_sequence(const MeasurableFn& g, Index n_max, std::string name = "scaled");

/// Atoms n >= 1 of weight 2^-n.
SpacePtr dyadic_atoms_space();
/// |f(n)| = 2^(n/p) on dyadic_atoms_space(): in Λ_p but not in L_p.
MeasurableFn dyadic_growth_function(const SpacePtr& space, double p);

enum class SuiteKind { geometric, alternating, spike };

struct SuiteInstance {
  SuiteKind kind;
  double p;
  FnSequence seq;
};

/// f + A ρ^n h with ρ <= 1/2: converges in every mode.
SuiteInstance random_geometric_instance(Rng& rng, Index n_max);
/// f + (-1)^n h with |h| >= 0.1: converges in no mode.
SuiteInstance random_alternating_instance(Rng& rng, Index n_max);
/// (κ / w_n)^(1/p) on cells of weight c ρ^n: α_p but not L_p convergent.
SuiteInstance random_spike_instance(Rng& rng, Index n_max);
/// Cycles through the three kinds by index.
SuiteInstance random_suite_instance(Rng& rng, int index, Index n_max = 64);

std::string_view to_string(SuiteKind k) noexcept;

}  // namespace alp
