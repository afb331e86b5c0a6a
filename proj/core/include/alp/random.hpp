#pragma once

#include <cstdint>
#include <random>

#include "alp/measure.hpp"

namespace alp {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);

/// Finite space with `cells` cells, weights uniform in [0.01, 1] (about one in
/// twenty is zero), each cell divisible with probability `divisible_prob`.
SpacePtr random_finite_space(Rng& rng, std::size_t cells, double divisible_prob = 1.0);

/// Random values on the cells of `space`: log-uniform magnitudes in
/// [1e-3, 1e3] with random signs, 20% exact zeros and 10% placed near 1.
MeasurableFn random_function(const SpacePtr& space, Rng& rng);

/// Random whole-cell subset, each cell included with probability 1/2.
MeasurableSet random_set(const SpacePtr& space, Rng& rng);

}  // namespace alp
