#include "alp/random.hpp"

#include <cmath>

namespace alp {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

SpacePtr random_finite_space(Rng& rng, std::size_t cells, double divisible_prob) {
  std::vector<Cell> out;
  out.reserve(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double w = uniform(rng, 0.0, 1.0) < 0.05 ? 0.0 : uniform(rng, 0.01, 1.0);
    out.push_back({static_cast<int>(i), w, uniform(rng, 0.0, 1.0) < divisible_prob});
  }
  return make_space(std::move(out));
}

MeasurableFn random_function(const SpacePtr& space, Rng& rng) {
  MeasurableFn f(space);
  for (std::size_t i = 0; i < space->size(); ++i) {
    const double u = uniform(rng, 0.0, 1.0);
    double mag;
    if (u < 0.2) {
      mag = 0.0;
    } else if (u < 0.3) {
      mag = 1.0 + uniform(rng, -1e-3, 1e-3);
    } else {
      mag = std::pow(10.0, uniform(rng, -3.0, 3.0));
    }
    f.set_value(i, uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag);
  }
  return f;
}

MeasurableSet random_set(const SpacePtr& space, Rng& rng) {
  MeasurableSet s = MeasurableSet::empty(space);
  for (std::size_t i = 0; i < space->size(); ++i) {
    if (uniform(rng, 0.0, 1.0) < 0.5) s.set_fraction(i, 1.0);
  }
  return s;
}

}  // namespace alp
