#pragma once

#include <array>
#include <vector>

#include "alp/functionals.hpp"

namespace alp {

/// Dyadic ladder s_j = sign(f)·min(floor(2^j |f|)/2^j, j) for j = 1..k.
/// Tail families become an explicit head followed by zero or ±j.
std::vector<MeasurableFn> simple_ladder(const MeasurableFn& f, int k);

struct Truncation {
  MeasurableFn g;
  MeasurableSet removed;  // E
  Estimate removed_measure;
  /// ‖f - g‖_{α_p}.
  Estimate distance;
  /// ∫ |g|^p, finite.
  Estimate g_integral;
};

/// g = f χ_{E^c} with μ(E) < ε^p and g ∈ L_p. Throws NotMember when f ∉ Λ_p.
Truncation truncate_to_lp(const MeasurableFn& f, double p, double eps,
                          const SeriesOptions& opts = default_series_options());

/// Axis-aligned box of ℝ^d (d <= 3) cut into a regular grid of divisible cells.
struct GridBox {
  int dim = 1;
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
  std::array<Index, 3> cells{1, 1, 1};

  void validate() const;
  double side(int axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(cells[axis]); }
  double cell_volume() const;
  std::size_t size() const;
  /// Row-major: the last axis varies fastest.
  std::size_t flat(const std::array<Index, 3>& ijk) const;
  std::array<Index, 3> unflat(std::size_t i) const;
  double center(int axis, Index i) const { return lo[axis] + (static_cast<double>(i) + 0.5) * side(axis); }
  SpacePtr to_space() const;
};

struct GridFn {
  GridBox box;
  std::vector<double> values;

  /// Samples `fn` at cell centres.
  template <class F>
  static GridFn sample(const GridBox& box, F&& fn) {
    GridFn g{box, std::vector<double>(box.size())};
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      const auto ijk = box.unflat(i);
      std::array<double, 3> x{};
      for (int a = 0; a < box.dim; ++a) x[a] = box.center(a, ijk[a]);
      g.values[i] = fn(x);
    }
    return g;
  }
  MeasurableFn to_fn(const SpacePtr& space) const;
};

struct MollifyReport {
  GridFn phi;
  double h = 0.0;
  /// ‖f - φ‖_{α_p}.
  double alpha_distance = 0.0;
  double lp_distance = 0.0;
  double tv_f = 0.0;
  double tv_phi = 0.0;
  bool support_within_h = true;
  /// max |Δφ| / side over all axes.
  double max_difference_quotient = 0.0;
};

/// Discrete convolution with the normalized bump (1 - (|x|/h)^2)^3, zero
/// padded outside the box. h must be a multiple of every cell side, at least
/// twice the side.
MollifyReport mollify(const GridFn& f, double p, double h);

struct SmoothApproximation {
  Truncation truncation;
  MollifyReport smoothing;
  /// ‖f - φ‖_{α_p}.
  double distance = 0.0;
};

/// Truncates at ε/2, then picks the largest admissible h among multiples of
/// the cell side (up to a quarter of the shortest box edge) whose smoothing
/// error is below ε/2. Throws GridTooCoarse when none works.
SmoothApproximation smooth_approximation(const GridFn& f, double p, double eps);

struct NetElement {
  MeasurableFn s;
  int dyadic_level = 0;
  /// ‖f - s‖_{α_p}.
  Estimate distance;
};

/// Simple function with coefficients in 2^-m Z on finitely many cells and
/// tail atoms, within 2ε of f. Throws NotMember when f ∉ Λ_p.
NetElement rational_simple_net(const MeasurableFn& f, double p, double eps,
                               const SeriesOptions& opts = default_series_options());

/// Sum of |Δ| between neighbours along every axis, zero padded.
double total_variation(const GridFn& f);

}  // namespace alp
