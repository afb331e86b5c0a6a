#pragma once

#include <cstdint>
#include <limits>

namespace alp {

using Index = std::int64_t;

/// Open upper end of an index range.
inline constexpr Index kUnbounded = std::numeric_limits<Index>::max();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A real quantity with an absolute error bound. `value` may be +inf, in
/// which case the error is meaningless and reported as 0.
struct Estimate {
  double value = 0.0;
  double error = 0.0;

  bool finite() const noexcept { return value < kInf; }
  Estimate& operator+=(const Estimate& other) noexcept;
};

Estimate operator+(Estimate a, const Estimate& b) noexcept;
Estimate scaled(const Estimate& e, double factor) noexcept;
/// e^(1/p) with first-order error propagation.
Estimate root(const Estimate& e, double p) noexcept;

struct SeriesOptions {
  double tolerance = 1e-10;
  Index max_terms = 1'000'000;

  /// Defaults, with max_terms overridden by ALP_MAX_TAIL_TERMS when set.
  static SeriesOptions from_environment();
};

/// Rates closer than this to a convergence boundary are treated as lying on it.
inline constexpr double kRateSnap = 1e-12;

/// Terms scale * ratio^n * n^(-exponent). Exponent != 0 requires n >= 1.
struct PowerGeometricTerm {
  double scale = 0.0;
  double ratio = 1.0;
  double exponent = 0.0;

  double at(Index n) const noexcept;
  /// True when the series over any infinite range converges.
  bool summable() const noexcept;
  /// |term| is non-increasing in n for n >= 1.
  bool non_increasing() const noexcept;
  PowerGeometricTerm snapped() const noexcept;
};

/// Sum of term(n) for lo <= n < hi (hi may be kUnbounded). Finite sums carry
/// rounding error; infinite convergent sums use closed forms, a ratio bound or
/// an integral-test bracket and stop once the bracket is within tolerance.
Estimate sum_range(const PowerGeometricTerm& term, Index lo, Index hi, const SeriesOptions& opts);

/// Compensated summation.
class NeumaierSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }  // +/-inf propagates
  double abs_total() const noexcept { return abs_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_ = 0.0;
};

}  // namespace alp
