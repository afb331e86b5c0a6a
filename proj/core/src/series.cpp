#include "alp/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "alp/errors.hpp"

namespace alp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double snap(double x, double target) { return std::abs(x - target) <= kRateSnap ? target : x; }

// Integral of x^(-sigma) over [a, b], b may be +inf (then sigma > 1).
double power_integral(double a, double b, double sigma) {
  if (sigma == 1.0) return std::log(b / a);
  const double e = 1.0 - sigma;
  if (std::isinf(b)) return -std::pow(a, e) / e;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

struct Bracket {
  double low;
  double high;
};

// Bounds on sum_{n >= m} of a unit-scale term.
Bracket tail_bracket(const PowerGeometricTerm& unit, Index m) {
  const double tm = unit.at(m);
  if (unit.ratio < 1.0) {
    double theta = unit.ratio;
    if (unit.exponent < 0.0) {
      theta *= std::pow(1.0 + 1.0 / static_cast<double>(m), -unit.exponent);
    }
    if (theta >= 1.0) return {tm, kInf};
    return {tm, tm / (1.0 - theta)};
  }
  // ratio == 1, exponent > 1: x^(-sigma) is convex and decreasing, so the
  // trapezoid rule over-estimates and the midpoint rule under-estimates.
  const double md = static_cast<double>(m);
  const double low = power_integral(md, kInf, unit.exponent) + 0.5 * tm;
  const double high = power_integral(md - 0.5, kInf, unit.exponent);
  return {low, std::max(low, high)};
}

Estimate direct_sum(const PowerGeometricTerm& t, Index lo, Index hi) {
  NeumaierSum s;
  for (Index n = lo; n < hi; ++n) s.add(t.at(n));
  const double v = s.value();
  if (std::isinf(v)) return {kInf, 0.0};
  return {v, 4.0 * kEps * s.abs_total()};
}

Estimate infinite_sum(const PowerGeometricTerm& t, Index lo, const SeriesOptions& opts) {
  if (!t.summable()) return {kInf, 0.0};
  if (t.exponent == 0.0) {
    const double v = t.scale * std::pow(t.ratio, static_cast<double>(lo)) / (1.0 - t.ratio);
    return {v, 4.0 * kEps * std::abs(v)};
  }
  const double sign = t.scale < 0.0 ? -1.0 : 1.0;
  const double mag = std::abs(t.scale);
  PowerGeometricTerm unit = t;
  unit.scale = 1.0;

  NeumaierSum partial;
  Index next = lo;
  Index span = 32;
  const Index cap = std::max<Index>(opts.max_terms, 32);
  double best_half = kInf;
  while (true) {
    const Index m = (lo > kUnbounded - span) ? kUnbounded - 1 : lo + span;
    for (; next < m; ++next) partial.add(unit.at(next));
    const Bracket b = tail_bracket(unit, m);
    const double half = 0.5 * (b.high - b.low) * mag;
    best_half = std::min(best_half, half);
    if (half <= opts.tolerance) {
      const double v = sign * mag * (partial.value() + 0.5 * (b.low + b.high));
      return {v, half + 4.0 * kEps * mag * partial.abs_total()};
    }
    if (span >= cap) {
      fail(ErrorKind::ToleranceNotReached,
           "tail bound " + std::to_string(best_half) + " above tolerance " +
               std::to_string(opts.tolerance) + " after " + std::to_string(span) + " terms");
    }
    span = std::min(span * 2, cap);
  }
}

}  // namespace

Estimate& Estimate::operator+=(const Estimate& other) noexcept {
  if (!finite() || !other.finite()) {
    value = kInf;
    error = 0.0;
  } else {
    value += other.value;
    error += other.error;
  }
  return *this;
}

Estimate operator+(Estimate a, const Estimate& b) noexcept { return a += b; }

Estimate scaled(const Estimate& e, double factor) noexcept {
  if (!e.finite()) return factor == 0.0 ? Estimate{} : Estimate{kInf, 0.0};
  return {e.value * factor, e.error * std::abs(factor)};
}

Estimate root(const Estimate& e, double p) noexcept {
  if (!e.finite()) return e;
  const double v = std::max(e.value, 0.0);
  const double r = std::pow(v, 1.0 / p);
  if (p == 1.0) return {r, e.error};
  if (v == 0.0) return {r, std::pow(e.error, 1.0 / p)};
  return {r, std::min(r / (p * v) * e.error, std::pow(e.error, 1.0 / p))};
}

SeriesOptions SeriesOptions::from_environment() {
  SeriesOptions opts;
  if (const char* env = std::getenv("ALP_MAX_TAIL_TERMS")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) opts.max_terms = static_cast<Index>(v);
  }
  return opts;
}

double PowerGeometricTerm::at(Index n) const noexcept {
  if (scale == 0.0) return 0.0;
  const double dn = static_cast<double>(n);
  const double g = ratio == 1.0 ? 1.0 : std::pow(ratio, dn);
  const double pw = exponent == 0.0 ? 1.0 : std::pow(dn, -exponent);
  double v = scale * g * pw;
  if (std::isnan(v)) {
    const double lg = std::log(std::abs(scale)) + dn * std::log(ratio) - exponent * std::log(dn);
    v = std::copysign(std::exp(lg), scale);
  }
  return v;
}

bool PowerGeometricTerm::summable() const noexcept {
  const PowerGeometricTerm t = snapped();
  if (t.scale == 0.0) return true;
  return t.ratio < 1.0 || (t.ratio == 1.0 && t.exponent > 1.0);
}

bool PowerGeometricTerm::non_increasing() const noexcept {
  const PowerGeometricTerm t = snapped();
  return t.scale == 0.0 || (t.ratio <= 1.0 && t.exponent >= 0.0);
}

PowerGeometricTerm PowerGeometricTerm::snapped() const noexcept {
  PowerGeometricTerm t = *this;
  t.ratio = snap(t.ratio, 1.0);
  t.exponent = snap(snap(t.exponent, 0.0), 1.0);
  return t;
}

Estimate sum_range(const PowerGeometricTerm& term, Index lo, Index hi, const SeriesOptions& opts) {
  const PowerGeometricTerm t = term.snapped();
  if (t.scale == 0.0 || lo >= hi) return {};
  require(t.ratio > 0.0, "series ratio must be positive");
  require(t.exponent == 0.0 || lo >= 1, "power terms need indices >= 1");
  if (hi == kUnbounded) return infinite_sum(t, lo, opts);

  const double dlo = static_cast<double>(lo);
  const double dhi = static_cast<double>(hi);
  if (t.exponent == 0.0) {
    double v;
    if (t.ratio == 1.0) {
      v = t.scale * (dhi - dlo);
    } else {
      v = t.scale * (std::pow(t.ratio, dlo) - std::pow(t.ratio, dhi)) / (1.0 - t.ratio);
    }
    if (std::isinf(v)) return {kInf, 0.0};
    return {v, 8.0 * kEps * std::abs(v)};
  }
  if (hi - lo <= opts.max_terms) return direct_sum(t, lo, hi);
  if (t.summable()) {
    Estimate a = infinite_sum(t, lo, opts);
    const Estimate b = infinite_sum(t, hi, opts);
    return {a.value - b.value, a.error + b.error};
  }
  if (t.ratio == 1.0) {
    // Monotone integrand: bracket the sum by shifted integrals.
    double low, high;
    if (t.exponent > 0.0) {
      low = power_integral(dlo, dhi, t.exponent);
      high = std::pow(dlo, -t.exponent) + power_integral(dlo, dhi - 1.0, t.exponent);
    } else {
      low = power_integral(std::max(dlo - 1.0, 0.0), dhi - 1.0, t.exponent);
      high = power_integral(dlo, dhi, t.exponent);
    }
    const double mag = std::abs(t.scale);
    const double v = std::copysign(mag * 0.5 * (low + high), t.scale);
    if (std::isinf(v)) return {kInf, 0.0};
    return {v, 0.5 * mag * (high - low)};
  }
  fail(ErrorKind::ToleranceNotReached, "divergent range longer than max_terms");
}

void NeumaierSum::add(double x) noexcept {
  if (std::isinf(x) || std::isinf(sum_)) {
    sum_ += x;
    comp_ = 0.0;
    abs_ = kInf;
    return;
  }
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
  abs_ += std::abs(x);
}

}  // namespace alp
