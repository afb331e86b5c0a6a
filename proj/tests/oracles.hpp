#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's integration or series code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

inline double rel_error(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

/// Σ w_i min(|v_i|, 1)^p.
inline double alpha_pow(const std::vector<double>& v, const std::vector<double>& w, double p) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::min(std::abs(v[i]), 1.0), p);
  return static_cast<double>(s);
}

/// Σ w_i |v_i|^p.
inline double lp_pow(const std::vector<double>& v, const std::vector<double>& w, double p) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i]), p);
  return static_cast<double>(s);
}

/// min over all subsets B of Σ_B w|v|^p + Σ_{B^c} w, with the minimizing mask.
struct SubsetMin {
  double value = std::numeric_limits<double>::infinity();
  std::uint32_t mask = 0;
};

inline SubsetMin variational_min(const std::vector<double>& v, const std::vector<double>& w, double p) {
  SubsetMin best;
  const std::uint32_t n = static_cast<std::uint32_t>(v.size());
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    long double s = 0.0L;
    for (std::uint32_t i = 0; i < n; ++i) s += (mask >> i & 1u) ? w[i] * std::pow(std::abs(v[i]), p) : w[i];
    if (static_cast<double>(s) < best.value) best = {static_cast<double>(s), mask};
  }
  return best;
}

/// μ(|v| > t) by direct count.
inline double measure_above(const std::vector<double>& v, const std::vector<double>& w, double t) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > t) s += w[i];
  }
  return static_cast<double>(s);
}

/// sup{∫_E |v|^p : μ(E) <= δ} over divisible cells (fractional knapsack).
inline double fractional_modulus(std::vector<double> v, std::vector<double> w, double p, double delta) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
  long double s = 0.0L;
  double left = delta;
  for (std::size_t i : order) {
    if (left <= 0.0) break;
    const double take = std::min(left, w[i]);
    s += take * std::pow(std::abs(v[i]), p);
    left -= take;
  }
  return static_cast<double>(s);
}

/// Σ_{n>=1} n^-s for s > 1, summed directly up to N with an Euler-Maclaurin tail.
inline double zeta(double s) {
  const int n = 2000;
  long double sum = 0.0L;
  for (int k = 1; k < n; ++k) sum += std::pow(static_cast<long double>(k), -s);
  const long double N = n;
  sum += std::pow(N, 1 - s) / (s - 1) + 0.5L * std::pow(N, -s) + s / 12.0L * std::pow(N, -s - 1);
  return static_cast<double>(sum);
}

/// Discrete convolution of a 1D grid with the normalized bump (1 - (x/h)^2)^3,
/// written out independently of the library's n-dimensional kernel loop.
inline std::vector<double> mollify_1d(const std::vector<double>& f, int m) {
  std::vector<double> k(static_cast<std::size_t>(2 * m + 1));
  double total = 0.0;
  for (int o = -m; o <= m; ++o) {
    const double u = static_cast<double>(o) / m;
    k[static_cast<std::size_t>(o + m)] = u * u < 1.0 ? std::pow(1.0 - u * u, 3) : 0.0;
    total += k[static_cast<std::size_t>(o + m)];
  }
  std::vector<double> out(f.size(), 0.0);
  const int n = static_cast<int>(f.size());
  for (int i = 0; i < n; ++i) {
    long double s = 0.0L;
    for (int o = -m; o <= m; ++o) {
      const int j = i - o;
      if (j >= 0 && j < n) s += k[static_cast<std::size_t>(o + m)] / total * f[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = static_cast<double>(s);
  }
  return out;
}

}  // namespace oracle
