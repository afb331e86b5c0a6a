#include "alp/approx.hpp"

#include <cmath>
#include <limits>

#include "alp/errors.hpp"

namespace alp {

namespace {

constexpr Index kMaxHead = Index{1} << 20;

double ladder_value(double v, int j) {
  const double mag = std::min(std::floor(std::ldexp(std::abs(v), j)) / std::ldexp(1.0, j), static_cast<double>(j));
  return v < 0.0 ? -mag : mag;
}

double dyadic_floor(double v, int m) {
  const double mag = std::floor(std::ldexp(std::abs(v), m)) / std::ldexp(1.0, m);
  return v < 0.0 ? -mag : mag;
}

// Explicit values of `piece` on [lo, hi) mapped through `map`.
template <class Map>
TailPiece explicit_head(const TailPiece& piece, Index lo, Index hi, Map&& map) {
  if (hi - lo > kMaxHead) {
    fail(ErrorKind::UnsupportedFamilyCombination, "tail head of " + std::to_string(hi - lo) + " atoms is too long");
  }
  std::vector<double> vals(static_cast<std::size_t>(hi - lo));
  for (Index n = lo; n < hi; ++n) vals[static_cast<std::size_t>(n - lo)] = map(piece.at(n));
  return TailPiece::explicit_values(lo, std::move(vals));
}

// One constant piece per dyadic level that a monotone piece passes through on [from, end).
void ladder_monotone(const TailPiece& p, Index end, int j, TailValues& out) {
  const double step = std::ldexp(1.0, -j);
  const double sign = p.coeff < 0.0 ? -1.0 : 1.0;
  const bool up = p.trend() > 0;
  const std::size_t first = out.size();
  Index n = p.from;
  while (n < end) {
    if (out.size() - first >= static_cast<std::size_t>(kMaxHead)) {
      fail(ErrorKind::UnsupportedFamilyCombination, "ladder of a tail piece needs more than 2^20 levels");
    }
    const double level = std::abs(ladder_value(p.at(n), j));
    out.push_back(level == 0.0 ? TailPiece::zero(n) : TailPiece::constant(n, sign * level));
    if ((up && level >= j) || (!up && level == 0.0)) return;
    if (up) {
      const IndexRanges r = above_threshold(p, n, end, std::nextafter(level + step, 0.0));
      n = r.empty() ? end : r.ranges().front().first;
    } else {
      const IndexRanges r = above_threshold(p, n, end, std::nextafter(level, 0.0));
      n = r.empty() ? n + 1 : r.ranges().front().second;
    }
  }
}

TailValues ladder_tail(const TailValues& tv, int j) {
  TailValues out;
  auto map = [j](double v) { return ladder_value(v, j); };
  for (std::size_t i = 0; i < tv.size(); ++i) {
    const TailPiece& p = tv[i];
    const Index end = i + 1 < tv.size() ? tv[i + 1].from : kUnbounded;
    if (p.is_zero()) {
      out.push_back(TailPiece::zero(p.from));
    } else if (p.kind == PieceKind::explicit_values) {
      out.push_back(explicit_head(p, p.from, p.from + static_cast<Index>(p.values.size()), map));
    } else if (p.kind == PieceKind::constant || p.trend() == 0) {
      out.push_back(TailPiece::constant(p.from, ladder_value(p.at(p.from), j)));
    } else {
      ladder_monotone(p, end, j, out);
    }
  }
  return out;
}

}  // namespace

std::vector<MeasurableFn> simple_ladder(const MeasurableFn& f, int k) {
  require(k >= 1, "ladder needs k >= 1");
  std::vector<MeasurableFn> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    MeasurableFn s(f.space());
    for (std::size_t i = 0; i < f.values().size(); ++i) s.set_value(i, ladder_value(f.value(i), j));
    for (std::size_t t = 0; t < f.space()->tails().size(); ++t) s.set_tail(t, ladder_tail(f.tail(t), j));
    out.push_back(std::move(s));
  }
  return out;
}

Truncation truncate_to_lp(const MeasurableFn& f, double p, double eps, const SeriesOptions& opts) {
  require(eps > 0.0 && std::isfinite(eps), "epsilon must be positive");
  const MembershipResult m = lambda_p_member(f, p, {std::pow(eps, p)}, opts);
  if (m.verdict != Membership::member) fail(ErrorKind::NotMember, "function is not in Lambda_p: " + m.reason);
  const MembershipWitness& w = m.witnesses.front();
  Truncation t{restrict_to(f, w.set.complement()), w.set, w.set_measure, {}, {}};
  t.distance = alpha_norm(restrict_to(f, w.set), p, opts);
  t.g_integral = integrate_p(t.g, p, opts);
  require(t.g_integral.finite(), "truncation left a non-integrable remainder");
  return t;
}

// ------------------------------------------------------------------- grids

void GridBox::validate() const {
  require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    require(std::isfinite(lo[a]) && std::isfinite(hi[a]) && lo[a] < hi[a], "grid bounds must satisfy lo < hi");
    require(cells[a] >= 1, "grid needs at least one cell per axis");
  }
}

double GridBox::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= side(a);
  return v;
}

std::size_t GridBox::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(cells[a]);
  return n;
}

std::size_t GridBox::flat(const std::array<Index, 3>& ijk) const {
  std::size_t i = 0;
  for (int a = 0; a < dim; ++a) i = i * static_cast<std::size_t>(cells[a]) + static_cast<std::size_t>(ijk[a]);
  return i;
}

std::array<Index, 3> GridBox::unflat(std::size_t i) const {
  std::array<Index, 3> ijk{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    ijk[a] = static_cast<Index>(i % static_cast<std::size_t>(cells[a]));
    i /= static_cast<std::size_t>(cells[a]);
  }
  return ijk;
}

SpacePtr GridBox::to_space() const {
  validate();
  std::vector<Cell> cs(size());
  const double vol = cell_volume();
  for (std::size_t i = 0; i < cs.size(); ++i) cs[i] = {static_cast<int>(i), vol, true};
  return make_space(std::move(cs));
}

MeasurableFn GridFn::to_fn(const SpacePtr& space) const {
  require(space->size() == values.size(), "grid function does not match the space");
  return MeasurableFn(space, values);
}

double total_variation(const GridFn& f) {
  const GridBox& b = f.box;
  NeumaierSum tv;
  for (int a = 0; a < b.dim; ++a) {
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const auto ijk = b.unflat(i);
      if (ijk[a] == 0) tv.add(std::abs(f.values[i]));
      auto next = ijk;
      next[a] += 1;
      const double nv = next[a] < b.cells[a] ? f.values[b.flat(next)] : 0.0;
      tv.add(std::abs(nv - f.values[i]));
    }
  }
  return tv.value();
}

namespace {

struct KernelTap {
  std::array<Index, 3> offset;
  double weight;
};

std::vector<KernelTap> bump_kernel(const GridBox& b, double h) {
  std::array<Index, 3> reach{0, 0, 0};
  for (int a = 0; a < b.dim; ++a) {
    const double m = h / b.side(a);
    const double r = std::round(m);
    require(r >= 1.0 && std::abs(m - r) <= 1e-9 * m, "kernel radius must be a positive multiple of the cell side");
    require(r >= 2.0, "kernel radius must span at least two cells");
    reach[a] = static_cast<Index>(r);
  }
  std::vector<KernelTap> taps;
  NeumaierSum total;
  std::array<Index, 3> o{};
  for (o[0] = -reach[0]; o[0] <= reach[0]; ++o[0]) {
    for (o[1] = -reach[1]; o[1] <= reach[1]; ++o[1]) {
      for (o[2] = -reach[2]; o[2] <= reach[2]; ++o[2]) {
        double r2 = 0.0;
        for (int a = 0; a < b.dim; ++a) {
          const double x = static_cast<double>(o[a]) * b.side(a);
          r2 += x * x;
        }
        const double u = r2 / (h * h);
        if (u >= 1.0) continue;
        const double w = std::pow(1.0 - u, 3);
        taps.push_back({o, w});
        total.add(w);
      }
    }
  }
  for (auto& t : taps) t.weight /= total.value();
  return taps;
}

}  // namespace

MollifyReport mollify(const GridFn& f, double p, double h) {
  const GridBox& b = f.box;
  b.validate();
  require(f.values.size() == b.size(), "grid values do not match the box");
  require(p >= 1.0, "exponent p must be >= 1");
  require(h > 0.0 && std::isfinite(h), "kernel radius must be positive");
  const std::vector<KernelTap> taps = bump_kernel(b, h);

  MollifyReport r;
  r.h = h;
  r.phi = GridFn{b, std::vector<double>(f.values.size(), 0.0)};
  std::vector<char> near_support(f.values.size(), 0);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const auto ijk = b.unflat(i);
    NeumaierSum s;
    bool near = false;
    for (const KernelTap& t : taps) {
      std::array<Index, 3> src = ijk;
      bool inside = true;
      for (int a = 0; a < b.dim; ++a) {
        src[a] -= t.offset[a];
        inside = inside && src[a] >= 0 && src[a] < b.cells[a];
      }
      if (!inside) continue;
      const double v = f.values[b.flat(src)];
      if (v != 0.0) {
        s.add(t.weight * v);
        near = true;
      }
    }
    r.phi.values[i] = s.value();
    near_support[i] = near;
  }

  const double vol = b.cell_volume();
  NeumaierSum alpha;
  NeumaierSum lp;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double d = std::abs(f.values[i] - r.phi.values[i]);
    alpha.add(vol * std::pow(std::min(d, 1.0), p));
    lp.add(vol * std::pow(d, p));
    if (r.phi.values[i] != 0.0 && !near_support[i]) r.support_within_h = false;
    const auto ijk = b.unflat(i);
    for (int a = 0; a < b.dim; ++a) {
      auto next = ijk;
      next[a] += 1;
      if (next[a] >= b.cells[a]) continue;
      r.max_difference_quotient =
          std::max(r.max_difference_quotient, std::abs(r.phi.values[b.flat(next)] - r.phi.values[i]) / b.side(a));
    }
  }
  r.alpha_distance = std::pow(alpha.value(), 1.0 / p);
  r.lp_distance = std::pow(lp.value(), 1.0 / p);
  r.tv_f = total_variation(f);
  r.tv_phi = total_variation(r.phi);
  return r;
}

SmoothApproximation smooth_approximation(const GridFn& f, double p, double eps) {
  require(eps > 0.0, "epsilon must be positive");
  const GridBox& b = f.box;
  b.validate();
  const SpacePtr space = b.to_space();
  Truncation tr = truncate_to_lp(f.to_fn(space), p, eps / 2.0);
  GridFn g{b, std::vector<double>(tr.g.values().begin(), tr.g.values().end())};

  double base = b.side(0);
  double shortest = b.hi[0] - b.lo[0];
  for (int a = 1; a < b.dim; ++a) shortest = std::min(shortest, b.hi[a] - b.lo[a]);
  const auto max_m = static_cast<Index>(std::floor(0.25 * shortest / base));
  double best = std::numeric_limits<double>::infinity();
  for (Index m = max_m; m >= 2; --m) {
    const double h = static_cast<double>(m) * base;
    bool admissible = true;
    for (int a = 1; a < b.dim; ++a) {
      const double k = h / b.side(a);
      admissible = admissible && std::abs(k - std::round(k)) <= 1e-9 * k && std::round(k) >= 2.0;
    }
    if (!admissible) continue;
    MollifyReport rep = mollify(g, p, h);
    best = std::min(best, rep.lp_distance);
    if (rep.lp_distance < eps / 2.0) {
      SmoothApproximation out{std::move(tr), std::move(rep), 0.0};
      NeumaierSum s;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        s.add(b.cell_volume() * std::pow(std::min(std::abs(f.values[i] - out.smoothing.phi.values[i]), 1.0), p));
      }
      out.distance = std::pow(s.value(), 1.0 / p);
      return out;
    }
  }
  fail(ErrorKind::GridTooCoarse, "no admissible kernel radius reaches smoothing error " + std::to_string(eps / 2.0) +
                                     "; best achieved " + std::to_string(best));
}

// -------------------------------------------------------------------- net

namespace {

// Smallest M with ∫ over tail atoms n >= M of min(|g|,1)^p below budget.
Index head_end(const MeasurableFn& g1, std::size_t t, double p, double budget, const SeriesOptions& opts) {
  const Index start = g1.space()->tails()[t].start;
  auto small = [&](Index m) {
    MeasurableSet s = MeasurableSet::empty(g1.space());
    s.set_tail(t, IndexRanges::from(m));
    const Estimate e = integrate_p(g1, p, s, opts);
    return e.finite() && e.value + e.error < budget;
  };
  if (small(start)) return start;
  Index lo = start;
  Index step = 1;
  Index hi;
  while (true) {
    if (step > kMaxHead) fail(ErrorKind::UnsupportedFamilyCombination, "tail of the truncation decays too slowly");
    hi = lo + step;
    if (small(hi)) break;
    lo = hi;
    step *= 2;
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    if (small(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

NetElement rational_simple_net(const MeasurableFn& f, double p, double eps, const SeriesOptions& opts) {
  require(eps > 0.0 && std::isfinite(eps), "epsilon must be positive");
  const Truncation tr = truncate_to_lp(f, p, eps, opts);
  const MeasurableFn& g = tr.g;
  const SpacePtr& space = f.space();
  const MeasurableFn g1 = pointwise_min_one(g);

  const std::size_t tails = space->tails().size();
  std::vector<Index> heads(tails);
  double head_mass = space->finite_part_measure();
  for (std::size_t t = 0; t < tails; ++t) {
    const Index start = space->tails()[t].start;
    heads[t] = g.tail(t).size() == 1 && g.tail(t).front().is_zero()
                   ? start
                   : head_end(g1, t, p, 0.5 * std::pow(eps, p) / static_cast<double>(tails), opts);
    head_mass += space->tail_mass(t, start, heads[t], opts).value;
  }
  int m = static_cast<int>(std::ceil(std::log2(1.0 / eps)));
  if (head_mass > 0.0) {
    m = std::max(m, static_cast<int>(std::ceil(std::log2(std::pow(2.0 * head_mass, 1.0 / p) / eps))));
  }
  m = std::max(m, 0);

  MeasurableFn s(space);
  for (std::size_t i = 0; i < space->size(); ++i) s.set_value(i, dyadic_floor(g.value(i), m));
  for (std::size_t t = 0; t < tails; ++t) {
    const Index start = space->tails()[t].start;
    if (heads[t] == start) continue;
    std::vector<double> vals(static_cast<std::size_t>(heads[t] - start));
    for (Index n = start; n < heads[t]; ++n) vals[static_cast<std::size_t>(n - start)] = dyadic_floor(g.tail_value(t, n), m);
    s.set_tail(t, {TailPiece::explicit_values(start, std::move(vals))});
  }
  NetElement out{s, m, {}};
  out.distance = alpha_norm(subtract(f, s), p, opts);
  return out;
}

}  // namespace alp
