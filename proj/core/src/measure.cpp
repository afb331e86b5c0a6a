#include "alp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alp/errors.hpp"

namespace alp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr Index kMaxExplicitSpan = Index{1} << 20;

Index piece_end(const TailValues& tv, std::size_t i) {
  return i + 1 < tv.size() ? tv[i + 1].from : kUnbounded;
}

const TailPiece& piece_at(const TailValues& tv, Index n) {
  auto it = std::upper_bound(tv.begin(), tv.end(), n,
                             [](Index v, const TailPiece& p) { return v < p.from; });
  require(it != tv.begin(), "tail index below tail start");
  return *std::prev(it);
}

// Values of `p` on [a, b) as a standalone piece starting at a.
TailPiece slice(const TailPiece& p, Index a, Index b) {
  if (p.kind != PieceKind::explicit_values) return p.rebased(a);
  const auto off = static_cast<std::size_t>(a - p.from);
  const auto len = static_cast<std::size_t>(b - a);
  require(b != kUnbounded && off + len <= p.values.size(), "explicit piece sliced out of range");
  return TailPiece::explicit_values(
      a, std::vector<double>(p.values.begin() + static_cast<std::ptrdiff_t>(off),
                             p.values.begin() + static_cast<std::ptrdiff_t>(off + len)));
}

std::vector<Index> breakpoints(const TailValues& tv) {
  std::vector<Index> out;
  out.reserve(tv.size());
  for (const auto& p : tv) out.push_back(p.from);
  return out;
}

void add_range_breaks(std::vector<Index>& breaks, const IndexRanges& r, Index start) {
  for (const auto& [lo, hi] : r.ranges()) {
    if (lo > start) breaks.push_back(lo);
    if (hi != kUnbounded && hi > start) breaks.push_back(hi);
  }
}

// Rebuilds tail values segment by segment; make(a, b) returns the piece on [a, b).
template <class Make>
TailValues rebuild(Index start, std::vector<Index> breaks, Make&& make) {
  breaks.push_back(start);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](Index b) { return b < start; }),
               breaks.end());
  TailValues out;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const Index a = breaks[i];
    const Index b = i + 1 < breaks.size() ? breaks[i + 1] : kUnbounded;
    out.push_back(make(a, b));
  }
  return out;
}

TailPiece abs_piece(TailPiece p) {
  p.coeff = std::abs(p.coeff);
  for (double& v : p.values) v = std::abs(v);
  return p;
}

// Splits piece p on [a, b) at the threshold crossing and maps each part.
template <class Above, class Below>
void split_by_threshold(TailValues& out, const TailPiece& p, Index a, Index b, double thr,
                        Above&& above, Below&& below) {
  if (p.kind == PieceKind::explicit_values) {
    const TailPiece s = slice(p, a, b);
    std::vector<double> vals(s.values.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const double v = s.values[k];
      vals[k] = std::abs(v) > thr ? above(v) : below(v);
    }
    out.push_back(TailPiece::explicit_values(a, std::move(vals)));
    return;
  }
  const IndexRanges hit = above_threshold(p, a, b, thr);
  Index cursor = a;
  for (const auto& [lo, hi] : hit.ranges()) {
    if (lo > cursor) out.push_back(below(p.rebased(cursor)));
    out.push_back(above(p.rebased(lo)));
    cursor = hi;
  }
  if (cursor < b) out.push_back(below(p.rebased(cursor)));
}

}  // namespace

const SeriesOptions& default_series_options() {
  static const SeriesOptions opts = SeriesOptions::from_environment();
  return opts;
}

// ---------------------------------------------------------------- TailFamily

TailFamily TailFamily::geometric(double a, double r, Index start) {
  return {TailKind::geometric, a, r, start};
}
TailFamily TailFamily::constant(double c, Index start) { return {TailKind::constant, c, 0.0, start}; }
TailFamily TailFamily::power(double c, double s, Index start) {
  return {TailKind::power, c, s, start};
}

PowerGeometricTerm TailFamily::weight_term() const noexcept {
  switch (kind) {
    case TailKind::geometric:
      return {scale, rate, 0.0};
    case TailKind::constant:
      return {scale, 1.0, 0.0};
    case TailKind::power:
      return {scale, 1.0, rate};
  }
  return {};
}

void TailFamily::validate() const {
  require(std::isfinite(scale) && scale > 0.0, "tail scale must be positive and finite");
  require(start >= 0, "tail start must be non-negative");
  switch (kind) {
    case TailKind::geometric:
      require(std::isfinite(rate) && rate > 0.0 && rate < 1.0, "geometric tail needs r in (0,1)");
      break;
    case TailKind::constant:
      break;
    case TailKind::power:
      require(std::isfinite(rate) && rate > 0.0, "power tail needs s > 0");
      require(start >= 1, "power tail must start at index >= 1");
      break;
  }
}

// -------------------------------------------------------------- MeasureSpace

MeasureSpace::MeasureSpace(std::vector<Cell> cells, std::vector<TailFamily> tails)
    : cells_(std::move(cells)), tails_(std::move(tails)) {
  index_.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    require(std::isfinite(c.weight) && c.weight >= 0.0,
            "cell " + std::to_string(c.id) + " has a negative or non-finite weight");
    require(index_.emplace(c.id, i).second, "duplicate cell id " + std::to_string(c.id));
  }
  for (const auto& t : tails_) t.validate();
}

std::size_t MeasureSpace::index_of(int id) const {
  auto it = index_.find(id);
  require(it != index_.end(), "unknown cell id " + std::to_string(id));
  return it->second;
}

bool MeasureSpace::finite_measure() const noexcept {
  return std::all_of(tails_.begin(), tails_.end(), [](const TailFamily& t) { return t.finite_mass(); });
}

double MeasureSpace::finite_part_measure() const noexcept {
  NeumaierSum s;
  for (const auto& c : cells_) s.add(c.weight);
  return s.value();
}

Estimate MeasureSpace::total_measure(const SeriesOptions& opts) const {
  Estimate total{finite_part_measure(), 4.0 * kEps * finite_part_measure()};
  for (std::size_t t = 0; t < tails_.size(); ++t) total += tail_mass(t, tails_[t].start, kUnbounded, opts);
  return total;
}

Estimate MeasureSpace::tail_mass(std::size_t tail, Index lo, Index hi, const SeriesOptions& opts) const {
  const TailFamily& fam = tails_.at(tail);
  return sum_range(fam.weight_term(), std::max(lo, fam.start), hi, opts);
}

SpacePtr make_space(std::vector<Cell> cells, std::vector<TailFamily> tails) {
  return std::make_shared<const MeasureSpace>(std::move(cells), std::move(tails));
}

// --------------------------------------------------------------- IndexRanges

IndexRanges IndexRanges::span(Index lo, Index hi) {
  IndexRanges r;
  r.add(lo, hi);
  return r;
}

void IndexRanges::add(Index lo, Index hi) {
  if (lo >= hi) return;
  std::vector<Range> out;
  out.reserve(ranges_.size() + 1);
  bool placed = false;
  for (const auto& r : ranges_) {
    if (r.second < lo) {
      out.push_back(r);
    } else if (hi < r.first) {
      if (!placed) {
        out.emplace_back(lo, hi);
        placed = true;
      }
      out.push_back(r);
    } else {
      lo = std::min(lo, r.first);
      hi = std::max(hi, r.second);
    }
  }
  if (!placed) out.emplace_back(lo, hi);
  std::sort(out.begin(), out.end());
  ranges_ = std::move(out);
}

bool IndexRanges::contains(Index n) const noexcept {
  return std::any_of(ranges_.begin(), ranges_.end(),
                     [n](const Range& r) { return r.first <= n && n < r.second; });
}

IndexRanges IndexRanges::complement_within(Index start) const {
  IndexRanges out;
  Index cursor = start;
  for (const auto& [lo, hi] : ranges_) {
    if (hi <= cursor) continue;
    if (lo > cursor) out.add(cursor, lo);
    cursor = std::max(cursor, hi);
    if (cursor == kUnbounded) break;
  }
  if (cursor != kUnbounded) out.add(cursor, kUnbounded);
  return out;
}

IndexRanges IndexRanges::intersect(const IndexRanges& other) const {
  IndexRanges out;
  for (const auto& a : ranges_) {
    for (const auto& b : other.ranges_) out.add(std::max(a.first, b.first), std::min(a.second, b.second));
  }
  return out;
}

IndexRanges IndexRanges::unite(const IndexRanges& other) const {
  IndexRanges out = *this;
  for (const auto& [lo, hi] : other.ranges_) out.add(lo, hi);
  return out;
}

Index suffix_below(const MeasureSpace& space, std::size_t t, Index from, double budget,
                   const SeriesOptions& opts) {
  auto small = [&](Index n) {
    const Estimate m = space.tail_mass(t, n, kUnbounded, opts);
    return m.value + m.error < budget;
  };
  if (small(from)) return from;
  Index lo = from;
  Index step = 1;
  Index hi;
  while (true) {
    require(step < (Index{1} << 60), "cover search did not terminate");
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

// ------------------------------------------------------------- MeasurableSet

MeasurableSet::MeasurableSet(SpacePtr space) : space_(std::move(space)) {
  require(space_ != nullptr, "set needs a space");
  segments_.assign(space_->size(), Segment{});
  tails_.assign(space_->tails().size(), IndexRanges{});
}

MeasurableSet MeasurableSet::empty(SpacePtr space) { return MeasurableSet(std::move(space)); }

MeasurableSet MeasurableSet::whole(SpacePtr space) {
  MeasurableSet s(std::move(space));
  for (auto& seg : s.segments_) seg = {0.0, 1.0};
  for (std::size_t t = 0; t < s.tails_.size(); ++t) s.tails_[t] = IndexRanges::from(s.space_->tails()[t].start);
  return s;
}

MeasurableSet MeasurableSet::of_cells(SpacePtr space, const std::vector<int>& ids) {
  MeasurableSet s(std::move(space));
  for (int id : ids) s.segments_[s.space_->index_of(id)] = {0.0, 1.0};
  return s;
}

void MeasurableSet::set_fraction(std::size_t cell_index, double fraction) {
  set_segment(cell_index, {0.0, fraction});
}

void MeasurableSet::set_segment(std::size_t cell_index, Segment seg) {
  require(seg.lo >= 0.0 && seg.hi <= 1.0 && seg.lo <= seg.hi, "cell segment must lie in [0,1]");
  if (seg.length() <= 0.0) seg = {};
  const bool whole_or_none = seg.length() == 0.0 || seg.length() == 1.0;
  require(whole_or_none || space_->cell(cell_index).divisible,
          "fractional membership on atomic cell " + std::to_string(space_->cell(cell_index).id));
  segments_.at(cell_index) = seg;
}

void MeasurableSet::set_tail(std::size_t t, IndexRanges ranges) {
  tails_.at(t) = ranges.intersect(IndexRanges::from(space_->tails().at(t).start));
}

MeasurableSet MeasurableSet::complement() const {
  MeasurableSet out(space_);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (s.length() == 0.0) {
      out.segments_[i] = {0.0, 1.0};
    } else if (s.lo == 0.0) {
      out.segments_[i] = s.hi < 1.0 ? Segment{s.hi, 1.0} : Segment{};
    } else if (s.hi == 1.0) {
      out.segments_[i] = {0.0, s.lo};
    } else {
      fail(ErrorKind::InvalidArgument, "complement of an interior cell segment is not a segment");
    }
  }
  for (std::size_t t = 0; t < tails_.size(); ++t) {
    out.tails_[t] = tails_[t].complement_within(space_->tails()[t].start);
  }
  return out;
}

MeasurableSet MeasurableSet::unite(const MeasurableSet& other) const {
  require(space_ == other.space_, "sets live on different spaces");
  MeasurableSet out(space_);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& a = segments_[i];
    const Segment& b = other.segments_[i];
    if (a.length() == 0.0) {
      out.segments_[i] = b;
    } else if (b.length() == 0.0) {
      out.segments_[i] = a;
    } else {
      require(a.lo <= b.hi && b.lo <= a.hi, "union of disjoint cell segments is not a segment");
      out.segments_[i] = {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
  }
  for (std::size_t t = 0; t < tails_.size(); ++t) out.tails_[t] = tails_[t].unite(other.tails_[t]);
  return out;
}

MeasurableSet MeasurableSet::intersect(const MeasurableSet& other) const {
  require(space_ == other.space_, "sets live on different spaces");
  MeasurableSet out(space_);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double lo = std::max(segments_[i].lo, other.segments_[i].lo);
    const double hi = std::min(segments_[i].hi, other.segments_[i].hi);
    out.segments_[i] = lo < hi ? Segment{lo, hi} : Segment{};
  }
  for (std::size_t t = 0; t < tails_.size(); ++t) out.tails_[t] = tails_[t].intersect(other.tails_[t]);
  return out;
}

Estimate MeasurableSet::measure(const SeriesOptions& opts) const {
  NeumaierSum s;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].length() > 0.0) s.add(segments_[i].length() * space_->cell(i).weight);
  }
  Estimate total{s.value(), 4.0 * kEps * s.abs_total()};
  for (std::size_t t = 0; t < tails_.size(); ++t) {
    for (const auto& [lo, hi] : tails_[t].ranges()) total += space_->tail_mass(t, lo, hi, opts);
  }
  return total;
}

bool MeasurableSet::is_empty() const noexcept {
  return std::all_of(segments_.begin(), segments_.end(), [](const Segment& s) { return s.length() == 0.0; }) &&
         std::all_of(tails_.begin(), tails_.end(), [](const IndexRanges& r) { return r.empty(); });
}

// ----------------------------------------------------------------- TailPiece

TailPiece TailPiece::zero(Index from) { return {from, PieceKind::zero, 0.0, 0.0, {}}; }
TailPiece TailPiece::constant(Index from, double b) { return {from, PieceKind::constant, b, 0.0, {}}; }
TailPiece TailPiece::geometric(Index from, double b, double q) {
  return {from, PieceKind::geometric, b, q, {}};
}
TailPiece TailPiece::power(Index from, double b, double t) { return {from, PieceKind::power, b, t, {}}; }
TailPiece TailPiece::explicit_values(Index from, std::vector<double> values) {
  return {from, PieceKind::explicit_values, 0.0, 0.0, std::move(values)};
}

double TailPiece::at(Index n) const noexcept {
  switch (kind) {
    case PieceKind::zero:
      return 0.0;
    case PieceKind::constant:
      return coeff;
    case PieceKind::geometric:
      return PowerGeometricTerm{coeff, rate, 0.0}.at(n);
    case PieceKind::power:
      return PowerGeometricTerm{coeff, 1.0, rate}.at(n);
    case PieceKind::explicit_values: {
      if (n < from) return 0.0;
      const auto k = static_cast<std::size_t>(n - from);
      return k < values.size() ? values[k] : 0.0;
    }
  }
  return 0.0;
}

bool TailPiece::is_zero() const noexcept {
  if (kind == PieceKind::zero) return true;
  if (kind == PieceKind::explicit_values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
  }
  return coeff == 0.0;
}

PowerGeometricTerm TailPiece::magnitude_term() const noexcept {
  switch (kind) {
    case PieceKind::constant:
      return {std::abs(coeff), 1.0, 0.0};
    case PieceKind::geometric:
      return {std::abs(coeff), rate, 0.0};
    case PieceKind::power:
      return {std::abs(coeff), 1.0, rate};
    default:
      return {0.0, 1.0, 0.0};
  }
}

int TailPiece::trend() const noexcept {
  if (coeff == 0.0) return 0;
  const PowerGeometricTerm m = magnitude_term().snapped();
  if (kind == PieceKind::geometric) return m.ratio > 1.0 ? 1 : (m.ratio < 1.0 ? -1 : 0);
  if (kind == PieceKind::power) return m.exponent > 0.0 ? -1 : (m.exponent < 0.0 ? 1 : 0);
  return 0;
}

TailPiece TailPiece::rebased(Index new_from) const {
  TailPiece p = *this;
  if (kind == PieceKind::explicit_values) {
    const auto off = static_cast<std::size_t>(std::max<Index>(0, new_from - from));
    p.values.assign(values.begin() + static_cast<std::ptrdiff_t>(std::min(off, values.size())), values.end());
  }
  p.from = new_from;
  return p;
}

// -------------------------------------------------------------- MeasurableFn

MeasurableFn::MeasurableFn(SpacePtr space) : space_(std::move(space)) {
  require(space_ != nullptr, "function needs a space");
  values_.assign(space_->size(), 0.0);
  for (const auto& t : space_->tails()) tails_.push_back({TailPiece::zero(t.start)});
}

MeasurableFn::MeasurableFn(SpacePtr space, std::vector<double> values) : MeasurableFn(std::move(space)) {
  require(values.size() == values_.size(), "value count does not match the cell count");
  for (std::size_t i = 0; i < values.size(); ++i) set_value(i, values[i]);
}

void MeasurableFn::set_value(std::size_t i, double v) {
  require(std::isfinite(v), "function values must be finite");
  values_.at(i) = v;
}

void MeasurableFn::set_tail(std::size_t t, TailValues pieces) {
  const Index start = space_->tails().at(t).start;
  require(!pieces.empty(), "tail values need at least one piece");
  if (pieces.front().from > start) pieces.insert(pieces.begin(), TailPiece::zero(start));
  require(pieces.front().from == start, "tail values must start at the tail start");

  TailValues out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    TailPiece p = std::move(pieces[i]);
    const Index end = i + 1 < pieces.size() ? pieces[i + 1].from : kUnbounded;
    require(end > p.from, "tail pieces must be strictly increasing");
    switch (p.kind) {
      case PieceKind::zero:
        break;
      case PieceKind::constant:
        require(std::isfinite(p.coeff), "tail coefficient must be finite");
        break;
      case PieceKind::geometric:
        require(std::isfinite(p.coeff) && std::isfinite(p.rate) && p.rate > 0.0,
                "geometric tail values need a finite coefficient and q > 0");
        break;
      case PieceKind::power:
        require(std::isfinite(p.coeff) && std::isfinite(p.rate), "power tail values need finite b and t");
        require(p.from >= 1, "power tail values need indices >= 1");
        break;
      case PieceKind::explicit_values: {
        for (double v : p.values) require(std::isfinite(v), "tail values must be finite");
        const auto len = static_cast<Index>(p.values.size());
        require(end == kUnbounded || len <= end - p.from, "explicit tail piece overlaps the next piece");
        if (len == 0) {
          p = TailPiece::zero(p.from);
        } else if (end == kUnbounded || p.from + len < end) {
          out.push_back(std::move(p));
          p = TailPiece::zero(out.back().from + len);
        }
        break;
      }
    }
    if (p.kind != PieceKind::explicit_values && p.is_zero()) p = TailPiece::zero(p.from);
    if (!out.empty() && out.back().kind == PieceKind::zero && p.kind == PieceKind::zero) continue;
    out.push_back(std::move(p));
  }
  tails_.at(t) = std::move(out);
}

double MeasurableFn::tail_value(std::size_t t, Index n) const { return piece_at(tails_.at(t), n).at(n); }

bool MeasurableFn::has_nonzero_tail() const noexcept {
  for (const auto& tv : tails_) {
    for (const auto& p : tv) {
      if (!p.is_zero()) return true;
    }
  }
  return false;
}

// ------------------------------------------------------------ piece helpers

std::vector<PieceSpan> piece_spans(const TailValues& tv, const IndexRanges& within) {
  std::vector<PieceSpan> out;
  for (std::size_t i = 0; i < tv.size(); ++i) {
    const Index a = tv[i].from;
    const Index b = piece_end(tv, i);
    for (const auto& [lo, hi] : within.ranges()) {
      const Index l = std::max(a, lo);
      const Index h = std::min(b, hi);
      if (l < h) out.push_back({&tv[i], l, h});
    }
  }
  return out;
}

IndexRanges above_threshold(const TailPiece& piece, Index lo, Index hi, double thr) {
  IndexRanges out;
  if (lo >= hi || piece.is_zero()) return out;
  if (piece.kind == PieceKind::explicit_values) {
    const Index end = std::min<Index>(hi, piece.from + static_cast<Index>(piece.values.size()));
    Index run = -1;
    for (Index n = std::max(lo, piece.from); n < end; ++n) {
      const bool in = std::abs(piece.at(n)) > thr;
      if (in && run < 0) run = n;
      if (!in && run >= 0) {
        out.add(run, n);
        run = -1;
      }
    }
    if (run >= 0) out.add(run, end);
    return out;
  }
  const int trend = piece.trend();
  auto above = [&](Index n) { return std::abs(piece.at(n)) > thr; };
  if (trend == 0) {
    if (above(lo)) out.add(lo, hi);
    return out;
  }
  // First index in [lo, hi) where pred holds; pred is monotone false -> true.
  auto first_true = [&](auto pred) {
    Index a = lo;
    Index b = hi == kUnbounded ? kUnbounded - 1 : hi;
    if (pred(a)) return a;
    if (!pred(b - (hi == kUnbounded ? 0 : 1))) return hi;
    // invariant: pred(a) false, pred(b) true or b == hi
    while (b - a > 1) {
      const Index mid = a + (b - a) / 2;
      if (pred(mid)) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return b;
  };
  if (trend > 0) {
    const Index first = first_true(above);
    out.add(first, hi);
  } else {
    const Index first_below = first_true([&](Index n) { return !above(n); });
    out.add(lo, first_below);
  }
  return out;
}

PowerGeometricTerm weighted_power_term(const TailFamily& tail, const TailPiece& piece, double p) {
  const PowerGeometricTerm w = tail.weight_term();
  const PowerGeometricTerm m = piece.magnitude_term();
  return {w.scale * std::pow(m.scale, p), w.ratio * std::pow(m.ratio, p), w.exponent + p * m.exponent};
}

// --------------------------------------------------------------- integration

namespace {

Estimate cell_sum(const MeasurableFn& f, const MeasurableSet& over, double p, bool signed_values) {
  const MeasureSpace& space = *f.space();
  NeumaierSum s;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double frac = over.fraction(i);
    const double v = f.value(i);
    if (frac == 0.0 || v == 0.0) continue;
    const double w = frac * space.cell(i).weight;
    if (signed_values) {
      s.add(w * v);
    } else {
      s.add(w * (p == 1.0 ? std::abs(v) : std::pow(std::abs(v), p)));
    }
  }
  const double v = s.value();
  if (std::isinf(v)) return {kInf, 0.0};
  return {v, 4.0 * kEps * s.abs_total()};
}

Estimate explicit_sum(const TailFamily& fam, const TailPiece& piece, Index lo, Index hi, double p,
                      bool signed_values) {
  NeumaierSum s;
  for (Index n = lo; n < hi; ++n) {
    const double v = piece.at(n);
    if (v == 0.0) continue;
    const double w = fam.weight(n);
    s.add(signed_values ? w * v : w * std::pow(std::abs(v), p));
  }
  return {s.value(), 4.0 * kEps * s.abs_total()};
}

void check_space(const MeasurableFn& f, const MeasurableSet& s) {
  require(f.space() == s.space(), "function and set live on different spaces");
}

}  // namespace

Estimate integrate_p(const MeasurableFn& f, double p, const MeasurableSet& over, const SeriesOptions& opts) {
  require(p > 0.0 && std::isfinite(p), "exponent p must be positive");
  check_space(f, over);
  Estimate total = cell_sum(f, over, p, false);
  const auto& tails = f.space()->tails();
  for (std::size_t t = 0; t < tails.size() && total.finite(); ++t) {
    for (const PieceSpan& sp : piece_spans(f.tail(t), over.tail(t))) {
      if (sp.piece->is_zero()) continue;
      if (sp.piece->kind == PieceKind::explicit_values) {
        total += explicit_sum(tails[t], *sp.piece, sp.lo, sp.hi, p, false);
      } else {
        total += sum_range(weighted_power_term(tails[t], *sp.piece, p), sp.lo, sp.hi, opts);
      }
      if (!total.finite()) break;
    }
  }
  return total;
}

Estimate integrate_p(const MeasurableFn& f, double p, const SeriesOptions& opts) {
  return integrate_p(f, p, MeasurableSet::whole(f.space()), opts);
}

Estimate integrate_signed(const MeasurableFn& f, const MeasurableSet& over, const SeriesOptions& opts) {
  check_space(f, over);
  const Estimate absolute = integrate_p(f, 1.0, over, opts);
  require(absolute.finite(), "function is not integrable over the set");
  Estimate total = cell_sum(f, over, 1.0, true);
  const auto& tails = f.space()->tails();
  for (std::size_t t = 0; t < tails.size(); ++t) {
    for (const PieceSpan& sp : piece_spans(f.tail(t), over.tail(t))) {
      if (sp.piece->is_zero()) continue;
      if (sp.piece->kind == PieceKind::explicit_values) {
        total += explicit_sum(tails[t], *sp.piece, sp.lo, sp.hi, 1.0, true);
      } else {
        PowerGeometricTerm term = weighted_power_term(tails[t], *sp.piece, 1.0);
        if (sp.piece->coeff < 0.0) term.scale = -term.scale;
        const Estimate part = sum_range(term, sp.lo, sp.hi, opts);
        total.value += part.value;
        total.error += part.error;
      }
    }
  }
  return total;
}

Estimate measure_of(const MeasurableFn& f, double threshold, const SeriesOptions& opts) {
  return measure_of(f, threshold, MeasurableSet::whole(f.space()), opts);
}

Estimate measure_of(const MeasurableFn& f, double threshold, const MeasurableSet& within,
                    const SeriesOptions& opts) {
  require(threshold >= 0.0 && !std::isnan(threshold), "threshold must be non-negative");
  check_space(f, within);
  const MeasureSpace& space = *f.space();
  NeumaierSum s;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (within.fraction(i) > 0.0 && std::abs(f.value(i)) > threshold) {
      s.add(within.fraction(i) * space.cell(i).weight);
    }
  }
  Estimate total{s.value(), 4.0 * kEps * s.abs_total()};
  for (std::size_t t = 0; t < space.tails().size() && total.finite(); ++t) {
    for (const PieceSpan& sp : piece_spans(f.tail(t), within.tail(t))) {
      const IndexRanges hit = above_threshold(*sp.piece, sp.lo, sp.hi, threshold);
      for (const auto& [lo, hi] : hit.ranges()) {
        total += space.tail_mass(t, lo, hi, opts);
      }
    }
  }
  return total;
}

MeasurableSet superlevel_set(const MeasurableFn& f, double threshold) {
  MeasurableSet out = MeasurableSet::empty(f.space());
  const MeasureSpace& space = *f.space();
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (std::abs(f.value(i)) > threshold) out.set_fraction(i, 1.0);
  }
  for (std::size_t t = 0; t < space.tails().size(); ++t) {
    IndexRanges r;
    for (const PieceSpan& sp : piece_spans(f.tail(t), IndexRanges::from(space.tails()[t].start))) {
      r = r.unite(above_threshold(*sp.piece, sp.lo, sp.hi, threshold));
    }
    out.set_tail(t, r);
  }
  return out;
}

// ---------------------------------------------------------------- arithmetic

MeasurableFn pointwise_min_one(const MeasurableFn& f) {
  MeasurableFn out(f.space());
  for (std::size_t i = 0; i < f.values().size(); ++i) out.set_value(i, std::min(std::abs(f.value(i)), 1.0));
  for (std::size_t t = 0; t < f.space()->tails().size(); ++t) {
    const TailValues& tv = f.tail(t);
    TailValues pieces;
    for (std::size_t i = 0; i < tv.size(); ++i) {
      split_by_threshold(
          pieces, tv[i], tv[i].from, piece_end(tv, i), 1.0,
          [](auto x) {
            if constexpr (std::is_same_v<decltype(x), double>) {
              return 1.0;
            } else {
              return TailPiece::constant(x.from, 1.0);
            }
          },
          [](auto x) {
            if constexpr (std::is_same_v<decltype(x), double>) {
              return std::abs(x);
            } else {
              return abs_piece(std::move(x));
            }
          });
    }
    out.set_tail(t, std::move(pieces));
  }
  return out;
}

MeasurableFn above_threshold_part(const MeasurableFn& f, double threshold) {
  MeasurableFn out(f.space());
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    out.set_value(i, std::abs(f.value(i)) > threshold ? f.value(i) : 0.0);
  }
  for (std::size_t t = 0; t < f.space()->tails().size(); ++t) {
    const TailValues& tv = f.tail(t);
    TailValues pieces;
    for (std::size_t i = 0; i < tv.size(); ++i) {
      split_by_threshold(
          pieces, tv[i], tv[i].from, piece_end(tv, i), threshold, [](auto x) { return x; },
          [](auto x) {
            if constexpr (std::is_same_v<decltype(x), double>) {
              return 0.0;
            } else {
              return TailPiece::zero(x.from);
            }
          });
    }
    out.set_tail(t, std::move(pieces));
  }
  return out;
}

MeasurableFn abs(const MeasurableFn& f) {
  MeasurableFn out(f.space());
  for (std::size_t i = 0; i < f.values().size(); ++i) out.set_value(i, std::abs(f.value(i)));
  for (std::size_t t = 0; t < f.space()->tails().size(); ++t) {
    TailValues tv = f.tail(t);
    for (auto& p : tv) p = abs_piece(std::move(p));
    out.set_tail(t, std::move(tv));
  }
  return out;
}

MeasurableFn scale(const MeasurableFn& f, double lambda) {
  require(std::isfinite(lambda), "scalar must be finite");
  MeasurableFn out(f.space());
  if (lambda == 0.0) return out;
  for (std::size_t i = 0; i < f.values().size(); ++i) out.set_value(i, lambda * f.value(i));
  for (std::size_t t = 0; t < f.space()->tails().size(); ++t) {
    TailValues tv = f.tail(t);
    for (auto& p : tv) {
      p.coeff *= lambda;
      for (double& v : p.values) v *= lambda;
    }
    out.set_tail(t, std::move(tv));
  }
  return out;
}

MeasurableFn add(const MeasurableFn& f, const MeasurableFn& g) {
  require(f.space() == g.space(), "functions live on different spaces");
  MeasurableFn out(f.space());
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    const double v = f.value(i) + g.value(i);
    require(std::isfinite(v), "sum overflows");
    out.set_value(i, v);
  }
  for (std::size_t t = 0; t < f.space()->tails().size(); ++t) {
    const TailValues& a = f.tail(t);
    const TailValues& b = g.tail(t);
    std::vector<Index> breaks = breakpoints(a);
    const auto bb = breakpoints(b);
    breaks.insert(breaks.end(), bb.begin(), bb.end());
    TailValues pieces = rebuild(f.space()->tails()[t].start, std::move(breaks), [&](Index lo, Index hi) {
      const TailPiece& p = piece_at(a, lo);
      const TailPiece& q = piece_at(b, lo);
      if (q.is_zero()) return slice(p, lo, hi);
      if (p.is_zero()) return slice(q, lo, hi);
      if (p.kind == q.kind && p.kind != PieceKind::explicit_values && p.rate == q.rate) {
        TailPiece r = p.rebased(lo);
        r.coeff = p.coeff + q.coeff;
        if (r.coeff == 0.0) return TailPiece::zero(lo);
        return r;
      }
      if (hi != kUnbounded && hi - lo <= kMaxExplicitSpan) {
        std::vector<double> vals(static_cast<std::size_t>(hi - lo));
        for (Index n = lo; n < hi; ++n) vals[static_cast<std::size_t>(n - lo)] = p.at(n) + q.at(n);
        return TailPiece::explicit_values(lo, std::move(vals));
      }
      fail(ErrorKind::UnsupportedFamilyCombination,
           "cannot combine tail families of different kinds or rates on an unbounded range");
    });
    out.set_tail(t, std::move(pieces));
  }
  return out;
}

MeasurableFn subtract(const MeasurableFn& f, const MeasurableFn& g) { return add(f, scale(g, -1.0)); }

MeasurableFn restrict_to(const MeasurableFn& f, const MeasurableSet& set) {
  check_space(f, set);
  MeasurableFn out(f.space());
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    const double frac = set.fraction(i);
    if (frac == 1.0) {
      out.set_value(i, f.value(i));
    } else if (frac > 0.0 && f.value(i) != 0.0) {
      fail(ErrorKind::InvalidArgument, "restriction to a fractional cell is not piecewise constant");
    }
  }
  for (std::size_t t = 0; t < f.space()->tails().size(); ++t) {
    const Index start = f.space()->tails()[t].start;
    const TailValues& tv = f.tail(t);
    std::vector<Index> breaks = breakpoints(tv);
    add_range_breaks(breaks, set.tail(t), start);
    TailValues pieces = rebuild(start, std::move(breaks), [&](Index lo, Index hi) {
      if (!set.tail(t).contains(lo)) return TailPiece::zero(lo);
      return slice(piece_at(tv, lo), lo, hi);
    });
    out.set_tail(t, std::move(pieces));
  }
  return out;
}

}  // namespace alp
