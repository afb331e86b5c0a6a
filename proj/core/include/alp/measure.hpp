#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alp/series.hpp"

namespace alp {

/// Options used when a caller does not pass any: library defaults with the
/// ALP_MAX_TAIL_TERMS override applied once.
const SeriesOptions& default_series_options();

/// One block of a finite partition. A divisible cell is non-atomic (any
/// sub-measure is realizable); an indivisible one is an atom.
struct Cell {
  int id = 0;
  double weight = 0.0;
  bool divisible = true;
};

enum class TailKind { geometric, constant, power };

/// Countable family of atoms indexed n >= start with weight a*r^n (geometric),
/// c (constant) or c*n^(-s) (power).
struct TailFamily {
  TailKind kind = TailKind::constant;
  double scale = 1.0;  // a or c
  double rate = 0.0;   // r or s; unused for constant
  Index start = 1;

  static TailFamily geometric(double a, double r, Index start = 1);
  static TailFamily constant(double c, Index start = 1);
  static TailFamily power(double c, double s, Index start = 1);

  PowerGeometricTerm weight_term() const noexcept;
  double weight(Index n) const noexcept { return weight_term().at(n); }
  bool finite_mass() const noexcept { return weight_term().summable(); }
  /// Throws InvalidArgument on non-positive scale, r outside (0,1), s <= 0 or
  /// a power tail starting below 1.
  void validate() const;
};

/// Finite weighted cell partition extended by zero or more atomic tails.
class MeasureSpace {
 public:
  explicit MeasureSpace(std::vector<Cell> cells, std::vector<TailFamily> tails = {});

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const std::vector<TailFamily>& tails() const noexcept { return tails_; }
  std::size_t size() const noexcept { return cells_.size(); }
  const Cell& cell(std::size_t i) const { return cells_.at(i); }
  /// Position of the cell with the given id; throws InvalidArgument if absent.
  std::size_t index_of(int id) const;

  bool has_tails() const noexcept { return !tails_.empty(); }
  bool finite_measure() const noexcept;
  double finite_part_measure() const noexcept;
  Estimate total_measure(const SeriesOptions& opts = default_series_options()) const;
  /// Total weight of tail atoms lo <= n < hi.
  Estimate tail_mass(std::size_t tail, Index lo, Index hi,
                     const SeriesOptions& opts = default_series_options()) const;

 private:
  std::vector<Cell> cells_;
  std::vector<TailFamily> tails_;
  std::unordered_map<int, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

SpacePtr make_space(std::vector<Cell> cells, std::vector<TailFamily> tails = {});

/// Sorted, disjoint, half-open index intervals; the upper end may be kUnbounded.
class IndexRanges {
 public:
  using Range = std::pair<Index, Index>;

  IndexRanges() = default;
  static IndexRanges from(Index lo) { return span(lo, kUnbounded); }
  static IndexRanges span(Index lo, Index hi);

  void add(Index lo, Index hi);
  const std::vector<Range>& ranges() const noexcept { return ranges_; }
  bool empty() const noexcept { return ranges_.empty(); }
  bool contains(Index n) const noexcept;
  bool bounded() const noexcept { return ranges_.empty() || ranges_.back().second != kUnbounded; }

  IndexRanges complement_within(Index start) const;
  IndexRanges intersect(const IndexRanges& other) const;
  IndexRanges unite(const IndexRanges& other) const;

  friend bool operator==(const IndexRanges&, const IndexRanges&) = default;

 private:
  std::vector<Range> ranges_;
};

/// Measurable set of the cell model. On each cell the set occupies one
/// sub-segment [lo, hi) of the unit interval (fractions only on divisible
/// cells); on each tail it is a set of atom indices.
class MeasurableSet {
 public:
  struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    double length() const noexcept { return hi - lo; }
    friend bool operator==(const Segment&, const Segment&) = default;
  };

  static MeasurableSet empty(SpacePtr space);
  static MeasurableSet whole(SpacePtr space);
  static MeasurableSet of_cells(SpacePtr space, const std::vector<int>& ids);

  const SpacePtr& space() const noexcept { return space_; }

  /// Occupies the initial fraction of cell i.
  void set_fraction(std::size_t cell_index, double fraction);
  void set_segment(std::size_t cell_index, Segment segment);
  void set_tail(std::size_t tail, IndexRanges ranges);

  double fraction(std::size_t cell_index) const { return segments_.at(cell_index).length(); }
  const Segment& segment(std::size_t cell_index) const { return segments_.at(cell_index); }
  const IndexRanges& tail(std::size_t t) const { return tails_.at(t); }

  MeasurableSet complement() const;
  MeasurableSet unite(const MeasurableSet& other) const;
  MeasurableSet intersect(const MeasurableSet& other) const;

  Estimate measure(const SeriesOptions& opts = default_series_options()) const;
  bool is_empty() const noexcept;

  friend bool operator==(const MeasurableSet& a, const MeasurableSet& b) {
    return a.space_ == b.space_ && a.segments_ == b.segments_ && a.tails_ == b.tails_;
  }

 private:
  explicit MeasurableSet(SpacePtr space);

  SpacePtr space_;
  std::vector<Segment> segments_;
  std::vector<IndexRanges> tails_;
};

enum class PieceKind { zero, constant, geometric, power, explicit_values };

/// Values of a function on consecutive tail atoms starting at `from`:
/// coeff (constant), coeff*rate^n (geometric), coeff*n^(-rate) (power), or an
/// explicit list. The sign of the piece is the sign of coeff.
struct TailPiece {
  Index from = 1;
  PieceKind kind = PieceKind::zero;
  double coeff = 0.0;
  double rate = 0.0;
  std::vector<double> values;

  static TailPiece zero(Index from);
  static TailPiece constant(Index from, double b);
  static TailPiece geometric(Index from, double b, double q);
  static TailPiece power(Index from, double b, double t);
  static TailPiece explicit_values(Index from, std::vector<double> values);

  double at(Index n) const noexcept;
  bool is_zero() const noexcept;
  /// |value| as a power-geometric term (families only).
  PowerGeometricTerm magnitude_term() const noexcept;
  /// Direction of |value| in n: +1 increasing, -1 decreasing, 0 constant
  /// (families only).
  int trend() const noexcept;
  /// Copy of this piece describing the same values from index `from` on.
  TailPiece rebased(Index new_from) const;
};

/// Pieces sorted by `from`; piece i covers [from_i, from_{i+1}) and the last
/// piece is unbounded.
using TailValues = std::vector<TailPiece>;

/// Piecewise-constant real function: one value per cell plus a piecewise
/// family of values on every tail.
class MeasurableFn {
 public:
  explicit MeasurableFn(SpacePtr space);
  MeasurableFn(SpacePtr space, std::vector<double> values);

  const SpacePtr& space() const noexcept { return space_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_.at(i); }
  void set_value(std::size_t i, double v);

  const TailValues& tail(std::size_t t) const { return tails_.at(t); }
  /// Validates finiteness and ordering, pads explicit trailers with zero.
  void set_tail(std::size_t t, TailValues pieces);
  double tail_value(std::size_t t, Index n) const;
  bool has_nonzero_tail() const noexcept;

 private:
  SpacePtr space_;
  std::vector<double> values_;
  std::vector<TailValues> tails_;
};

/// Smallest N >= from such that the tail atoms n >= N weigh strictly less
/// than `budget` (error bound included). The tail must have finite mass.
Index suffix_below(const MeasureSpace& space, std::size_t tail, Index from, double budget,
                   const SeriesOptions& opts = default_series_options());

/// A piece restricted to [lo, hi).
struct PieceSpan {
  const TailPiece* piece = nullptr;
  Index lo = 0;
  Index hi = 0;
};

/// Pieces of `values` intersected with `within`, in index order.
std::vector<PieceSpan> piece_spans(const TailValues& values, const IndexRanges& within);

/// Sub-range of [lo, hi) where |piece| > threshold (families are monotone, so
/// the result is one interval; explicit pieces may yield several).
IndexRanges above_threshold(const TailPiece& piece, Index lo, Index hi, double threshold);

/// weight(n) * |value(n)|^p for a family piece.
PowerGeometricTerm weighted_power_term(const TailFamily& tail, const TailPiece& piece, double p);

/// Integral of |f|^p over a set; exact on the finite part, tails within the
/// option tolerance. Returns +inf when the integral diverges.
Estimate integrate_p(const MeasurableFn& f, double p, const MeasurableSet& over,
                     const SeriesOptions& opts = default_series_options());
Estimate integrate_p(const MeasurableFn& f, double p,
                     const SeriesOptions& opts = default_series_options());
/// Signed integral of f over a set; InvalidArgument if f is not integrable there.
Estimate integrate_signed(const MeasurableFn& f, const MeasurableSet& over,
                          const SeriesOptions& opts = default_series_options());

/// mu(|f| > threshold), optionally within a set.
Estimate measure_of(const MeasurableFn& f, double threshold,
                    const SeriesOptions& opts = default_series_options());
Estimate measure_of(const MeasurableFn& f, double threshold, const MeasurableSet& within,
                    const SeriesOptions& opts = default_series_options());
MeasurableSet superlevel_set(const MeasurableFn& f, double threshold);

MeasurableFn pointwise_min_one(const MeasurableFn& f);
MeasurableFn abs(const MeasurableFn& f);
MeasurableFn scale(const MeasurableFn& f, double lambda);
/// Throws UnsupportedFamilyCombination when two tail families cannot be
/// combined into a representable family.
MeasurableFn add(const MeasurableFn& f, const MeasurableFn& g);
MeasurableFn subtract(const MeasurableFn& f, const MeasurableFn& g);
/// f * chi_E. Cells cut fractionally by E must carry value 0.
MeasurableFn restrict_to(const MeasurableFn& f, const MeasurableSet& set);
/// f * chi_{|f| > threshold}.
MeasurableFn above_threshold_part(const MeasurableFn& f, double threshold);

}  // namespace alp
