#include "alp/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "alp/errors.hpp"
#include "alp/families.hpp"
#include "alp/gallery.hpp"

namespace alp {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { fail(ErrorKind::Parse, what); }

// Runs `body`, turning malformed-JSON and validation failures into Parse errors.
template <class Body>
auto guarded(const char* what, Body&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    parse_fail(std::string(what) + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) parse_fail(std::string(what) + ": " + e.what());
    throw;
  }
}

double number(const json& j, const std::string& key) {
  if (!j.contains(key)) parse_fail("missing field '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) parse_fail("field '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) parse_fail("field '" + key + "' must be finite");
  return x;
}

double number_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Index integer_or(const json& j, const std::string& key, Index fallback) {
  if (!j.contains(key)) return fallback;
  const double x = number(j, key);
  if (x != std::floor(x)) parse_fail("field '" + key + "' must be an integer");
  return static_cast<Index>(x);
}

double finite_value(const json& v) {
  if (!v.is_number()) parse_fail("values must be numbers");
  const double x = v.get<double>();
  if (!std::isfinite(x)) parse_fail("values must be finite");
  return x;
}

TailFamily parse_tail_family(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const Index start = integer_or(j, "start", 1);
  if (kind == "geometric") {
    const double a = number(j, "a");
    const double r = number(j, "r");
    if (!(r > 0.0 && r < 1.0)) parse_fail("geometric ratio r must lie in (0, 1)");
    if (!(a > 0.0)) parse_fail("geometric scale a must be positive");
    return TailFamily::geometric(a, r, start);
  }
  if (kind == "constant") {
    const double c = number(j, "c");
    if (!(c > 0.0)) parse_fail("constant tail weight c must be positive");
    return TailFamily::constant(c, start);
  }
  if (kind == "power") {
    const double c = number(j, "c");
    const double s = number(j, "s");
    if (!(c > 0.0) || !(s > 0.0)) parse_fail("power tail needs c > 0 and s > 0");
    return TailFamily::power(c, s, start);
  }
  parse_fail("unknown tail kind '" + kind + "'");
}

json family_json(const TailFamily& t) {
  switch (t.kind) {
    case TailKind::geometric:
      return {{"kind", "geometric"}, {"a", t.scale}, {"r", t.rate}, {"start", t.start}};
    case TailKind::constant:
      return {{"kind", "constant"}, {"c", t.scale}, {"start", t.start}};
    case TailKind::power:
      return {{"kind", "power"}, {"c", t.scale}, {"s", t.rate}, {"start", t.start}};
  }
  return json::object();
}

TailPiece parse_piece(const json& j, Index default_from) {
  const std::string kind = j.at("kind").get<std::string>();
  const Index from = integer_or(j, "from", default_from);
  const double sign = number_or(j, "sign", 1.0);
  if (sign != 1.0 && sign != -1.0) parse_fail("sign must be 1 or -1");
  if (kind == "zero") return TailPiece::zero(from);
  if (kind == "explicit") {
    std::vector<double> vals;
    for (const json& v : j.at("values")) vals.push_back(sign * finite_value(v));
    return TailPiece::explicit_values(from, std::move(vals));
  }
  const double b = number(j, "b");
  if (kind == "constant") return TailPiece::constant(from, sign * b);
  if (kind == "geometric") {
    const double q = number(j, "q");
    if (!(q > 0.0)) parse_fail("geometric value ratio q must be positive");
    return TailPiece::geometric(from, sign * b, q);
  }
  if (kind == "power") return TailPiece::power(from, sign * b, number(j, "t"));
  parse_fail("unknown tail value kind '" + kind + "'");
}

json piece_json(const TailPiece& p) {
  json j{{"from", p.from}};
  const double sign = p.coeff < 0.0 ? -1.0 : 1.0;
  switch (p.kind) {
    case PieceKind::zero:
      j["kind"] = "zero";
      break;
    case PieceKind::constant:
      j.update({{"kind", "constant"}, {"b", std::abs(p.coeff)}, {"sign", sign}});
      break;
    case PieceKind::geometric:
      j.update({{"kind", "geometric"}, {"b", std::abs(p.coeff)}, {"q", p.rate}, {"sign", sign}});
      break;
    case PieceKind::power:
      j.update({{"kind", "power"}, {"b", std::abs(p.coeff)}, {"t", p.rate}, {"sign", sign}});
      break;
    case PieceKind::explicit_values:
      j.update({{"kind", "explicit"}, {"values", p.values}});
      break;
  }
  return j;
}

TailValues parse_tail_values(const json& j, Index start) {
  TailValues pieces;
  if (j.contains("pieces")) {
    for (const json& p : j.at("pieces")) pieces.push_back(parse_piece(p, start));
  } else {
    pieces.push_back(parse_piece(j, start));
  }
  return pieces;
}

IndexRanges parse_tail_ranges(const json& j, Index start) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "none") return {};
    if (s == "all") return IndexRanges::from(start);
    parse_fail("tail selector must be \"none\", \"all\" or {\"from\": k}");
  }
  if (j.contains("from")) {
    const Index k = integer_or(j, "from", start);
    if (k < start) parse_fail("tail selector 'from' lies before the tail start");
    return IndexRanges::from(k);
  }
  IndexRanges r;
  for (const json& span : j.at("ranges")) {
    const double lo = finite_value(span.at(0));
    const double hi = span.at(1).is_string() ? static_cast<double>(kUnbounded) : finite_value(span.at(1));
    r.add(static_cast<Index>(lo), hi >= static_cast<double>(kUnbounded) ? kUnbounded : static_cast<Index>(hi));
  }
  return r;
}

json ranges_json(const IndexRanges& r, Index start) {
  if (r.empty()) return "none";
  if (r.ranges().size() == 1 && r.ranges().front().second == kUnbounded) {
    if (r.ranges().front().first <= start) return "all";
    return {{"from", r.ranges().front().first}};
  }
  json spans = json::array();
  for (const auto& [lo, hi] : r.ranges()) spans.push_back({lo, hi == kUnbounded ? json("inf") : json(hi)});
  return {{"ranges", spans}};
}

// Accepts the single "tail" form or the "tails" list, checked against the tail count.
std::vector<const json*> tail_entries(const json& j, std::size_t expected, const char* what) {
  std::vector<const json*> out;
  if (j.contains("tails")) {
    for (const json& t : j.at("tails")) out.push_back(&t);
  } else if (j.contains("tail")) {
    out.push_back(&j.at("tail"));
  }
  if (out.size() > expected) parse_fail(std::string(what) + " describes more tails than the space has");
  return out;
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_fail("'" + path.string() + "': " + e.what());
  }
}

SpacePtr parse_space(const json& j) {
  return guarded("space", [&] {
    std::vector<Cell> cells;
    if (j.contains("cells")) {
      for (const json& c : j.at("cells")) {
        const Index id = integer_or(c, "id", static_cast<Index>(cells.size()));
        const double w = number(c, "weight");
        if (w < 0.0) parse_fail("cell weights must be nonnegative");
        cells.push_back({static_cast<int>(id), w, c.value("divisible", true)});
      }
    }
    std::vector<TailFamily> tails;
    std::vector<const json*> entries;
    if (j.contains("tails")) {
      for (const json& t : j.at("tails")) entries.push_back(&t);
    } else if (j.contains("tail")) {
      entries.push_back(&j.at("tail"));
    }
    for (const json* t : entries) {
      if (t->is_null() || (t->contains("kind") && t->at("kind") == "none")) continue;
      tails.push_back(parse_tail_family(*t));
    }
    return make_space(std::move(cells), std::move(tails));
  });
}

json to_json(const MeasureSpace& space) {
  json cells = json::array();
  for (const Cell& c : space.cells()) cells.push_back({{"id", c.id}, {"weight", c.weight}, {"divisible", c.divisible}});
  json j{{"cells", std::move(cells)}};
  if (space.tails().size() == 1) {
    j["tail"] = family_json(space.tails().front());
  } else if (space.tails().size() > 1) {
    json ts = json::array();
    for (const TailFamily& t : space.tails()) ts.push_back(family_json(t));
    j["tails"] = std::move(ts);
  }
  return j;
}

MeasurableFn parse_function(const json& j, const SpacePtr& space) {
  return guarded("function", [&] {
    MeasurableFn f(space);
    if (j.contains("values")) {
      const json& vals = j.at("values");
      if (vals.is_array()) {
        if (vals.size() != space->size()) parse_fail("value array length does not match the cell count");
        for (std::size_t i = 0; i < vals.size(); ++i) f.set_value(i, finite_value(vals[i]));
      } else {
        for (const auto& [key, v] : vals.items()) {
          std::size_t used = 0;
          int id = 0;
          try {
            id = std::stoi(key, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used != key.size() || key.empty()) parse_fail("value key '" + key + "' is not a cell id");
          f.set_value(space->index_of(id), finite_value(v));
        }
      }
    }
    const auto entries = tail_entries(j, space->tails().size(), "function");
    for (std::size_t t = 0; t < entries.size(); ++t) {
      if (entries[t]->is_null()) continue;
      f.set_tail(t, parse_tail_values(*entries[t], space->tails()[t].start));
    }
    return f;
  });
}

json to_json(const MeasurableFn& f) {
  json vals = json::object();
  const auto& cells = f.space()->cells();
  for (std::size_t i = 0; i < cells.size(); ++i) vals[std::to_string(cells[i].id)] = f.value(i);
  json j{{"values", std::move(vals)}};
  json tails = json::array();
  for (std::size_t t = 0; t < f.space()->tails().size(); ++t) {
    json pieces = json::array();
    for (const TailPiece& p : f.tail(t)) pieces.push_back(piece_json(p));
    tails.push_back(pieces.size() == 1 ? pieces.front() : json{{"pieces", std::move(pieces)}});
  }
  if (tails.size() == 1) {
    j["tail"] = tails.front();
  } else if (!tails.empty()) {
    j["tails"] = std::move(tails);
  }
  return j;
}

MeasurableSet parse_set(const json& j, const SpacePtr& space) {
  return guarded("set", [&] {
    MeasurableSet s = MeasurableSet::empty(space);
    if (j.contains("cells")) {
      for (const json& id : j.at("cells")) s.set_fraction(space->index_of(id.get<int>()), 1.0);
    }
    if (j.contains("fractions")) {
      for (const auto& [key, v] : j.at("fractions").items()) {
        const double x = finite_value(v);
        if (x < 0.0 || x > 1.0) parse_fail("fractions must lie in [0, 1]");
        s.set_fraction(space->index_of(std::stoi(key)), x);
      }
    }
    const auto entries = tail_entries(j, space->tails().size(), "set");
    for (std::size_t t = 0; t < entries.size(); ++t) {
      s.set_tail(t, parse_tail_ranges(*entries[t], space->tails()[t].start));
    }
    return s;
  });
}

json to_json(const MeasurableSet& set) {
  const SpacePtr& space = set.space();
  json cells = json::array();
  json fractions = json::object();
  for (std::size_t i = 0; i < space->size(); ++i) {
    const double x = set.fraction(i);
    if (x == 1.0) {
      cells.push_back(space->cell(i).id);
    } else if (x > 0.0) {
      fractions[std::to_string(space->cell(i).id)] = x;
    }
  }
  json j{{"cells", std::move(cells)}};
  if (!fractions.empty()) j["fractions"] = std::move(fractions);
  json tails = json::array();
  for (std::size_t t = 0; t < space->tails().size(); ++t) tails.push_back(ranges_json(set.tail(t), space->tails()[t].start));
  if (tails.size() == 1) {
    j["tail"] = tails.front();
  } else if (!tails.empty()) {
    j["tails"] = std::move(tails);
  }
  return j;
}

FnSequence parse_sequence(const json& j) {
  return guarded("sequence", [&] {
    const std::string family = j.at("family").get<std::string>();
    const Index n_max = integer_or(j, "n_max", 64);
    if (n_max < 1) parse_fail("n_max must be >= 1");
    if (family == "chi_shrinking") return chi_shrinking(n_max);
    if (family == "n_chi_shrinking") return n_chi_shrinking(n_max);
    if (family == "escaping_box") return escaping_box(n_max);
    if (family == "ball_spikes" || family == "ball_spikes_scaled") {
      auto seqs = gallery_sequences(n_max, number_or(j, "eps", 1.0), number_or(j, "p", 1.0));
      return std::move(seqs[family == "ball_spikes" ? 0 : 1]);
    }
    if (family != "explicit") parse_fail("unknown sequence family '" + family + "'");
    const SpacePtr space = parse_space(j.at("space"));
    std::vector<MeasurableFn> terms;
    for (const json& t : j.at("terms")) terms.push_back(parse_function(t, space));
    if (terms.empty()) parse_fail("explicit sequence needs at least one term");
    std::optional<MeasurableFn> limit;
    if (j.contains("limit") && !j.at("limit").is_null()) limit = parse_function(j.at("limit"), space);
    return FnSequence(space, std::move(terms), std::move(limit), j.value("name", std::string("explicit")));
  });
}

GridBox parse_grid_box(const json& j) {
  return guarded("grid header", [&] {
    GridBox b;
    b.dim = static_cast<int>(integer_or(j, "dim", 1));
    if (b.dim < 1 || b.dim > 3) parse_fail("grid dimension must be 1, 2 or 3");
    const json& lo = j.at("lo");
    const json& hi = j.at("hi");
    const json& cells = j.at("cells");
    auto axis_count = [&](const json& a) { return a.is_array() && a.size() == static_cast<std::size_t>(b.dim); };
    if (!axis_count(lo) || !axis_count(hi) || !axis_count(cells)) parse_fail("lo, hi and cells need one entry per axis");
    for (int a = 0; a < b.dim; ++a) {
      b.lo[a] = finite_value(lo[a]);
      b.hi[a] = finite_value(hi[a]);
      const double c = finite_value(cells[a]);
      if (c != std::floor(c) || c < 1.0) parse_fail("cell counts must be positive integers");
      b.cells[a] = static_cast<Index>(c);
    }
    b.validate();
    return b;
  });
}

json to_json(const GridBox& box) {
  json lo = json::array();
  json hi = json::array();
  json cells = json::array();
  for (int a = 0; a < box.dim; ++a) {
    lo.push_back(box.lo[a]);
    hi.push_back(box.hi[a]);
    cells.push_back(box.cells[a]);
  }
  return {{"dim", box.dim}, {"lo", lo}, {"hi", hi}, {"cells", cells}};
}

GridFn parse_grid(const json& j) {
  GridBox box = parse_grid_box(j);
  return guarded("grid", [&] {
    GridFn g{box, {}};
    for (const json& v : j.at("values")) g.values.push_back(finite_value(v));
    if (g.values.size() != box.size()) parse_fail("grid has " + std::to_string(g.values.size()) + " values, expected " +
                                                  std::to_string(box.size()));
    return g;
  });
}

GridFn read_grid_csv(const GridBox& box, std::istream& in) {
  GridFn g{box, {}};
  g.values.reserve(box.size());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& c : text) {
    if (c == ',' || c == ';') c = ' ';
  }
  std::istringstream tokens(text);
  std::string tok;
  while (tokens >> tok) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(x)) parse_fail("bad grid value '" + tok + "'");
    g.values.push_back(x);
  }
  if (g.values.size() != box.size()) {
    parse_fail("grid CSV has " + std::to_string(g.values.size()) + " values, expected " + std::to_string(box.size()));
  }
  return g;
}

void write_grid_csv(const GridFn& f, std::ostream& out) {
  const auto row = static_cast<std::size_t>(f.box.cells[f.box.dim - 1]);
  out << std::setprecision(17);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    out << f.values[i] << ((i + 1) % row == 0 ? '\n' : ',');
  }
}

std::vector<std::pair<std::string, std::string>> revalidate_report(const json& report) {
  return guarded("report", [&] {
    const json& modes = report.at("modes");
    const double tol = number(report, "tol");
    auto verdict_of = [&](const std::string& name) {
      if (!modes.contains(name)) parse_fail("report lacks mode '" + name + "'");
      const std::string v = modes.at(name).at("verdict").get<std::string>();
      for (Verdict c : {Verdict::holds, Verdict::fails, Verdict::inconclusive}) {
        if (v == to_string(c)) return c;
      }
      parse_fail("unknown verdict '" + v + "'");
    };
    std::vector<std::pair<std::string, std::string>> bad;
    for (const char* name : {"Lp", "alpha_p"}) {
      std::vector<double> trace;
      for (const json& x : modes.at(name).at("trace")) trace.push_back(x.is_string() ? kInf : x.get<double>());
      if (trace_verdict(trace, tol) != verdict_of(name)) bad.emplace_back(name, "trace_rule");
    }
    const auto& chain = implication_chain();
    for (std::size_t a = 0; a < chain.size(); ++a) {
      for (std::size_t b = a + 1; b < chain.size(); ++b) {
        if (verdict_of(chain[a]) == Verdict::holds && verdict_of(chain[b]) == Verdict::fails) {
          bad.emplace_back(chain[a], chain[b]);
        }
      }
    }
    return bad;
  });
}

}  // namespace alp
