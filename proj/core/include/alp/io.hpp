#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "alp/approx.hpp"
#include "alp/convergence.hpp"

namespace alp {

/// All parsers throw ErrorKind::Parse on malformed input, non-finite numbers,
/// negative weights and geometric ratios outside (0, 1).
json read_json_file(const std::filesystem::path& path);

/// {"cells":[{"id","weight","divisible"}], "tail":{"kind","a","r","c","s","start"}}.
/// "tails":[...] is accepted for spaces with several tail families.
SpacePtr parse_space(const json& j);
json to_json(const MeasureSpace& space);

/// {"values":{"<id>":v} or [v...], "tail":{"kind","b","q","t","sign","from","values"}}.
/// A tail entry may also be {"pieces":[...]}; "tails":[...] covers several tails.
MeasurableFn parse_function(const json& j, const SpacePtr& space);
json to_json(const MeasurableFn& f);

/// {"cells":[ids], "fractions":{"<id>":x}, "tail":"none"|"all"|{"from":k}}.
MeasurableSet parse_set(const json& j, const SpacePtr& space);
json to_json(const MeasurableSet& set);

/// {"family":"chi_shrinking"|"n_chi_shrinking"|"escaping_box"|"ball_spikes"|
///  "ball_spikes_scaled"|"explicit", "n_max":N, ...}. Explicit sequences carry
/// "space", "terms" and an optional "limit".
FnSequence parse_sequence(const json& j);

/// {"dim", "lo":[..], "hi":[..], "cells":[..]}.
GridBox parse_grid_box(const json& j);
json to_json(const GridBox& box);
/// Header plus inline "values" (row-major).
GridFn parse_grid(const json& j);
/// Row-major values, separated by commas, whitespace or newlines.
GridFn read_grid_csv(const GridBox& box, std::istream& in);
void write_grid_csv(const GridFn& f, std::ostream& out);

/// Re-reads a classify report and re-checks verdict names, the trace rule
/// for trace-based modes and the implication chain. Returns the offending
/// pairs; throws Parse on malformed reports.
std::vector<std::pair<std::string, std::string>> revalidate_report(const json& report);

}  // namespace alp
