#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace alp::cli {

struct Series {
  std::string label;
  std::vector<double> values;  // y at n = 1, 2, ...
};

/// Static SVG line chart with a log10 y axis. Non-positive and non-finite
/// points are dropped.
void write_trace_svg(const std::vector<Series>& series, const std::string& title, std::ostream& out);

}  // namespace alp::cli
