#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace alp {

using nlohmann::json;

/// JSON number, or the string "inf" for non-finite values.
json number_or_inf(double x);

/// Outcome of a property check over one or more trials.
struct CheckReport {
  std::string check;
  int trials = 0;
  std::vector<json> violations;
  /// Largest observed amount by which a checked relation was off (0 when every
  /// inequality held with room to spare).
  double max_residual = 0.0;
  json details = json::object();

  bool passed() const noexcept { return violations.empty(); }
  /// Records a residual; a residual above `slack` becomes a violation.
  void observe(double residual, double slack, const json& context);
  json to_json() const;
};

}  // namespace alp
