#include "alp/report.hpp"

#include <algorithm>
#include <cmath>

namespace alp {

json number_or_inf(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

void CheckReport::observe(double residual, double slack, const json& context) {
  if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
  max_residual = std::max(max_residual, residual);
  if (residual > slack) {
    json v = context;
    v["residual"] = number_or_inf(residual);
    violations.push_back(std::move(v));
  }
}

json CheckReport::to_json() const {
  json j{{"check", check}, {"trials", trials}, {"violations", violations}, {"max_residual", number_or_inf(max_residual)}};
  if (!details.empty()) j["details"] = details;
  j["passed"] = passed();
  return j;
}

}  // namespace alp
