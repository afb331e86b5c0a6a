#pragma once

#include <map>
#include <string>
#include <vector>

#include "alp/convergence.hpp"

namespace alp {

using GalleryParams = std::map<std::string, double>;

struct GalleryParam {
  std::string name;
  double default_value = 0.0;
  std::string domain;
};

struct GalleryExpectation {
  std::string quantity;
  std::string expression;
  /// "closed_form" or "derived".
  std::string provenance;
  std::string citation;
};

struct GalleryInfo {
  std::string name;
  std::string summary;
  std::vector<GalleryParam> params;
  std::vector<GalleryExpectation> expected;

  json to_json() const;
};

/// One computed-vs-analytic comparison.
struct GalleryCheck {
  std::string quantity;
  double computed = 0.0;
  double expected = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  std::string provenance;
  std::string citation;
  bool passed = false;
};

struct GalleryReport {
  std::string entry;
  GalleryParams params;
  std::vector<GalleryCheck> checks;
  json data = json::object();

  bool passed() const noexcept;
  json to_json() const;
};

/// Stable-ordered catalog.
const std::vector<GalleryInfo>& list_entries();

/// Throws UnknownEntry for an unknown name and ParamOutOfDomain for a
/// parameter outside the entry's domain or not declared by it.
GalleryReport run_entry(const std::string& name, const GalleryParams& params = {});

/// Sequences built from the gallery constructions, for the implication checks:
/// f_n = n χ_{E_n} and (1/n) f_n on N disjoint cubes of measure (ε/2)^p.
std::vector<FnSequence> gallery_sequences(Index n_max, double eps = 1.0, double p = 1.0);

}  // namespace alp
