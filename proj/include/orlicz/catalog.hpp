// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "orlicz/young.hpp"
#include "orlicz/young_analysis.hpp"

namespace orlicz {

struct CatalogEntry {
  std::string label;
  YoungFunction phi;
  std::string source;  ///< "doubling-list" or "physics"
};

/// Built-in Young functions: the doubling list (parameters picked for N = 3),
/// the exponential-square counterexample, and three models from physics.
[[nodiscard]] inline std::vector<CatalogEntry> catalog() {
  return {
      {"elasticity-list", YoungFunction::elasticity(1.5), "doubling-list"},
      {"plasticity-list", YoungFunction::plasticity(1.5, 1.0), "doubling-list"},
      {"power", YoungFunction::power(2.0), "doubling-list"},
      {"power-sum", YoungFunction::power_sum(2.0, 2.5), "doubling-list"},
      {"exp-square", YoungFunction::exp_square(), "doubling-list"},
      {"elasticity", YoungFunction::elasticity(0.75), "physics"},
      {"plasticity", YoungFunction::plasticity(2.0, 1.0), "physics"},
      {"newtonian", YoungFunction::newtonian(0.5, 1.0), "physics"},
  };
}

struct CatalogRow {
  std::string label;
  std::string name;
  std::string source;
  double l = 0.0;
  double m = 0.0;
  bool closed_form = false;
  bool delta2 = true;
  double m_bound = 0.0;
  double witness_t = 0.0;
};

/// Indices are rounded to 1e-6 so scans that approach an integer print as that integer.
[[nodiscard]] inline CatalogRow classify(const CatalogEntry& e) {
  const auto idx = simonenko_indices(e.phi);
  const auto d2 = check_delta2(e.phi);
  auto tidy = [](double x) { return std::isfinite(x) ? std::round(x * 1e6) / 1e6 : x; };
  // a doubling violator has no finite upper index, whatever the finite scan saw
  const double m = d2.satisfied ? tidy(idx.m) : std::numeric_limits<double>::infinity();
  return {e.label, e.phi.name(), e.source, tidy(idx.l), m, idx.closed_form, d2.satisfied, d2.m_bound, d2.witness_t};
}

}  // namespace orlicz
