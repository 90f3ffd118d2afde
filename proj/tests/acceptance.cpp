// SPDX-License-Identifier: Apache-2.0
// One PASS/FAIL line per acceptance criterion. Exits 0 once everything has
// been evaluated; with --strict the exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/orlicz.hpp"
#include "oracles.hpp"
#include "property_suites.hpp"

using namespace orlicz;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EnergySetup homogeneous(double p, const DomainPtr& dom) {
  return EnergySetup::uniform(YoungFunction::power(p), YoungFunction::power(p), dom);
}

Verdict squares_reference() {
  const int n = 512;
  const auto t0 = std::chrono::steady_clock::now();
  const auto pair = minimize_on_level(homogeneous(2.0, GridDomain::interval(0.0, 1.0, n)), 1.0);
  const double secs = seconds_since(t0);
  const double want = oracle::tridiagonal_oracle(n).eigenvalues()[0];
  const double rel = std::abs(pair.lambda - want) / want;
  return {rel <= 1e-2 && secs <= 10.0,
          "lambda " + num(pair.lambda, 10) + " vs oracle " + num(want, 10) + ", rel " + num(rel, 3) + ", " +
              num(secs, 3) + " s"};
}

Verdict cubic_reference() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pair = minimize_on_level(homogeneous(3.0, GridDomain::interval(0.0, 1.0, 512)), 1.0);
  const double secs = seconds_since(t0);
  const double want = oracle::shooting_cubic_oracle();
  const double rel = std::abs(pair.lambda - want) / want;
  return {rel <= 2e-2 && secs <= 60.0,
          "lambda " + num(pair.lambda, 10) + " vs shooting " + num(want, 10) + ", rel " + num(rel, 3) + ", " +
              num(secs, 3) + " s"};
}

Verdict minimax_sequence() {
  const int n = 512;
  const auto ls = ls_sequence(homogeneous(2.0, GridDomain::interval(0.0, 1.0, n)), 1.0, 4);
  const auto eig = oracle::tridiagonal_oracle(n);
  bool pass = ls.size() == 4;
  double worst = 0.0;
  std::ostringstream os;
  for (std::size_t k = 0; k < ls.size(); ++k) {
    const double want = eig.eigenvalues()[static_cast<Eigen::Index>(k)];
    const double rel = std::abs(ls[k].pair.lambda - want) / want;
    worst = std::max(worst, rel);
    pass = pass && rel <= 2e-2;
    if (k > 0) pass = pass && ls[k].c_k_alpha < ls[k - 1].c_k_alpha;
    os << (k ? ", " : "lambda_k ") << num(ls[k].pair.lambda, 7);
  }
  os << "; c_k";
  for (std::size_t k = 0; k < ls.size(); ++k) os << ' ' << num(ls[k].c_k_alpha, 6);
  os << "; worst rel " << num(worst, 3);
  return {pass, os.str()};
}

Verdict conjugate_calculus() {
  double worst = 0.0, worst_inv = 0.0;
  const auto ss = log_grid(1e-2, 1e2, 401);
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const auto phi = YoungFunction::power(p);
    const double q = p / (p - 1.0);
    for (double s : ss) {
      const double want = std::pow(s, q) / q;
      worst = std::max(worst, std::abs(conjugate(phi, s) - want) / want);
    }
    const auto twice = double_conjugate(phi, ss.back());
    for (double t : ss) worst_inv = std::max(worst_inv, std::abs(twice(t) - phi(t)) / phi(t));
  }
  return {worst <= 1e-6 && worst_inv <= 1e-5,
          "max rel error " + num(worst, 3) + ", involution " + num(worst_inv, 3)};
}

Verdict doubling_lists() {
  int satisfied = 0, violated = 0;
  std::ostringstream os;
  bool pass = true;
  for (const auto& e : catalog()) {
    if (e.source != "doubling-list") continue;
    const auto row = classify(e);
    const bool expect = e.label != "exp-square";
    pass = pass && row.delta2 == expect;
    (row.delta2 ? satisfied : violated)++;
    os << e.label << '=' << (row.delta2 ? "ok" : "violated") << ' ';
  }
  pass = pass && satisfied == 4 && violated == 1;
  return {pass, os.str()};
}

Verdict inequality_suites() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto all = suites::all_inequalities(10000, 2024);
  const double secs = seconds_since(t0);
  long violations = 0;
  bool full = true;
  std::ostringstream os;
  for (const auto& o : all) {
    violations += o.violations;
    full = full && o.trials == 10000;
    if (o.violations) os << o.name << ": " << o.violations << " (worst " << num(o.worst, 3) << "); ";
  }
  os << all.size() << " suites x 10^4 trials, " << violations << " violations, " << num(secs, 3) << " s";
  return {violations == 0 && full && secs <= 60.0, os.str()};
}

Verdict gradient_checks() {
  const auto g1 = suites::gradient_check(GridDomain::interval(0.0, 1.0, 256), 20, 31);
  const auto g2 = suites::gradient_check(GridDomain::box(0.0, 1.0, 0.0, 1.0, 64), 20, 32);
  const double worst = std::max(g1.worst, g2.worst);
  return {worst <= 1e-5,
          std::to_string(g1.checks + g2.checks) + " derivative checks, worst rel gap " + num(worst, 3)};
}

Verdict luxemburg_equivalence() {
  const double gap = suites::luxemburg_lp_gap(50, 41);
  return {gap <= 1e-8, "worst rel gap " + num(gap, 3) + " over 100 functions per exponent"};
}

Verdict three_solution_region() {
  const auto dom = GridDomain::disc(0.0, 0.0, 1.0, 65);
  const auto s = EnergySetup::uniform(YoungFunction::power(3.0), YoungFunction::power(2.0), dom);
  RegionOptions o;
  o.samples = 1000;
  const auto grid = region_grid_search(s, {0.5, 1.0, 2.0, 4.0, 8.0}, {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}, o);
  if (!grid.chosen) return {false, "no admissible (d, r) pair on the grid"};
  const auto& r = grid.rows[*grid.chosen];
  const bool pass = r.sandwich_holds && r.w_tilde_r < r.gamma_d && r.nonempty && r.chain_violations == 0;
  std::ostringstream os;
  os << "(d, r) = (" << num(r.d) << ", " << num(r.r) << "): sandwich " << (r.sandwich_holds ? "holds" : "fails")
     << ", w~_r " << num(r.w_tilde_r, 4) << " < gamma_d " << num(r.gamma_d, 4) << ", interval (" << num(r.lambda_lo, 5)
     << ", " << num(r.lambda_hi, 5) << ") " << (r.nonempty ? "nonempty" : "EMPTY") << ", " << r.chain_violations
     << "/" << r.samples << " samples above r*w~_r";
  return {pass, os.str()};
}

Verdict homogeneity_sweep() {
  const auto alphas = log_grid(0.1, 10.0, 10);
  bool pass = true;
  std::ostringstream os;
  for (double p : {2.0, 3.0}) {
    const auto rows = spectrum_sweep(homogeneous(p, GridDomain::interval(0.0, 1.0, 256)), alphas);
    double lo = 1e300, hi = 0.0, res = 0.0;
    for (const auto& row : rows) {
      if (!row.pair) {
        pass = false;
        os << "p=" << p << " alpha " << num(row.alpha) << " failed: " << row.error << "; ";
        continue;
      }
      lo = std::min(lo, row.pair->lambda);
      hi = std::max(hi, row.pair->lambda);
      res = std::max(res, row.pair->residual);
    }
    const double spread = (hi - lo) / lo;
    pass = pass && spread <= 1e-3 && res <= 1e-6;
    os << "p=" << p << ": spread " << num(spread, 3) << ", max residual " << num(res, 3) << "; ";
  }
  return {pass, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict = strict || std::string(argv[i]) == "--strict";
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"squares reference eigenvalue", squares_reference},
      {"cubic reference eigenvalue", cubic_reference},
      {"minimax sequence", minimax_sequence},
      {"conjugate calculus", conjugate_calculus},
      {"doubling classification", doubling_lists},
      {"inequality suites", inequality_suites},
      {"gradient checks", gradient_checks},
      {"luxemburg vs p-norm", luxemburg_equivalence},
      {"three-solution region", three_solution_region},
      {"homogeneity sweep", homogeneity_sweep},
  };
  int failures = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s [%2d] %s: %s\n", v.pass ? "PASS" : "FAIL", index, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return strict ? failures : 0;
}
