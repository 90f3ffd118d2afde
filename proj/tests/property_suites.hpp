// SPDX-License-Identifier: Apache-2.0
#pragma once

// Randomized inequality suites. Each returns the number of trials and of
// violations beyond a relative slack, so the unit tests and the acceptance
// run count exactly the same thing.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "orlicz/conjugate.hpp"
#include "orlicz/functionals.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/young_analysis.hpp"

namespace orlicz::suites {

inline constexpr double kSlack = 1e-9;

struct Outcome {
  std::string name;
  long trials = 0;
  long violations = 0;
  double worst = 0.0;  ///< largest relative excess of lhs over rhs

  void record(double lhs, double rhs) {
    ++trials;
    const double excess = (lhs - rhs) / std::max(std::abs(rhs), 1e-300);
    worst = std::max(worst, excess);
    if (lhs > rhs + kSlack * std::abs(rhs)) ++violations;
  }
};

/// Doubling Young functions with their scanned indices.
struct Family {
  YoungFunction phi;
  double l, m;
};

inline std::vector<Family> doubling_family() {
  std::vector<Family> out;
  for (auto phi : {YoungFunction::power(1.5), YoungFunction::power(2.0), YoungFunction::power(3.0),
                   YoungFunction::power(5.0), YoungFunction::power_sum(2.0, 2.5), YoungFunction::plasticity(2.0, 1.0),
                   YoungFunction::plasticity(1.5, 1.0)}) {
    const auto idx = simonenko_indices(phi);
    out.push_back({phi, idx.l, idx.m});
  }
  return out;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> U(std::log(lo), std::log(hi));
  return std::exp(U(rng));
}

inline GridFunction random_values(const DomainPtr& dom, std::mt19937_64& rng, double scale, bool zero_trace) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  return GridFunction::sample(dom, [&](double, double) { return scale * U(rng); }, zero_trace);
}

inline WeightField random_weight(const DomainPtr& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 3.0);
  const double a = U(rng), b = U(rng);
  return WeightField::from_function(dom, [a, b](double x, double) { return 1.0 + a * x * x + b * (1.0 - x); });
}

/// s t <= Phi(t) + conj Phi(s).
inline Outcome young_inequality(long trials, std::uint64_t seed) {
  Outcome o{"young inequality"};
  const auto fam = doubling_family();
  std::mt19937_64 rng(seed);
  for (long i = 0; i < trials; ++i) {
    const auto& f = fam[static_cast<std::size_t>(i) % fam.size()];
    const double t = log_uniform(rng, 1e-2, 1e2), s = log_uniform(rng, 1e-2, 1e2);
    o.record(s * t, f.phi(t) + conjugate(f.phi, s));
  }
  return o;
}

/// int omega |u v| <= 2 ||u||_Phi ||v||_{conj Phi}.
inline Outcome weighted_holder(long trials, std::uint64_t seed) {
  Outcome o{"weighted holder"};
  const auto fam = doubling_family();
  const auto dom = GridDomain::interval(0.0, 1.0, 17);
  std::mt19937_64 rng(seed);
  for (long i = 0; i < trials; ++i) {
    const auto& f = fam[static_cast<std::size_t>(i) % fam.size()];
    const auto w = random_weight(dom, rng);
    const auto u = random_values(dom, rng, log_uniform(rng, 1e-2, 1e2), false);
    const auto v = random_values(dom, rng, log_uniform(rng, 1e-2, 1e2), false);
    const auto h = holder_check(f.phi, w, u, v);
    o.record(h.lhs, h.rhs);
  }
  return o;
}

/// Clarkson-type midpoint inequality for Phi with Phi(sqrt t) convex:
/// Phi(|a+b|/2) + Phi(|a-b|/2) <= (Phi(|a|) + Phi(|b|)) / 2.
inline Outcome midpoint_uniform_convexity(long trials, std::uint64_t seed) {
  Outcome o{"midpoint uniform convexity"};
  std::vector<YoungFunction> fam;
  for (const auto& f : doubling_family())
    if (sqrt_convex_sampled(f.phi)) fam.push_back(f.phi);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (long i = 0; i < trials; ++i) {
    const auto& phi = fam[static_cast<std::size_t>(i) % fam.size()];
    const double scale = log_uniform(rng, 1e-2, 1e2);
    const double a = scale * U(rng), b = scale * U(rng);
    o.record(phi(std::abs(a + b) / 2) + phi(std::abs(a - b) / 2), 0.5 * (phi(std::abs(a)) + phi(std::abs(b))));
  }
  return o;
}

/// conj Phi(phi(t)) <= m Phi(t).
inline Outcome conjugate_of_derivative(long trials, std::uint64_t seed) {
  Outcome o{"conjugate of derivative"};
  const auto fam = doubling_family();
  std::mt19937_64 rng(seed);
  for (long i = 0; i < trials; ++i) {
    const auto& f = fam[static_cast<std::size_t>(i) % fam.size()];
    const double t = log_uniform(rng, 1e-2, 10.0);
    o.record(conjugate(f.phi, f.phi.derivative(t)), f.m * f.phi(t));
  }
  return o;
}

/// min(a^l, a^m) Phi(b) <= Phi(a b) <= max(a^l, a^m) Phi(b); both sides count as one trial.
inline Outcome scaling_bracket(long trials, std::uint64_t seed) {
  Outcome o{"scaling bracket"};
  const auto fam = doubling_family();
  std::mt19937_64 rng(seed);
  for (long i = 0; i < trials; ++i) {
    const auto& f = fam[static_cast<std::size_t>(i) % fam.size()];
    const double a = log_uniform(rng, 1e-2, 1e2), b = log_uniform(rng, 1e-2, 1e2);
    const double pl = std::pow(a, f.l), pm = std::pow(a, f.m), v = f.phi(a * b), pb = f.phi(b);
    Outcome lower, upper;
    lower.record(std::min(pl, pm) * pb, v);
    upper.record(v, std::max(pl, pm) * pb);
    ++o.trials;
    if (lower.violations + upper.violations) ++o.violations;
    o.worst = std::max({o.worst, lower.worst, upper.worst});
  }
  return o;
}

/// min(||u||^l, ||u||^m) <= int omega Phi(|u|) <= max(||u||^l, ||u||^m).
inline Outcome modular_norm_sandwich(long trials, std::uint64_t seed) {
  Outcome o{"modular-norm sandwich"};
  const auto fam = doubling_family();
  const auto dom = GridDomain::interval(0.0, 1.0, 17);
  std::mt19937_64 rng(seed);
  for (long i = 0; i < trials; ++i) {
    const auto& f = fam[static_cast<std::size_t>(i) % fam.size()];
    const auto w = random_weight(dom, rng);
    const auto u = random_values(dom, rng, log_uniform(rng, 1e-2, 1e2), false);
    const double n = luxemburg_norm(f.phi, w, u), mod = modular(f.phi, w, u);
    Outcome lower, upper;
    lower.record(std::min(std::pow(n, f.l), std::pow(n, f.m)), mod);
    upper.record(mod, std::max(std::pow(n, f.l), std::pow(n, f.m)));
    ++o.trials;
    if (lower.violations + upper.violations) ++o.violations;
    o.worst = std::max({o.worst, lower.worst, upper.worst});
  }
  return o;
}

/// Phi(t) <= t phi(t) < Phi(2t) and conj Phi(phi(t)) <= t phi(t).
inline Outcome derivative_chain(long trials, std::uint64_t seed) {
  Outcome o{"derivative chain"};
  const auto fam = doubling_family();
  std::mt19937_64 rng(seed);
  for (long i = 0; i < trials; ++i) {
    const auto& f = fam[static_cast<std::size_t>(i) % fam.size()];
    const double t = log_uniform(rng, 1e-2, 10.0);
    const double tp = t * f.phi.derivative(t);
    Outcome a, b, c;
    a.record(f.phi(t), tp);
    b.record(tp, f.phi(2.0 * t));
    c.record(conjugate(f.phi, f.phi.derivative(t)), tp);
    ++o.trials;
    if (a.violations + b.violations + c.violations || !(tp < f.phi(2.0 * t))) ++o.violations;
    o.worst = std::max({o.worst, a.worst, b.worst, c.worst});
  }
  return o;
}

/// l J(u) <= <J'(u), u> <= m J(u) with the indices of Psi.
inline Outcome derivative_pairing(long trials, std::uint64_t seed) {
  Outcome o{"derivative pairing"};
  const auto fam = doubling_family();
  const auto dom = GridDomain::interval(0.0, 1.0, 17);
  std::mt19937_64 rng(seed);
  for (long i = 0; i < trials; ++i) {
    const auto& f = fam[static_cast<std::size_t>(i) % fam.size()];
    const EnergySetup s(YoungFunction::power(2.0), f.phi, random_weight(dom, rng), random_weight(dom, rng));
    const auto u = random_values(dom, rng, log_uniform(rng, 1e-2, 1e2), true);
    const double J = energy_J(s, u), pair = gateaux_J(s, u)(u);
    Outcome lower, upper;
    lower.record(f.l * J, pair);
    upper.record(pair, f.m * J);
    ++o.trials;
    if (lower.violations + upper.violations) ++o.violations;
    o.worst = std::max({o.worst, lower.worst, upper.worst});
  }
  return o;
}

inline std::vector<Outcome> all_inequalities(long trials, std::uint64_t seed) {
  return {young_inequality(trials, seed),       weighted_holder(trials, seed + 1),
          midpoint_uniform_convexity(trials, seed + 2), conjugate_of_derivative(trials, seed + 3),
          scaling_bracket(trials, seed + 4),    modular_norm_sandwich(trials, seed + 5),
          derivative_chain(trials, seed + 6),   derivative_pairing(trials, seed + 7)};
}

/// Largest relative gap between the Gateaux derivatives of I and J and central
/// differences, over every (Phi, Psi) pair from the power 2, 3, 4 and
/// plasticity(2, 1) set and `functions` random zero-trace directions.
struct GradientCheck {
  double worst = 0.0;
  long checks = 0;
};

inline double central_difference(const EnergySetup& s, bool use_I, const GridFunction& u, const GridFunction& v) {
  const double eps = 1e-5 * (1.0 + u.sup_norm());
  const GridFunction up(u.domain(), u.values() + eps * v.values());
  const GridFunction dn(u.domain(), u.values() - eps * v.values());
  const auto E = [&](const GridFunction& f) { return use_I ? energy_I(s, f) : energy_J(s, f); };
  return (E(up) - E(dn)) / (2.0 * eps);
}

inline GradientCheck gradient_check(const DomainPtr& dom, int functions, std::uint64_t seed) {
  const std::vector<YoungFunction> kinds{YoungFunction::power(2.0), YoungFunction::power(3.0),
                                         YoungFunction::power(4.0), YoungFunction::plasticity(2.0, 1.0)};
  const auto w = WeightField::from_function(dom, [](double x, double y) { return 1.0 + x + 0.5 * y; });
  std::mt19937_64 rng(seed);
  GradientCheck out;
  for (const auto& phi : kinds)
    for (const auto& psi : kinds) {
      const EnergySetup s(phi, psi, w, w);
      for (int t = 0; t < functions; ++t) {
        const auto u = random_values(dom, rng, 1.0, true), v = random_values(dom, rng, 1.0, true);
        const double dI = gateaux_I(s, u)(v), dJ = gateaux_J(s, u)(v);
        out.worst = std::max(out.worst, std::abs(central_difference(s, true, u, v) - dI) / std::abs(dI));
        out.worst = std::max(out.worst, std::abs(central_difference(s, false, u, v) - dJ) / std::abs(dJ));
        out.checks += 2;
      }
    }
  return out;
}

/// Trapezoid p-norm computed without any Orlicz machinery.
inline double trapezoid_lp(const GridFunction& u, const WeightField& w, double p) {
  const auto& q = u.domain()->quadrature_weights();
  double s = 0.0;
  for (int k = 0; k < q.size(); ++k) s += q[k] * w[k] * std::pow(std::abs(u[k]), p);
  return std::pow(s, 1.0 / p);
}

/// Largest relative gap between the Luxemburg norm of t^p and the p-norm.
inline double luxemburg_lp_gap(int functions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (const auto& dom : {GridDomain::interval(0.0, 1.0, 256), GridDomain::box(0.0, 1.0, 0.0, 1.0, 33)}) {
    for (double p : {2.0, 3.0}) {
      const auto phi = YoungFunction::power(p, 1.0);
      for (int t = 0; t < functions; ++t) {
        const auto w = dom->dim() == 1 ? random_weight(dom, rng) : WeightField::constant(dom, 1.0);
        const auto u = random_values(dom, rng, log_uniform(rng, 1e-2, 1e2), false);
        const double want = trapezoid_lp(u, w, p);
        worst = std::max(worst, std::abs(luxemburg_norm(phi, w, u) - want) / want);
      }
    }
  }
  return worst;
}

}  // namespace orlicz::suites
