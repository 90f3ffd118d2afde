// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "orlicz/conjugate.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Weighted samples a modular is summed over: value |f_k| with mass c_k.
struct WeightedSamples {
  std::vector<double> value;
  std::vector<double> mass;
};

[[nodiscard]] inline double modular_of(const YoungFunction& phi, const WeightedSamples& s, double scale = 1.0) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.value.size(); ++k)
    if (s.mass[k] != 0.0 && s.value[k] != 0.0) acc += s.mass[k] * phi.value(s.value[k] / scale);
  return acc;
}

/// inf{xi > 0 : sum_k c_k Phi(|f_k| / xi) <= 1}. Brackets by doubling from
/// max|f| inside [1e-12, 1e12] * max|f|, then bisects geometrically.
[[nodiscard]] inline double luxemburg_of(const YoungFunction& phi, const WeightedSamples& s) {
  double top = 0.0;
  for (std::size_t k = 0; k < s.value.size(); ++k) {
    if (!std::isfinite(s.value[k])) throw DomainError("luxemburg norm: non-finite value");
    if (s.mass[k] != 0.0) top = std::max(top, s.value[k]);
  }
  if (top == 0.0) return 0.0;
  auto mod = [&](double xi) {
    const double v = modular_of(phi, s, xi);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  double lo = top, hi = top;
  if (mod(top) > 1.0) {
    while (mod(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12 * top) throw RangeError("luxemburg norm: no bracket below 1e12 * sup|u|");
    }
  } else {
    while (mod(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-12 * top) throw RangeError("luxemburg norm: no bracket above 1e-12 * sup|u|");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (mod(mid) > 1.0) lo = mid; else hi = mid;
  }
  return hi;
}

namespace detail {

inline void check_pair(const WeightField& w, const GridFunction& u, const char* what) {
  require_same_domain(w.domain(), u.domain(), what);
}

inline WeightedSamples nodal_samples(const WeightField& w, const GridFunction& u) {
  const auto& q = u.domain()->quadrature_weights();
  WeightedSamples s;
  s.value.resize(static_cast<std::size_t>(q.size()));
  s.mass.resize(static_cast<std::size_t>(q.size()));
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    s.value[static_cast<std::size_t>(k)] = std::abs(u[static_cast<int>(k)]);
    s.mass[static_cast<std::size_t>(k)] = q[k] * w[static_cast<int>(k)];
  }
  return s;
}

inline WeightedSamples gradient_samples(const WeightField& w, const GridFunction& u) {
  const auto& els = u.domain()->elements();
  WeightedSamples s;
  s.value.reserve(els.size());
  s.mass.reserve(els.size());
  for (const auto& e : els) {
    s.value.push_back(u.gradient_magnitude(e));
    s.mass.push_back(e.area * w.on_element(e));
  }
  return s;
}

}  // namespace detail

/// Trapezoid approximation of int omega Phi(|u|).
[[nodiscard]] inline double modular(const YoungFunction& phi, const WeightField& w, const GridFunction& u) {
  detail::check_pair(w, u, "modular");
  return modular_of(phi, detail::nodal_samples(w, u));
}

/// Weighted Luxemburg norm of u.
[[nodiscard]] inline double luxemburg_norm(const YoungFunction& phi, const WeightField& w, const GridFunction& u) {
  detail::check_pair(w, u, "luxemburg_norm");
  return luxemburg_of(phi, detail::nodal_samples(w, u));
}

/// int omega Phi(|grad u|) over the stencil elements.
[[nodiscard]] inline double gradient_modular(const YoungFunction& phi, const WeightField& w, const GridFunction& u) {
  detail::check_pair(w, u, "gradient_modular");
  return modular_of(phi, detail::gradient_samples(w, u));
}

/// Luxemburg norm of |grad u|.
[[nodiscard]] inline double gradient_norm(const YoungFunction& phi, const WeightField& w, const GridFunction& u) {
  detail::check_pair(w, u, "gradient_norm");
  return luxemburg_of(phi, detail::gradient_samples(w, u));
}

/// ||u||_{Psi, omega_1} + ||grad u||_{Phi, omega}.
[[nodiscard]] inline double sobolev_norm(const YoungFunction& phi, const YoungFunction& psi, const WeightField& w,
                                         const WeightField& w1, const GridFunction& u) {
  return luxemburg_norm(psi, w1, u) + gradient_norm(phi, w, u);
}

struct HolderSides {
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] bool holds(double slack = 1e-9) const { return lhs <= rhs + slack; }
};

/// lhs = int omega |u v|, rhs = 2 ||u||_{Phi,omega} ||v||_{conj Phi,omega}.
[[nodiscard]] inline HolderSides holder_check(const YoungFunction& phi, const WeightField& w, const GridFunction& u,
                                              const GridFunction& v) {
  detail::check_pair(w, u, "holder_check");
  detail::check_pair(w, v, "holder_check");
  const auto& q = u.domain()->quadrature_weights();
  HolderSides out;
  for (Eigen::Index k = 0; k < q.size(); ++k)
    out.lhs += q[k] * w[static_cast<int>(k)] * std::abs(u[static_cast<int>(k)] * v[static_cast<int>(k)]);
  if (u.is_zero() || v.is_zero()) return out;
  out.rhs = 2.0 * luxemburg_norm(phi, w, u) * luxemburg_norm(conjugate_function(phi), w, v);
  return out;
}

/// Smooth zero-trace candidate: a random combination of low modes
/// (sines on interval/box, radial-angular bumps on the disc).
[[nodiscard]] inline GridFunction random_smooth(const DomainPtr& dom, std::mt19937_64& rng, int modes = 4) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto lo = dom->lower(), hi = dom->upper();
  const double pi = std::numbers::pi;
  if (dom->shape() == Shape::disc) {
    const double R = dom->inradius();
    const auto c = dom->center();
    std::vector<double> a(static_cast<std::size_t>(2 * modes + 1));
    for (auto& x : a) x = gauss(rng);
    return GridFunction::sample(dom, [&](double x, double y) {
      const double r = std::hypot(x - c[0], y - c[1]) / R;
      const double th = std::atan2(y - c[1], x - c[0]);
      double s = a[0];
      for (int m = 1; m <= modes; ++m)
        s += r * (a[static_cast<std::size_t>(2 * m - 1)] * std::cos(m * th) +
                  a[static_cast<std::size_t>(2 * m)] * std::sin(m * th)) / m;
      return (1.0 - r * r) * s;
    });
  }
  std::vector<double> a(static_cast<std::size_t>(modes * modes));
  for (auto& x : a) x = gauss(rng);
  return GridFunction::sample(dom, [&](double x, double y) {
    const double sx = (x - lo[0]) / (hi[0] - lo[0]);
    const double sy = dom->dim() == 2 ? (y - lo[1]) / (hi[1] - lo[1]) : 0.5;
    double s = 0.0;
    for (int i = 1; i <= modes; ++i)
      for (int j = 1; j <= (dom->dim() == 2 ? modes : 1); ++j) {
        const double amp = a[static_cast<std::size_t>((i - 1) * modes + (j - 1))] / (i * j);
        s += amp * std::sin(i * pi * sx) * (dom->dim() == 2 ? std::sin(j * pi * sy) : 1.0);
      }
    return s;
  });
}

/// Lowest smooth mode of the domain (sine product, or 1 - r^2 on the disc).
[[nodiscard]] inline GridFunction principal_bump(const DomainPtr& dom) {
  const auto lo = dom->lower(), hi = dom->upper();
  if (dom->shape() == Shape::disc) {
    const auto c = dom->center();
    const double R = dom->inradius();
    return GridFunction::sample(dom, [&](double x, double y) {
      const double r = std::hypot(x - c[0], y - c[1]) / R;
      return std::cos(0.5 * std::numbers::pi * std::min(r, 1.0));
    });
  }
  return GridFunction::sample(dom, [&](double x, double y) {
    double s = std::sin(std::numbers::pi * (x - lo[0]) / (hi[0] - lo[0]));
    if (dom->dim() == 2) s *= std::sin(std::numbers::pi * (y - lo[1]) / (hi[1] - lo[1]));
    return s;
  });
}

struct PoincareEstimate {
  double constant = 0.0;  ///< max sampled ||u||_{Psi,omega_1} / ||grad u||_{Phi,omega}
  int best_trial = -1;    ///< -1: the principal bump, -2-i: extra candidate i
  int trials = 0;
};

/// Empirical lower bound for the Poincare constant over random smooth
/// zero-trace candidates, the principal bump and any extra candidates.
[[nodiscard]] inline PoincareEstimate poincare_estimate(const YoungFunction& phi, const YoungFunction& psi,
                                                        const WeightField& w, const WeightField& w1,
                                                        const DomainPtr& dom, int trials, std::uint64_t seed = 42,
                                                        const std::vector<GridFunction>& extra = {}) {
  if (trials < 1) throw DomainError("poincare_estimate: trials must be >= 1");
  require_same_domain(w.domain(), dom, "poincare_estimate");
  require_same_domain(w1.domain(), dom, "poincare_estimate");
  PoincareEstimate out;
  out.trials = trials;
  auto consider = [&](const GridFunction& u, int tag) {
    if (u.is_zero()) return;
    const double g = gradient_norm(phi, w, u);
    if (!(g > 0.0)) return;
    const double ratio = luxemburg_norm(psi, w1, u) / g;
    if (ratio > out.constant) {
      out.constant = ratio;
      out.best_trial = tag;
    }
  };
  consider(principal_bump(dom), -1);
  for (std::size_t i = 0; i < extra.size(); ++i) consider(extra[i], -2 - static_cast<int>(i));
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) consider(random_smooth(dom, rng), t);
  return out;
}

}  // namespace orlicz
