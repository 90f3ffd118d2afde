// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "orlicz/errors.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// n points spaced evenly in log between lo and hi (inclusive).
[[nodiscard]] inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = n == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  if (n > 1) out.back() = hi;
  return out;
}

struct IndexScan {
  double l = 0.0;          ///< reported lower index
  double m = 0.0;          ///< reported upper index
  double scanned_l = 0.0;  ///< min of t phi / Phi over the sample
  double scanned_m = 0.0;  ///< max of t phi / Phi over the sample
  bool closed_form = false;

  [[nodiscard]] GrowthIndices indices() const { return {l, m}; }
};

/// inf/sup of t phi(t)/Phi(t) over a log-spaced scan of [t_lo, t_hi].
/// Catalog kinds with known bounds report those; the scan is always returned too.
[[nodiscard]] inline IndexScan simonenko_indices(const YoungFunction& phi, double t_lo = 1e-6, double t_hi = 1e6,
                                                 std::size_t n_samples = 2000) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw DomainError("simonenko_indices: need 0 < t_lo < t_hi");
  if (n_samples < 100) throw DomainError("simonenko_indices: need at least 100 samples");
  IndexScan out;
  out.scanned_l = std::numeric_limits<double>::infinity();
  out.scanned_m = -std::numeric_limits<double>::infinity();
  for (double t : log_grid(t_lo, t_hi, n_samples)) {
    const double r = phi.growth_ratio(t);
    out.scanned_l = std::min(out.scanned_l, r);
    out.scanned_m = std::max(out.scanned_m, r);
  }
  if (auto known = phi.closed_form_indices()) {
    out.l = known->l;
    out.m = known->m;
    out.closed_form = true;
  } else {
    out.l = out.scanned_l;
    out.m = out.scanned_m;
  }
  return out;
}

/// Indices used by downstream computations: closed form if known, else the default scan.
[[nodiscard]] inline GrowthIndices growth_indices(const YoungFunction& phi) {
  if (auto known = phi.closed_form_indices()) return *known;
  return simonenko_indices(phi).indices();
}

struct Delta2Options {
  double t_lo = 1e-6;
  std::size_t points = 2000;
  double cap = 1e3;  ///< ratio level a growing scan must exceed to count as a violation
};

struct Delta2Result {
  bool satisfied = true;
  double m_bound = 0.0;          ///< largest observed ratio (meaningful when satisfied)
  double witness_t = 0.0;        ///< where the growing ratio was caught (when violated)
  double witness_ratio = 0.0;
};

/// Doubling-condition classification from the growth ratio on a log grid up to `horizon`.
/// Violation needs monotone growth across the final decade and a ratio above `cap`.
[[nodiscard]] inline Delta2Result check_delta2(const YoungFunction& phi, double horizon = 1e6,
                                               const Delta2Options& opts = {}) {
  if (!(horizon >= 1e3)) throw DomainError("check_delta2: horizon must be >= 1e3");
  const auto ts = log_grid(opts.t_lo, horizon, opts.points);
  std::vector<double> ratio(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) ratio[k] = phi.growth_ratio(ts[k]);

  Delta2Result out;
  out.m_bound = *std::max_element(ratio.begin(), ratio.end());
  const double decade_start = horizon / 10.0;
  std::size_t first = 0;
  while (first < ts.size() && ts[first] < decade_start) ++first;
  bool increasing = ratio.back() > ratio[first];
  for (std::size_t k = first + 1; k < ts.size() && increasing; ++k)
    if (ratio[k] < ratio[k - 1]) increasing = false;
  const bool above_cap = ratio.back() > opts.cap || !std::isfinite(ratio.back());
  if (increasing && above_cap) {
    out.satisfied = false;
    std::size_t k = first;
    while (k + 1 < ts.size() && !(ratio[k] > opts.cap)) ++k;
    out.witness_t = ts[k];
    out.witness_ratio = ratio[k];
  }
  return out;
}

struct DominationOptions {
  std::size_t points_per_decade = 50;
  double abs_tol = 1e-6;    ///< ratio at the horizon this small counts as vanished
  double decay_tol = 0.5;   ///< or: ratio dropped by at least this factor over the last decade
};

/// Empirical test of Psi(c t)/Phi(t) -> 0 as t -> infinity for every sampled c.
[[nodiscard]] inline bool dominates_essentially(const YoungFunction& psi, const YoungFunction& phi,
                                                const std::vector<double>& c_samples, double horizon = 1e6,
                                                const DominationOptions& opts = {}) {
  if (c_samples.empty()) throw DomainError("dominates_essentially: empty c sample");
  if (!(horizon >= 1e3)) throw DomainError("dominates_essentially: horizon must be >= 1e3");
  const auto ts = log_grid(horizon / 10.0, horizon, opts.points_per_decade + 1);
  for (double c : c_samples) {
    if (!(c > 0.0)) throw DomainError("dominates_essentially: c samples must be positive");
    std::vector<double> ratio(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double num = psi.value(c * ts[k]);
      const double den = phi.value(ts[k]);
      if (!std::isfinite(num)) return false;
      ratio[k] = std::isfinite(den) ? num / den : 0.0;
    }
    for (std::size_t k = 1; k < ratio.size(); ++k)
      if (ratio[k] > ratio[k - 1] * (1.0 + 1e-12)) return false;
    const bool vanished = ratio.back() <= opts.abs_tol;
    const bool decaying = ratio.back() <= opts.decay_tol * ratio.front();
    if (!vanished && !decaying) return false;
  }
  return true;
}

/// Sampled midpoint convexity of Phi on a log grid.
[[nodiscard]] inline bool is_convex_sampled(const YoungFunction& phi, double t_lo = 1e-4, double t_hi = 1e4,
                                            std::size_t n = 400) {
  const auto ts = log_grid(t_lo, t_hi, n);
  for (std::size_t i = 0; i < n; i += 7)
    for (std::size_t j = i + 1; j < n; j += 11) {
      const double s = ts[i], t = ts[j];
      const double mid = phi.value(0.5 * (s + t));
      const double avg = 0.5 * (phi.value(s) + phi.value(t));
      if (std::isfinite(avg) && mid > avg * (1.0 + 1e-12)) return false;
    }
  return true;
}

/// Sampled convexity of t -> Phi(sqrt t), checked through nondecreasing phi(s)/s.
[[nodiscard]] inline bool sqrt_convex_sampled(const YoungFunction& phi, double t_lo = 1e-4, double t_hi = 1e4,
                                              std::size_t n = 400) {
  double prev = 0.0;
  for (double s : log_grid(t_lo, t_hi, n)) {
    const double q = phi.derivative(s) / s;
    if (!std::isfinite(q)) break;
    if (q < prev * (1.0 - 1e-9)) return false;
    prev = q;
  }
  return true;
}

/// Orlicz-Sobolev conjugate Phi_N = Phi o H^{-1}, with
/// H(t) = (int_0^t (s/Phi(s))^{1/(N-1)} ds)^{(N-1)/N} tabulated by quadrature.
class SobolevConjugate {
 public:
  struct Options {
    double t_lo = 1e-6;
    double t_hi = 1e6;
    std::size_t points = 2000;
    double decay_threshold = 0.7;  ///< decade-increment ratio separating convergence from divergence
  };

  SobolevConjugate(YoungFunction phi, int dim) : SobolevConjugate(std::move(phi), dim, Options{}) {}

  SobolevConjugate(YoungFunction phi, int dim, const Options& opts) : phi_(std::move(phi)), dim_(dim) {
    if (dim < 2) throw DomainError("sobolev_conjugate: dimension must be >= 2");
    const double expo = 1.0 / (dim - 1);
    auto f = [this, expo](double s) {
      const double v = phi_.value(s);
      if (!std::isfinite(v)) return 0.0;
      return std::pow(s / v, expo);
    };
    using Rule = boost::math::quadrature::gauss<double, 30>;
    auto decade = [&](double a) {
      double sum = 0.0;
      // log-variable panels keep the quadrature accurate for power-like integrands
      for (int k = 0; k < 4; ++k) {
        const double lo = a * std::pow(10.0, 0.25 * k), hi = a * std::pow(10.0, 0.25 * (k + 1));
        sum += Rule::integrate([&](double y) { const double s = std::exp(y); return f(s) * s; }, std::log(lo),
                               std::log(hi));
      }
      return sum;
    };

    // integrability at 0: decade increments must shrink geometrically
    std::vector<double> near;
    for (int j = 0; j < 14; ++j) near.push_back(decade(std::pow(10.0, -j - 1)));
    for (std::size_t j = near.size() - 4; j + 1 < near.size(); ++j) {
      if (!(near[j + 1] <= opts.decay_threshold * near[j])) {
        throw ConditionFailure("integrability at zero",
                               "int_0 (t/Phi(t))^{1/(N-1)} dt does not converge for " + phi_.name() +
                                   ", N=" + std::to_string(dim));
      }
    }
    // divergence at infinity: increments over [10^j, 10^{j+1}], j = 3..8, must not decay
    std::vector<double> far;
    for (int j = 3; j <= 8; ++j) far.push_back(decade(std::pow(10.0, j)));
    for (std::size_t j = 0; j + 1 < far.size(); ++j) {
      if (!(far[j + 1] > opts.decay_threshold * far[j])) {
        throw ConditionFailure("divergence at infinity",
                               "int^inf (t/Phi(t))^{1/(N-1)} dt appears finite for " + phi_.name() +
                                   ", N=" + std::to_string(dim));
      }
    }

    t_ = log_grid(opts.t_lo, opts.t_hi, opts.points);
    h_.resize(t_.size());
    // head below t_lo from a local power-law fit
    const double f0 = f(t_[0]);
    const double f1 = f(t_[0] * 1.01);
    const double a = std::log(f1 / f0) / std::log(1.01);
    double acc = t_[0] * f0 / (a + 1.0);
    using Small = boost::math::quadrature::gauss<double, 10>;
    cumulative_.assign(t_.size(), 0.0);
    cumulative_[0] = acc;
    for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
      acc += Small::integrate(f, t_[k], t_[k + 1]);
      cumulative_[k + 1] = acc;
    }
    const double outer = static_cast<double>(dim - 1) / dim;
    for (std::size_t k = 0; k < t_.size(); ++k) h_[k] = std::pow(cumulative_[k], outer);
    for (std::size_t k = 1; k < h_.size(); ++k)
      if (!(h_[k] > h_[k - 1])) throw ConditionFailure("monotonicity", "tabulated H is not strictly increasing");
  }

  [[nodiscard]] int dimension() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<double>& abscissae() const noexcept { return t_; }
  [[nodiscard]] const std::vector<double>& h_values() const noexcept { return h_; }

  [[nodiscard]] double h(double t) const { return interp(t_, h_, t); }
  [[nodiscard]] double h_inverse(double s) const { return interp(h_, t_, s); }

  /// Phi_N(s) for s inside the tabulated range of H.
  [[nodiscard]] double operator()(double s) const {
    if (s <= 0.0) return 0.0;
    return phi_.value(h_inverse(s));
  }

  /// Least-squares slope of log Phi_N against log s over the top `decades` of the t-table.
  [[nodiscard]] double growth_exponent(double decades = 3.0) const {
    const double cut = t_.back() / std::pow(10.0, decades);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < t_.size(); ++k) {
      if (t_[k] < cut) continue;
      const double x = std::log(h_[k]);
      const double y = std::log(phi_.value(t_[k]));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }

  /// Sampled convexity of Phi_N over the tabulated range.
  [[nodiscard]] bool is_convex_sampled() const {
    const std::size_t stride = std::max<std::size_t>(1, t_.size() / 200);
    for (std::size_t k = stride; k + stride < t_.size(); k += stride) {
      const double a = h_[k - stride], b = h_[k + stride];
      const double mid = (*this)(0.5 * (a + b));
      const double avg = 0.5 * (phi_.value(t_[k - stride]) + phi_.value(t_[k + stride]));
      if (mid > avg * (1.0 + 1e-9)) return false;
    }
    return true;
  }

 private:
  // log-log linear interpolation on a strictly increasing table
  static double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x < xs.front() || x > xs.back())
      throw RangeError("sobolev conjugate: argument " + models::fmt_num(x) + " outside tabulated range");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (std::log(x) - std::log(xs[k])) / (std::log(xs[k + 1]) - std::log(xs[k]));
    return std::exp((1.0 - w) * std::log(ys[k]) + w * std::log(ys[k + 1]));
  }

  YoungFunction phi_;
  int dim_;
  std::vector<double> t_, h_, cumulative_;
};

[[nodiscard]] inline SobolevConjugate sobolev_conjugate(const YoungFunction& phi, int dim) {
  return SobolevConjugate(phi, dim);
}

}  // namespace orlicz
