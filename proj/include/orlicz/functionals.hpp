// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "orlicz/errors.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/young.hpp"
#include "orlicz/young_analysis.hpp"

namespace orlicz {

/// Linear functional on zero-trace grid functions, stored by its values on
/// the nodal hat basis: <F, v> = sum_k coef[k] v[k].
class DualGridFunction {
 public:
  DualGridFunction(DomainPtr dom, Eigen::VectorXd coef) : dom_(std::move(dom)), c_(std::move(coef)) {}

  [[nodiscard]] const DomainPtr& domain() const noexcept { return dom_; }
  [[nodiscard]] const Eigen::VectorXd& coefficients() const noexcept { return c_; }
  [[nodiscard]] double operator()(const GridFunction& v) const {
    require_same_domain(dom_, v.domain(), "dual pairing");
    return c_.dot(v.values());
  }
  [[nodiscard]] DualGridFunction operator-(const DualGridFunction& o) const { return {dom_, c_ - o.c_}; }
  [[nodiscard]] DualGridFunction operator*(double s) const { return {dom_, c_ * s}; }

 private:
  DomainPtr dom_;
  Eigen::VectorXd c_;
};

/// Everything the energies I(u) = int omega Phi(|grad u|) and
/// J(u) = int omega_1 Psi(|u|) need. Pinned nodes are held at zero in
/// addition to the domain's fixed nodes.
class EnergySetup {
 public:
  EnergySetup(YoungFunction phi, YoungFunction psi, WeightField w, WeightField w1)
      : phi_(std::move(phi)), psi_(std::move(psi)), w_(std::move(w)), w1_(std::move(w1)), dom_(w_.domain()) {
    require_same_domain(w_.domain(), w1_.domain(), "energy setup");
    const auto& els = dom_->elements();
    omega_el_.resize(els.size());
    for (std::size_t e = 0; e < els.size(); ++e) omega_el_[e] = w_.on_element(els[e]);
    const auto& q = dom_->quadrature_weights();
    mass_ = Eigen::VectorXd(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) mass_[k] = q[k] * w1_[static_cast<int>(k)];
    free_mask_.assign(static_cast<std::size_t>(dom_->size()), 0);
    for (int k : dom_->free_nodes()) free_mask_[static_cast<std::size_t>(k)] = 1;
    rebuild_free_list();
    psi_idx_ = growth_indices(psi_);
    phi_idx_ = growth_indices(phi_);
  }

  /// Uniform weights omega = omega_1 = c on dom.
  static EnergySetup uniform(YoungFunction phi, YoungFunction psi, const DomainPtr& dom, double c = 1.0) {
    return EnergySetup(std::move(phi), std::move(psi), WeightField::constant(dom, c), WeightField::constant(dom, c));
  }

  /// Copy with the listed nodes additionally held at zero.
  [[nodiscard]] EnergySetup with_pinned(const std::vector<int>& nodes) const {
    EnergySetup s = *this;
    for (int k : nodes) s.free_mask_.at(static_cast<std::size_t>(k)) = 0;
    s.rebuild_free_list();
    s.basis_norm_.reset();
    return s;
  }

  [[nodiscard]] const YoungFunction& phi() const noexcept { return phi_; }
  [[nodiscard]] const YoungFunction& psi() const noexcept { return psi_; }
  [[nodiscard]] const WeightField& w() const noexcept { return w_; }
  [[nodiscard]] const WeightField& w1() const noexcept { return w1_; }
  [[nodiscard]] const DomainPtr& domain() const noexcept { return dom_; }
  [[nodiscard]] const std::vector<double>& omega_on_elements() const noexcept { return omega_el_; }
  /// Nodal quadrature mass q_k * omega_1(x_k).
  [[nodiscard]] const Eigen::VectorXd& mass() const noexcept { return mass_; }
  [[nodiscard]] const std::vector<int>& free_nodes() const noexcept { return free_; }
  [[nodiscard]] bool is_free(int k) const noexcept { return free_mask_[static_cast<std::size_t>(k)] != 0; }
  [[nodiscard]] GrowthIndices phi_indices() const noexcept { return phi_idx_; }
  [[nodiscard]] GrowthIndices psi_indices() const noexcept { return psi_idx_; }

  /// Zeroes every non-free entry of a nodal vector.
  void restrict_to_free(Eigen::VectorXd& v) const {
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (!free_mask_[static_cast<std::size_t>(k)]) v[k] = 0.0;
  }

  [[nodiscard]] GridFunction function(Eigen::VectorXd v) const {
    restrict_to_free(v);
    return GridFunction(dom_, std::move(v));
  }

  /// ||e_k||_W = ||e_k||_{Psi,omega_1} + ||grad e_k||_{Phi,omega} for each node (0 on fixed nodes).
  [[nodiscard]] const Eigen::VectorXd& basis_norms() const {
    if (!basis_norm_) {
      auto out = std::make_shared<Eigen::VectorXd>(Eigen::VectorXd::Zero(dom_->size()));
      const auto& els = dom_->elements();
      const auto& inc = dom_->node_elements();
      for (int k : free_) {
        WeightedSamples node{{1.0}, {mass_[k]}};
        WeightedSamples grad;
        for (int e : inc[static_cast<std::size_t>(k)]) {
          const Element& el = els[static_cast<std::size_t>(e)];
          for (int v = 0; v < el.count; ++v)
            if (el.vertex[static_cast<std::size_t>(v)] == k) {
              const auto& g = el.grad_coef[static_cast<std::size_t>(v)];
              grad.value.push_back(std::hypot(g[0], g[1]));
              grad.mass.push_back(el.area * omega_el_[static_cast<std::size_t>(e)]);
            }
        }
        (*out)[k] = luxemburg_of(psi_, node) + luxemburg_of(phi_, grad);
      }
      basis_norm_ = std::move(out);
    }
    return *basis_norm_;
  }

 private:
  void rebuild_free_list() {
    free_.clear();
    for (int k = 0; k < dom_->size(); ++k)
      if (free_mask_[static_cast<std::size_t>(k)]) free_.push_back(k);
  }

  YoungFunction phi_, psi_;
  WeightField w_, w1_;
  DomainPtr dom_;
  std::vector<double> omega_el_;
  Eigen::VectorXd mass_;
  std::vector<char> free_mask_;
  std::vector<int> free_;
  GrowthIndices phi_idx_{}, psi_idx_{};
  mutable std::shared_ptr<const Eigen::VectorXd> basis_norm_;
};

namespace detail {

inline void check_setup(const EnergySetup& s, const GridFunction& u, const char* what) {
  require_same_domain(s.domain(), u.domain(), what);
}

}  // namespace detail

/// I(u) = int omega Phi(|grad u|).
[[nodiscard]] inline double energy_I(const EnergySetup& s, const GridFunction& u) {
  detail::check_setup(s, u, "energy_I");
  const auto& els = s.domain()->elements();
  const auto& om = s.omega_on_elements();
  double acc = 0.0;
  for (std::size_t e = 0; e < els.size(); ++e) {
    const double g = u.gradient_magnitude(els[e]);
    if (g != 0.0) acc += els[e].area * om[e] * s.phi().value(g);
  }
  return acc;
}

/// J(u) = int omega_1 Psi(|u|).
[[nodiscard]] inline double energy_J(const EnergySetup& s, const GridFunction& u) {
  detail::check_setup(s, u, "energy_J");
  const auto& m = s.mass();
  const auto& v = u.values();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (v[k] != 0.0 && m[k] != 0.0) acc += m[k] * s.psi().value(std::abs(v[k]));
  return acc;
}

/// v -> int omega phi(|grad u|)/|grad u| grad u . grad v; elements with zero gradient contribute 0.
[[nodiscard]] inline DualGridFunction gateaux_I(const EnergySetup& s, const GridFunction& u) {
  detail::check_setup(s, u, "gateaux_I");
  const auto& els = s.domain()->elements();
  const auto& om = s.omega_on_elements();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(s.domain()->size());
  for (std::size_t e = 0; e < els.size(); ++e) {
    const auto& el = els[e];
    const auto g = u.gradient(el);
    const double mag = std::hypot(g[0], g[1]);
    if (mag == 0.0) continue;
    const double k = el.area * om[e] * s.phi().derivative(mag) / mag;
    for (int v = 0; v < el.count; ++v) {
      const auto& c = el.grad_coef[static_cast<std::size_t>(v)];
      f[el.vertex[static_cast<std::size_t>(v)]] += k * (g[0] * c[0] + g[1] * c[1]);
    }
  }
  s.restrict_to_free(f);
  return {s.domain(), std::move(f)};
}

/// v -> int omega_1 psi(|u|) sign(u) v, with sign(0) = 0.
[[nodiscard]] inline DualGridFunction gateaux_J(const EnergySetup& s, const GridFunction& u) {
  detail::check_setup(s, u, "gateaux_J");
  const auto& m = s.mass();
  const auto& v = u.values();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (v[k] != 0.0) f[k] = m[k] * s.psi().derivative(std::abs(v[k])) * (v[k] > 0.0 ? 1.0 : -1.0);
  s.restrict_to_free(f);
  return {s.domain(), std::move(f)};
}

/// max_k |<F, e_k>| / ||e_k||_W over free nodes.
[[nodiscard]] inline double dual_norm(const EnergySetup& s, const DualGridFunction& F) {
  require_same_domain(s.domain(), F.domain(), "dual_norm");
  const auto& bn = s.basis_norms();
  double out = 0.0;
  for (int k : s.free_nodes()) out = std::max(out, std::abs(F.coefficients()[k]) / bn[k]);
  return out;
}

namespace detail {

/// Solves g(s) = target for s > 0 where g is increasing with g(0) = 0 and
/// slope(s) = g'(s); safeguarded Newton inside a bracket.
template <class G, class Slope>
double solve_scale(G&& g, Slope&& slope, double target, double lo, double hi) {
  while (g(lo) > target) lo *= 0.5;
  while (g(hi) < target) hi *= 2.0;
  double s = std::clamp(1.0, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double val = g(s);
    const double res = val - target;
    if (std::abs(res) <= 1e-14 * target) return s;
    if (res > 0.0) hi = s; else lo = s;
    const double d = slope(s);
    double next = d > 0.0 ? s - res / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * hi) return s;
    s = next;
  }
  return s;
}

}  // namespace detail

/// s > 0 with J(s u) = alpha.
[[nodiscard]] inline double level_scale(const EnergySetup& s, const GridFunction& u, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("project_to_level: alpha must be positive");
  if (u.is_zero()) throw DomainError("project_to_level: u vanishes, no multiple of it reaches the level");
  const double j = energy_J(s, u);
  if (!(j > 0.0)) throw DomainError("project_to_level: J(u) = 0 on the quadrature nodes");
  const auto idx = s.psi_indices();
  const double r = alpha / j;
  const double a = std::pow(r, 1.0 / idx.l), b = std::pow(r, 1.0 / idx.m);
  return detail::solve_scale([&](double t) { return energy_J(s, u.scaled(t)); },
                             [&](double t) { return gateaux_J(s, u.scaled(t))(u); }, alpha,
                             std::min(a, b), std::max(a, b));
}

/// s u with J(s u) = alpha.
[[nodiscard]] inline GridFunction project_to_level(const EnergySetup& s, const GridFunction& u, double alpha) {
  return u.scaled(level_scale(s, u, alpha));
}

/// s > 0 with I(s u) = r.
[[nodiscard]] inline double energy_scale(const EnergySetup& s, const GridFunction& u, double r) {
  if (!(r > 0.0)) throw DomainError("project_to_energy: r must be positive");
  const double i = energy_I(s, u);
  if (!(i > 0.0)) throw DomainError("project_to_energy: I(u) = 0");
  const auto idx = s.phi_indices();
  const double q = r / i;
  const double a = std::pow(q, 1.0 / idx.l), b = std::pow(q, 1.0 / idx.m);
  return detail::solve_scale([&](double t) { return energy_I(s, u.scaled(t)); },
                             [&](double t) { return gateaux_I(s, u.scaled(t))(u); }, r,
                             std::min(a, b), std::max(a, b));
}

/// s u with I(s u) = r.
[[nodiscard]] inline GridFunction project_to_energy(const EnergySetup& s, const GridFunction& u, double r) {
  return u.scaled(energy_scale(s, u, r));
}

/// ||u||_W = ||u||_{Psi,omega_1} + ||grad u||_{Phi,omega}.
[[nodiscard]] inline double w_norm(const EnergySetup& s, const GridFunction& u) {
  return sobolev_norm(s.phi(), s.psi(), s.w(), s.w1(), u);
}

}  // namespace orlicz
