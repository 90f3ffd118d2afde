// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "orlicz/errors.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct ConjugateOptions {
  double s_min = 1e-6;
  double s_max = 1e6;
  std::size_t points = 4096;
};

/// Complementary function on a log-spaced table. Node values come from the
/// integral of phi^{-1}; between nodes a cubic Hermite interpolant uses the
/// exact slopes phi^{-1}(s_k). Below s_min the sup formula is evaluated
/// directly; above s_max evaluation is refused.
class ConjugateTable {
 public:
  ConjugateTable(YoungFunction base, ConjugateOptions opts) : base_(std::move(base)), opts_(opts) {
    if (!(opts.s_min > 0.0) || !(opts.s_max > opts.s_min) || opts.points < 16)
      throw DomainError("conjugate table: need 0 < s_min < s_max and at least 16 points");
    const std::size_t n = opts.points;
    s_.resize(n);
    t_.resize(n);
    v_.resize(n);
    const double lmin = std::log(opts.s_min);
    const double step = (std::log(opts.s_max) - lmin) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      s_[k] = std::exp(lmin + step * static_cast<double>(k));
      t_[k] = base_.inverse_derivative(s_[k]);
    }
    s_[n - 1] = opts.s_max;
    t_[n - 1] = base_.inverse_derivative(opts.s_max);
    v_[0] = sup_formula_at(s_[0], t_[0]);
    using Rule = boost::math::quadrature::gauss<double, 8>;
    auto inv = [this](double s) { return base_.inverse_derivative(s); };
    for (std::size_t k = 0; k + 1 < n; ++k) v_[k + 1] = v_[k] + Rule::integrate(inv, s_[k], s_[k + 1]);
    for (std::size_t k = 0; k < n; ++k) {
      const double ref = sup_formula_at(s_[k], t_[k]);
      cross_check_ = std::max(cross_check_, std::abs(v_[k] - ref) / (1.0 + std::abs(ref)));
    }
  }

  [[nodiscard]] double operator()(double s) const {
    if (!(s > 0.0)) return 0.0;
    if (s < s_.front()) return sup_formula(s);
    if (s > s_.back()) {
      throw RangeError("conjugate: s=" + models::fmt_num(s) + " beyond tabulated horizon " +
                       models::fmt_num(s_.back()) + "; rebuild with a larger s_max");
    }
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t k = static_cast<std::size_t>(it - s_.begin());
    if (k == s_.size()) return v_.back();
    k -= 1;
    const double h = s_[k + 1] - s_[k];
    const double x = (s - s_[k]) / h;
    const double h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
    const double h10 = x * (1.0 - x) * (1.0 - x);
    const double h01 = x * x * (3.0 - 2.0 * x);
    const double h11 = x * x * (x - 1.0);
    return h00 * v_[k] + h10 * h * t_[k] + h01 * v_[k + 1] + h11 * h * t_[k + 1];
  }

  /// max_t (s t - Phi(t)) evaluated at the maximizer phi^{-1}(s).
  [[nodiscard]] double sup_formula(double s) const {
    if (!(s > 0.0)) return 0.0;
    return sup_formula_at(s, base_.inverse_derivative(s));
  }

  /// Largest relative disagreement between quadrature and sup formula over the nodes.
  [[nodiscard]] double cross_check_error() const noexcept { return cross_check_; }
  [[nodiscard]] double horizon() const noexcept { return s_.back(); }
  [[nodiscard]] const YoungFunction& base() const noexcept { return base_; }
  [[nodiscard]] const ConjugateOptions& options() const noexcept { return opts_; }

 private:
  [[nodiscard]] double sup_formula_at(double s, double t) const { return std::max(0.0, s * t - base_.value(t)); }

  YoungFunction base_;
  ConjugateOptions opts_;
  std::vector<double> s_, t_, v_;
  double cross_check_ = 0.0;
};

namespace models {

class Conjugate final : public YoungModel {
 public:
  explicit Conjugate(std::shared_ptr<const ConjugateTable> table, std::shared_ptr<const YoungModel> owner = nullptr)
      : YoungModel(YoungKind::conjugate, {}), table_(std::move(table)), owner_(std::move(owner)) {}
  double value(double s) const override { return (*table_)(s); }
  double derivative(double s) const override { return table_->base().inverse_derivative(s); }
  double inverse_derivative(double t) const override { return table_->base().derivative(t); }
  std::optional<GrowthIndices> closed_form_indices() const override {
    auto b = table_->base().closed_form_indices();
    if (!b || !(b->l > 1.0)) return std::nullopt;
    return GrowthIndices{b->m / (b->m - 1.0), b->l / (b->l - 1.0)};
  }
  std::string describe() const override { return "conj[" + table_->base().name() + "]"; }
  [[nodiscard]] const ConjugateTable& table() const noexcept { return *table_; }

 private:
  std::shared_ptr<const ConjugateTable> table_;
  std::shared_ptr<const YoungModel> owner_;  // keeps a non-owning table base alive
};

}  // namespace models

/// Default-range table for phi, built once per Young function on first use.
[[nodiscard]] inline const ConjugateTable& conjugate_table(const YoungFunction& phi) {
  const YoungModel& m = phi.model();
  std::call_once(m.conjugate_once, [&] {
    // The cache lives inside the model, so the table must not own it.
    YoungFunction weak_base(std::shared_ptr<const YoungModel>(std::shared_ptr<const YoungModel>(), &m));
    m.conjugate_cache = std::make_shared<const ConjugateTable>(std::move(weak_base), ConjugateOptions{});
  });
  return *m.conjugate_cache;
}

/// Complementary function value max_{t>=0}(s t - Phi(t)).
[[nodiscard]] inline double conjugate(const YoungFunction& phi, double s) {
  require_nonneg_finite(s, "conjugate");
  if (s == 0.0) return 0.0;
  return conjugate_table(phi)(s);
}

/// The complementary function as a Young function in its own right.
[[nodiscard]] inline YoungFunction conjugate_function(const YoungFunction& phi, const ConjugateOptions& opts) {
  return YoungFunction(std::make_shared<models::Conjugate>(std::make_shared<const ConjugateTable>(phi, opts)));
}

[[nodiscard]] inline YoungFunction conjugate_function(const YoungFunction& phi) {
  (void)conjugate_table(phi);
  return YoungFunction(std::make_shared<models::Conjugate>(phi.model().conjugate_cache, phi.model_ptr()));
}

/// Complementary function of the complementary function, exact on (0, s_max]
/// up to table error. The inner table reaches phi(s_max).
[[nodiscard]] inline YoungFunction double_conjugate(const YoungFunction& phi, double s_max = 1e2) {
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw DomainError("double_conjugate: s_max must be positive");
  ConjugateOptions inner;
  inner.s_max = std::max(inner.s_max, 2.0 * phi.derivative(s_max));
  inner.points = 8192;
  ConjugateOptions outer;
  outer.s_max = std::max(outer.s_min * 10.0, s_max);
  return conjugate_function(conjugate_function(phi, inner), outer);
}

}  // namespace orlicz
