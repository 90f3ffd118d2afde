// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "orlicz/errors.hpp"

namespace orlicz {

enum class YoungKind {
  power,       ///< coef * t^p, default coef = 1/p
  power_sum,   ///< t^p/p + t^q/q
  log_power,   ///< t^alpha * log(1+t)^beta ("plasticity")
  elasticity,  ///< (1+t^2)^gamma - 1
  newtonian,   ///< integral of s^(1-alpha) * asinh(s)^beta
  exp_square,  ///< (exp(t^2) - 1) / 2
  tabulated,   ///< piecewise data, phi piecewise linear
  custom,      ///< user supplied phi, Phi by quadrature
  conjugate,   ///< complementary function of another Young function
};

[[nodiscard]] inline const char* to_string(YoungKind k) {
  switch (k) {
    case YoungKind::power: return "power";
    case YoungKind::power_sum: return "power_sum";
    case YoungKind::log_power: return "plasticity";
    case YoungKind::elasticity: return "elasticity";
    case YoungKind::newtonian: return "newtonian";
    case YoungKind::exp_square: return "exp_square";
    case YoungKind::tabulated: return "tabulated";
    case YoungKind::custom: return "custom";
    case YoungKind::conjugate: return "conjugate";
  }
  return "unknown";
}

/// Bounds (l, m) of t*phi(t)/Phi(t).
struct GrowthIndices {
  double l = 0.0;
  double m = 0.0;
};

class ConjugateTable;

namespace detail {

/// Integral of f over [0, t] on geometric panels; the part below t*1e-12
/// uses a local power-law fit, so f may be singular (integrably) at 0.
template <class F>
double integrate_from_zero(F&& f, double t) {
  if (!(t > 0.0)) return 0.0;
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double head = t * 1e-12;
  double total = 0.0;
  const double f0 = f(head);
  if (f0 > 0.0 && std::isfinite(f0)) {
    const double f1 = f(2.0 * head);
    const double expo = std::log(f1 / f0) / std::log(2.0);
    if (expo > -1.0) total += head * f0 / (expo + 1.0);
  }
  double a = head;
  while (a < t) {
    const double b = std::min(t, a * 4.0);
    total += Rule::integrate(f, a, b);
    a = b;
  }
  return total;
}

}  // namespace detail

/// Shared implementation behind a YoungFunction handle. Immutable after
/// construction except for the lazily built conjugate table.
class YoungModel {
 public:
  YoungModel(YoungKind kind, std::vector<std::pair<std::string, double>> params)
      : kind_(kind), params_(std::move(params)) {}
  virtual ~YoungModel() = default;
  YoungModel(const YoungModel&) = delete;
  YoungModel& operator=(const YoungModel&) = delete;

  [[nodiscard]] virtual double value(double t) const = 0;
  [[nodiscard]] virtual double derivative(double t) const = 0;

  /// phi'(t) by a relative central difference; 0 at t = 0 means the one-sided limit phi(t)/t.
  [[nodiscard]] virtual double second_derivative(double t) const {
    if (!(t > 0.0)) {
      const double e = 1e-8;
      return derivative(e) / e;
    }
    const double e = 1e-5 * t;
    return (derivative(t + e) - derivative(t - e)) / (2.0 * e);
  }

  /// Generalized inverse inf{t >= 0 : phi(t) >= s}, by bisection.
  [[nodiscard]] virtual double inverse_derivative(double s) const {
    if (!(s > 0.0)) return 0.0;
    double hi = 1.0;
    double lo = 0.0;
    if (derivative(hi) < s) {
      while (derivative(hi) < s) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw RangeError("inverse of phi: value " + std::to_string(s) + " not reached");
      }
    } else {
      while (hi > 1e-300 && derivative(0.5 * hi) >= s) hi *= 0.5;
      lo = 0.5 * hi;
    }
    for (int it = 0; it < 2000 && hi - lo > 2.2e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (derivative(mid) >= s) hi = mid; else lo = mid;
    }
    return hi;
  }

  /// t*phi(t)/Phi(t); overridden where a cancellation-free form exists.
  [[nodiscard]] virtual double growth_ratio(double t) const {
    const double v = value(t);
    if (!(v > 0.0)) throw InvalidYoungFunction(describe() + ": Phi(" + std::to_string(t) + ") = 0");
    return t * derivative(t) / v;
  }

  [[nodiscard]] virtual std::optional<GrowthIndices> closed_form_indices() const { return std::nullopt; }
  [[nodiscard]] virtual std::string describe() const = 0;

  [[nodiscard]] YoungKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::vector<std::pair<std::string, double>>& params() const noexcept { return params_; }

  [[nodiscard]] double param(const std::string& name) const {
    for (const auto& [k, v] : params_)
      if (k == name) return v;
    throw std::out_of_range("no parameter " + name);
  }

  // Conjugate cache, see conjugate.hpp.
  mutable std::once_flag conjugate_once;
  mutable std::shared_ptr<const ConjugateTable> conjugate_cache;

 private:
  YoungKind kind_;
  std::vector<std::pair<std::string, double>> params_;
};

namespace models {

inline std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

class Power final : public YoungModel {
 public:
  Power(double p, double coef) : YoungModel(YoungKind::power, {{"p", p}, {"coef", coef}}), p_(p), c_(coef) {
    if (!(p > 1.0) || !std::isfinite(p)) throw InvalidYoungFunction("power: p must exceed 1");
    if (!(coef > 0.0)) throw InvalidYoungFunction("power: coef must be positive");
  }
  double value(double t) const override { return c_ * std::pow(t, p_); }
  double derivative(double t) const override { return t == 0.0 ? 0.0 : c_ * p_ * std::pow(t, p_ - 1.0); }
  double inverse_derivative(double s) const override {
    return s <= 0.0 ? 0.0 : std::pow(s / (c_ * p_), 1.0 / (p_ - 1.0));
  }
  double second_derivative(double t) const override {
    if (t == 0.0) return p_ == 2.0 ? 2.0 * c_ : (p_ > 2.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return c_ * p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
  }
  double growth_ratio(double) const override { return p_; }
  std::optional<GrowthIndices> closed_form_indices() const override { return GrowthIndices{p_, p_}; }
  std::string describe() const override {
    return std::abs(c_ * p_ - 1.0) < 1e-15 ? "t^" + fmt_num(p_) + "/" + fmt_num(p_)
                                          : fmt_num(c_) + "*t^" + fmt_num(p_);
  }

 private:
  double p_, c_;
};

class PowerSum final : public YoungModel {
 public:
  PowerSum(double p, double q) : YoungModel(YoungKind::power_sum, {{"p", p}, {"q", q}}), p_(p), q_(q) {
    if (!(p > 1.0) || !(q > 1.0)) throw InvalidYoungFunction("power_sum: p and q must exceed 1");
  }
  double value(double t) const override { return std::pow(t, p_) / p_ + std::pow(t, q_) / q_; }
  double derivative(double t) const override {
    return t == 0.0 ? 0.0 : std::pow(t, p_ - 1.0) + std::pow(t, q_ - 1.0);
  }
  double growth_ratio(double t) const override {
    const double x = std::pow(t, q_ - p_);
    if (!std::isfinite(x)) return q_;
    return (1.0 + x) / (1.0 / p_ + x / q_);
  }
  std::optional<GrowthIndices> closed_form_indices() const override {
    return GrowthIndices{std::min(p_, q_), std::max(p_, q_)};
  }
  std::string describe() const override {
    return "t^" + fmt_num(p_) + "/" + fmt_num(p_) + " + t^" + fmt_num(q_) + "/" + fmt_num(q_);
  }

 private:
  double p_, q_;
};

class LogPower final : public YoungModel {
 public:
  LogPower(double alpha, double beta)
      : YoungModel(YoungKind::log_power, {{"alpha", alpha}, {"beta", beta}}), a_(alpha), b_(beta) {
    if (!(alpha >= 1.0)) throw InvalidYoungFunction("plasticity: alpha must be >= 1");
    if (!(beta > 0.0)) throw InvalidYoungFunction("plasticity: beta must be positive");
  }
  double value(double t) const override { return std::pow(t, a_) * std::pow(std::log1p(t), b_); }
  double derivative(double t) const override {
    if (t == 0.0) return 0.0;
    const double L = std::log1p(t);
    return a_ * std::pow(t, a_ - 1.0) * std::pow(L, b_) + b_ * std::pow(t, a_) * std::pow(L, b_ - 1.0) / (1.0 + t);
  }
  double growth_ratio(double t) const override {
    // t/((1+t) log(1+t)) decreases from 1 to 0
    return a_ + b_ * t / ((1.0 + t) * std::log1p(t));
  }
  std::optional<GrowthIndices> closed_form_indices() const override { return GrowthIndices{a_, a_ + b_}; }
  std::string describe() const override {
    return "t^" + fmt_num(a_) + "*log(1+t)^" + fmt_num(b_);
  }

 private:
  double a_, b_;
};

class Elasticity final : public YoungModel {
 public:
  explicit Elasticity(double gamma) : YoungModel(YoungKind::elasticity, {{"gamma", gamma}}), g_(gamma) {
    if (!(gamma > 0.5)) throw InvalidYoungFunction("elasticity: gamma must exceed 1/2");
  }
  double value(double t) const override { return std::expm1(g_ * std::log1p(t * t)); }
  double derivative(double t) const override { return 2.0 * g_ * t * std::pow(1.0 + t * t, g_ - 1.0); }
  double growth_ratio(double t) const override {
    const double num = 2.0 * g_ * t * t * std::pow(1.0 + t * t, g_ - 1.0);
    const double den = std::expm1(g_ * std::log1p(t * t));
    if (!(den > 0.0)) return 2.0;
    return num / den;
  }
  std::optional<GrowthIndices> closed_form_indices() const override {
    return GrowthIndices{std::min(2.0, 2.0 * g_), std::max(2.0, 2.0 * g_)};
  }
  std::string describe() const override { return "(1+t^2)^" + fmt_num(g_) + "-1"; }

 private:
  double g_;
};

class Newtonian final : public YoungModel {
 public:
  Newtonian(double alpha, double beta)
      : YoungModel(YoungKind::newtonian, {{"alpha", alpha}, {"beta", beta}}), a_(alpha), b_(beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidYoungFunction("newtonian: alpha must lie in [0,1]");
    if (!(beta > 0.0)) throw InvalidYoungFunction("newtonian: beta must be positive");
  }
  double value(double t) const override {
    return detail::integrate_from_zero([this](double s) { return derivative(s); }, t);
  }
  double derivative(double t) const override {
    if (t == 0.0) return 0.0;
    return std::pow(t, 1.0 - a_) * std::pow(std::asinh(t), b_);
  }
  // t*asinh'(t)/asinh(t) decreases from 1 to 0, so the ratio sits in (2-alpha, 2-alpha+beta).
  std::optional<GrowthIndices> closed_form_indices() const override {
    return GrowthIndices{2.0 - a_, 2.0 - a_ + b_};
  }
  std::string describe() const override {
    return "int s^" + fmt_num(1.0 - a_) + "*asinh(s)^" + fmt_num(b_);
  }

 private:
  double a_, b_;
};

class ExpSquare final : public YoungModel {
 public:
  ExpSquare() : YoungModel(YoungKind::exp_square, {}) {}
  double value(double t) const override { return 0.5 * std::expm1(t * t); }
  double derivative(double t) const override { return t * std::exp(t * t); }
  double growth_ratio(double t) const override {
    const double x = t * t;
    if (x == 0.0) return 2.0;
    return 2.0 * x / -std::expm1(-x);
  }
  std::string describe() const override { return "(exp(t^2)-1)/2"; }
};

/// Data given as (t, Phi(t)); phi is the piecewise-linear interpolant of
/// averaged secant slopes and Phi its exact integral.
class Tabulated final : public YoungModel {
 public:
  Tabulated(std::vector<double> t, std::vector<double> v) : YoungModel(YoungKind::tabulated, {}) {
    if (t.size() != v.size() || t.size() < 2) throw InvalidYoungFunction("tabulated: need at least two (t, Phi) rows");
    if (t.front() > 0.0) {
      t.insert(t.begin(), 0.0);
      v.insert(v.begin(), 0.0);
    }
    if (t.front() < 0.0) throw InvalidYoungFunction("tabulated: negative abscissa");
    if (v.front() != 0.0) throw InvalidYoungFunction("tabulated: Phi(0) must be 0");
    const std::size_t n = t.size();
    std::vector<double> slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = t[i + 1] - t[i];
      if (!(h > 0.0)) throw InvalidYoungFunction("tabulated: abscissae must be strictly increasing");
      slope[i] = (v[i + 1] - v[i]) / h;
      if (!(slope[i] > 0.0)) throw InvalidYoungFunction("tabulated: phi vanishes on an interval (row " + std::to_string(i + 1) + ")");
      if (i > 0 && slope[i] < slope[i - 1] * (1.0 - 1e-12))
        throw InvalidYoungFunction("tabulated: data not convex near row " + std::to_string(i + 1));
    }
    t_ = std::move(t);
    phi_.assign(n, 0.0);
    // three-point derivative on the uneven grid: exact for quadratic data
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = t_[i] - t_[i - 1], hr = t_[i + 1] - t_[i];
      phi_[i] = (hr * slope[i - 1] + hl * slope[i]) / (hl + hr);
    }
    phi_[n - 1] = 2.0 * slope[n - 2] - phi_[n - 2];
    cum_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) cum_[i + 1] = cum_[i] + 0.5 * (phi_[i] + phi_[i + 1]) * (t_[i + 1] - t_[i]);
    tail_slope_ = (phi_[n - 1] - phi_[n - 2]) / (t_[n - 1] - t_[n - 2]);
    if (!(tail_slope_ > 0.0)) tail_slope_ = phi_[n - 1] / t_[n - 1];
  }
  double value(double t) const override {
    const auto [i, tau] = locate(t);
    const double dphi = slope_of(i);
    return cum_[i] + phi_[i] * tau + 0.5 * dphi * tau * tau;
  }
  double derivative(double t) const override {
    const auto [i, tau] = locate(t);
    return phi_[i] + slope_of(i) * tau;
  }
  std::string describe() const override { return "tabulated(" + std::to_string(t_.size()) + " rows)"; }

 private:
  [[nodiscard]] std::pair<std::size_t, double> locate(double t) const {
    if (t >= t_.back()) return {t_.size() - 1, t - t_.back()};
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
    return {i, t - t_[i]};
  }
  [[nodiscard]] double slope_of(std::size_t i) const {
    return i + 1 < t_.size() ? (phi_[i + 1] - phi_[i]) / (t_[i + 1] - t_[i]) : tail_slope_;
  }
  std::vector<double> t_, phi_, cum_;
  double tail_slope_ = 0.0;
};

class Custom final : public YoungModel {
 public:
  Custom(std::string name, std::function<double(double)> phi)
      : YoungModel(YoungKind::custom, {}), name_(std::move(name)), phi_(std::move(phi)) {
    if (!phi_) throw InvalidYoungFunction("custom: empty phi");
    if (phi_(0.0) != 0.0) throw InvalidYoungFunction("custom: phi(0) must be 0");
    double prev = 0.0;
    for (int k = 0; k <= 240; ++k) {
      const double s = std::pow(10.0, -6.0 + 12.0 * k / 240.0);
      const double v = phi_(s);
      if (!(v > 0.0)) throw InvalidYoungFunction("custom: phi vanishes at s=" + fmt_num(s));
      if (v < prev * (1.0 - 1e-12)) throw InvalidYoungFunction("custom: phi decreases near s=" + fmt_num(s));
      prev = v;
    }
  }
  double value(double t) const override { return detail::integrate_from_zero(phi_, t); }
  double derivative(double t) const override { return phi_(t); }
  std::string describe() const override { return name_; }

 private:
  std::string name_;
  std::function<double(double)> phi_;
};

}  // namespace models

/// Value handle for a Young function Phi(t) = int_0^t phi. Cheap to copy.
class YoungFunction {
 public:
  explicit YoungFunction(std::shared_ptr<const YoungModel> model) : model_(std::move(model)) {
    if (!model_) throw InvalidYoungFunction("null Young function model");
  }

  /// coef * t^p; coef defaults to 1/p.
  static YoungFunction power(double p, std::optional<double> coef = std::nullopt) {
    return YoungFunction(std::make_shared<models::Power>(p, coef.value_or(1.0 / p)));
  }
  static YoungFunction power_sum(double p, double q) {
    return YoungFunction(std::make_shared<models::PowerSum>(p, q));
  }
  static YoungFunction plasticity(double alpha, double beta) {
    return YoungFunction(std::make_shared<models::LogPower>(alpha, beta));
  }
  static YoungFunction elasticity(double gamma) {
    return YoungFunction(std::make_shared<models::Elasticity>(gamma));
  }
  static YoungFunction newtonian(double alpha, double beta) {
    return YoungFunction(std::make_shared<models::Newtonian>(alpha, beta));
  }
  static YoungFunction exp_square() { return YoungFunction(std::make_shared<models::ExpSquare>()); }
  static YoungFunction tabulated(std::vector<double> t, std::vector<double> values) {
    return YoungFunction(std::make_shared<models::Tabulated>(std::move(t), std::move(values)));
  }
  static YoungFunction custom(std::string name, std::function<double(double)> phi) {
    return YoungFunction(std::make_shared<models::Custom>(std::move(name), std::move(phi)));
  }

  [[nodiscard]] double operator()(double t) const { return model_->value(t); }
  [[nodiscard]] double value(double t) const { return model_->value(t); }
  [[nodiscard]] double derivative(double t) const { return model_->derivative(t); }
  [[nodiscard]] double second_derivative(double t) const { return model_->second_derivative(t); }
  [[nodiscard]] double inverse_derivative(double s) const { return model_->inverse_derivative(s); }
  [[nodiscard]] double growth_ratio(double t) const { return model_->growth_ratio(t); }
  [[nodiscard]] std::optional<GrowthIndices> closed_form_indices() const { return model_->closed_form_indices(); }

  [[nodiscard]] YoungKind kind() const noexcept { return model_->kind(); }
  [[nodiscard]] std::string name() const { return model_->describe(); }
  [[nodiscard]] const YoungModel& model() const noexcept { return *model_; }
  [[nodiscard]] const std::shared_ptr<const YoungModel>& model_ptr() const noexcept { return model_; }

 private:
  std::shared_ptr<const YoungModel> model_;
};

inline void require_nonneg_finite(double t, const char* what) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw DomainError(std::string(what) + ": argument must be finite and >= 0, got " + models::fmt_num(t));
}

/// Phi(t).
[[nodiscard]] inline double eval(const YoungFunction& phi, double t) {
  require_nonneg_finite(t, "eval");
  return phi.value(t);
}

/// phi(t) = Phi'(t).
[[nodiscard]] inline double derivative(const YoungFunction& phi, double t) {
  require_nonneg_finite(t, "derivative");
  return phi.derivative(t);
}

}  // namespace orlicz
