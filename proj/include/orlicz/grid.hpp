// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "orlicz/errors.hpp"

namespace orlicz {

enum class Shape { interval, box, disc };

[[nodiscard]] inline const char* to_string(Shape s) {
  switch (s) {
    case Shape::interval: return "interval";
    case Shape::box: return "box";
    case Shape::disc: return "disc";
  }
  return "unknown";
}

/// Piece of the gradient stencil: a segment (1D) or a P1 triangle (2D).
/// On the element, grad u = sum_k grad_coef[k] * u[vertex[k]].
struct Element {
  std::array<int, 3> vertex{};
  std::array<std::array<double, 2>, 3> grad_coef{};
  int count = 0;
  double area = 0.0;
};

class GridDomain;
using DomainPtr = std::shared_ptr<const GridDomain>;

/// Uniform node grid on an interval, an axis-aligned box or a disc.
/// Nodes are stored row-major (x fastest). Boundary nodes, and for the
/// disc every node not strictly inside the circle, are fixed at zero for
/// zero-trace functions.
class GridDomain {
 public:
  static DomainPtr interval(double a, double b, int n) {
    if (!(b > a)) throw DomainError("interval: need a < b");
    if (n < 3) throw DomainError("interval: need at least 3 nodes");
    auto d = std::shared_ptr<GridDomain>(new GridDomain(Shape::interval, 1, n, 1));
    d->lo_ = {a, 0.0};
    d->hi_ = {b, 0.0};
    d->h_ = {(b - a) / (n - 1), 1.0};
    d->center_ = {0.5 * (a + b), 0.0};
    d->inradius_ = 0.5 * (b - a);
    d->finish();
    return d;
  }

  static DomainPtr box(double x0, double x1, double y0, double y1, int n) {
    if (!(x1 > x0) || !(y1 > y0)) throw DomainError("box: empty extent");
    if (n < 3) throw DomainError("box: need at least 3 nodes per axis");
    auto d = std::shared_ptr<GridDomain>(new GridDomain(Shape::box, 2, n, n));
    d->lo_ = {x0, y0};
    d->hi_ = {x1, y1};
    d->h_ = {(x1 - x0) / (n - 1), (y1 - y0) / (n - 1)};
    d->center_ = {0.5 * (x0 + x1), 0.5 * (y0 + y1)};
    d->inradius_ = 0.5 * std::min(x1 - x0, y1 - y0);
    d->finish();
    return d;
  }

  /// Disc of radius R about (cx, cy) on the bounding square with n nodes per axis.
  static DomainPtr disc(double cx, double cy, double radius, int n) {
    if (!(radius > 0.0)) throw DomainError("disc: radius must be positive");
    if (n < 5) throw DomainError("disc: need at least 5 nodes per axis");
    auto d = std::shared_ptr<GridDomain>(new GridDomain(Shape::disc, 2, n, n));
    d->lo_ = {cx - radius, cy - radius};
    d->hi_ = {cx + radius, cy + radius};
    d->h_ = {2.0 * radius / (n - 1), 2.0 * radius / (n - 1)};
    d->center_ = {cx, cy};
    d->inradius_ = radius;
    d->finish();
    return d;
  }

  [[nodiscard]] Shape shape() const noexcept { return shape_; }
  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] int nx() const noexcept { return nx_; }
  [[nodiscard]] int ny() const noexcept { return ny_; }
  [[nodiscard]] int size() const noexcept { return nx_ * ny_; }
  [[nodiscard]] double h() const noexcept { return std::max(h_[0], dim_ == 2 ? h_[1] : 0.0); }
  [[nodiscard]] double hx() const noexcept { return h_[0]; }
  [[nodiscard]] double hy() const noexcept { return h_[1]; }
  [[nodiscard]] const std::array<double, 2>& lower() const noexcept { return lo_; }
  [[nodiscard]] const std::array<double, 2>& upper() const noexcept { return hi_; }
  /// Center x0 of the largest inscribed ball.
  [[nodiscard]] const std::array<double, 2>& center() const noexcept { return center_; }
  /// Exact inradius D of the continuous shape.
  [[nodiscard]] double inradius() const noexcept { return inradius_; }
  /// Measure of the continuous shape.
  [[nodiscard]] double measure() const noexcept {
    switch (shape_) {
      case Shape::interval: return hi_[0] - lo_[0];
      case Shape::box: return (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]);
      case Shape::disc: return std::numbers::pi * inradius_ * inradius_;
    }
    return 0.0;
  }

  [[nodiscard]] int index(int i, int j = 0) const noexcept { return j * nx_ + i; }
  [[nodiscard]] std::array<double, 2> point(int k) const noexcept {
    const int i = k % nx_, j = k / nx_;
    return {lo_[0] + i * h_[0], dim_ == 2 ? lo_[1] + j * h_[1] : 0.0};
  }
  [[nodiscard]] double distance_to_center(int k) const noexcept {
    const auto p = point(k);
    return std::hypot(p[0] - center_[0], dim_ == 2 ? p[1] - center_[1] : 0.0);
  }

  /// Quadrature weight of node k (trapezoid; h^2 on the disc mask, 0 outside).
  [[nodiscard]] const Eigen::VectorXd& quadrature_weights() const noexcept { return quad_; }
  /// Nodes a zero-trace function may move.
  [[nodiscard]] const std::vector<int>& free_nodes() const noexcept { return free_; }
  [[nodiscard]] bool is_free(int k) const noexcept { return free_mask_[static_cast<std::size_t>(k)] != 0; }
  [[nodiscard]] const std::vector<Element>& elements() const noexcept { return elements_; }
  /// Elements incident to each node.
  [[nodiscard]] const std::vector<std::vector<int>>& node_elements() const noexcept { return node_elements_; }

  [[nodiscard]] std::string describe() const {
    std::string s = to_string(shape_);
    s += " n=" + std::to_string(nx_);
    return s;
  }

  [[nodiscard]] bool same_as(const GridDomain& o) const noexcept {
    return shape_ == o.shape_ && nx_ == o.nx_ && ny_ == o.ny_ && lo_ == o.lo_ && hi_ == o.hi_;
  }

 private:
  GridDomain(Shape s, int dim, int nx, int ny) : shape_(s), dim_(dim), nx_(nx), ny_(ny) {}

  void finish() {
    const int n = size();
    quad_ = Eigen::VectorXd::Zero(n);
    free_mask_.assign(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k) {
      const int i = k % nx_, j = k / nx_;
      const bool edge_x = i == 0 || i == nx_ - 1;
      const bool edge_y = dim_ == 2 && (j == 0 || j == ny_ - 1);
      if (shape_ == Shape::disc) {
        if (distance_to_center(k) < inradius_ * (1.0 - 1e-12)) {
          quad_[k] = h_[0] * h_[1];
          free_mask_[static_cast<std::size_t>(k)] = 1;
        }
        continue;
      }
      double w = h_[0] * (edge_x ? 0.5 : 1.0);
      if (dim_ == 2) w *= h_[1] * (edge_y ? 0.5 : 1.0);
      quad_[k] = w;
      if (!edge_x && !edge_y) free_mask_[static_cast<std::size_t>(k)] = 1;
    }
    for (int k = 0; k < n; ++k)
      if (free_mask_[static_cast<std::size_t>(k)]) free_.push_back(k);

    if (dim_ == 1) {
      for (int i = 0; i + 1 < nx_; ++i) {
        Element e;
        e.count = 2;
        e.vertex = {i, i + 1, 0};
        e.grad_coef[0] = {-1.0 / h_[0], 0.0};
        e.grad_coef[1] = {1.0 / h_[0], 0.0};
        e.area = h_[0];
        elements_.push_back(e);
      }
    } else {
      const double ax = 1.0 / h_[0], ay = 1.0 / h_[1], half = 0.5 * h_[0] * h_[1];
      for (int j = 0; j + 1 < ny_; ++j)
        for (int i = 0; i + 1 < nx_; ++i) {
          const int a = index(i, j), b = index(i + 1, j), c = index(i, j + 1), d = index(i + 1, j + 1);
          Element lower;
          lower.count = 3;
          lower.vertex = {a, b, c};
          lower.grad_coef = {{{-ax, -ay}, {ax, 0.0}, {0.0, ay}}};
          lower.area = half;
          Element upper;
          upper.count = 3;
          upper.vertex = {b, c, d};
          upper.grad_coef = {{{0.0, -ay}, {-ax, 0.0}, {ax, ay}}};
          upper.area = half;
          for (const Element& e : {lower, upper}) {
            bool touches_free = false;
            for (int v = 0; v < 3; ++v) touches_free |= is_free(e.vertex[static_cast<std::size_t>(v)]);
            if (touches_free || shape_ != Shape::disc) elements_.push_back(e);
          }
        }
    }
    node_elements_.assign(static_cast<std::size_t>(n), {});
    for (std::size_t e = 0; e < elements_.size(); ++e)
      for (int v = 0; v < elements_[e].count; ++v)
        node_elements_[static_cast<std::size_t>(elements_[e].vertex[static_cast<std::size_t>(v)])].push_back(
            static_cast<int>(e));
  }

  Shape shape_;
  int dim_, nx_, ny_;
  std::array<double, 2> lo_{}, hi_{}, h_{}, center_{};
  double inradius_ = 0.0;
  Eigen::VectorXd quad_;
  std::vector<char> free_mask_;
  std::vector<int> free_;
  std::vector<Element> elements_;
  std::vector<std::vector<int>> node_elements_;
};

inline void require_same_domain(const DomainPtr& a, const DomainPtr& b, const char* what) {
  if (!a || !b || (a != b && !a->same_as(*b))) throw DomainError(std::string(what) + ": domain mismatch");
}

/// Nodal weight (omega or omega_1); every value is >= 1.
class WeightField {
 public:
  WeightField(DomainPtr dom, Eigen::VectorXd values) : dom_(std::move(dom)), v_(std::move(values)) {
    if (!dom_) throw DomainError("weight field: null domain");
    if (v_.size() != dom_->size())
      throw DomainError("weight field: " + std::to_string(v_.size()) + " values for " +
                        std::to_string(dom_->size()) + " nodes");
    for (Eigen::Index k = 0; k < v_.size(); ++k)
      if (!(v_[k] >= 1.0) || !std::isfinite(v_[k]))
        throw DomainError("weight field: value " + std::to_string(v_[k]) + " at node " + std::to_string(k) +
                          " is below 1");
  }

  static WeightField constant(DomainPtr dom, double c) {
    const int n = dom->size();
    return WeightField(std::move(dom), Eigen::VectorXd::Constant(n, c));
  }

  static WeightField from_function(DomainPtr dom, const std::function<double(double, double)>& f) {
    Eigen::VectorXd v(dom->size());
    for (int k = 0; k < dom->size(); ++k) {
      const auto p = dom->point(k);
      v[k] = f(p[0], p[1]);
    }
    return WeightField(std::move(dom), std::move(v));
  }

  [[nodiscard]] const DomainPtr& domain() const noexcept { return dom_; }
  [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return v_; }
  [[nodiscard]] double operator[](int k) const noexcept { return v_[k]; }

  /// Element value: mean over the element's vertices.
  [[nodiscard]] double on_element(const Element& e) const noexcept {
    double s = 0.0;
    for (int k = 0; k < e.count; ++k) s += v_[e.vertex[static_cast<std::size_t>(k)]];
    return s / e.count;
  }

 private:
  DomainPtr dom_;
  Eigen::VectorXd v_;
};

/// Nodal values on a grid. Zero-trace functions vanish on every non-free node.
class GridFunction {
 public:
  /// Empty placeholder without a domain.
  GridFunction() = default;

  GridFunction(DomainPtr dom, Eigen::VectorXd values, bool zero_trace = true)
      : dom_(std::move(dom)), v_(std::move(values)), zero_trace_(zero_trace) {
    if (!dom_) throw DomainError("grid function: null domain");
    if (v_.size() != dom_->size()) throw DomainError("grid function: size does not match the domain");
    for (Eigen::Index k = 0; k < v_.size(); ++k)
      if (!std::isfinite(v_[k])) throw DomainError("grid function: non-finite value at node " + std::to_string(k));
    if (zero_trace_)
      for (int k = 0; k < dom_->size(); ++k)
        if (!dom_->is_free(k) && v_[k] != 0.0)
          throw DomainError("grid function: zero-trace function is nonzero at fixed node " + std::to_string(k));
  }

  static GridFunction zeros(DomainPtr dom) {
    const int n = dom->size();
    return GridFunction(std::move(dom), Eigen::VectorXd::Zero(n));
  }

  /// Samples f at the nodes; with zero_trace, fixed nodes are set to 0.
  static GridFunction sample(DomainPtr dom, const std::function<double(double, double)>& f, bool zero_trace = true) {
    Eigen::VectorXd v(dom->size());
    for (int k = 0; k < dom->size(); ++k) {
      const auto p = dom->point(k);
      v[k] = zero_trace && !dom->is_free(k) ? 0.0 : f(p[0], p[1]);
    }
    return GridFunction(std::move(dom), std::move(v), zero_trace);
  }

  [[nodiscard]] const DomainPtr& domain() const noexcept { return dom_; }
  [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return v_; }
  [[nodiscard]] bool zero_trace() const noexcept { return zero_trace_; }
  [[nodiscard]] double operator[](int k) const noexcept { return v_[k]; }
  [[nodiscard]] double sup_norm() const { return v_.size() ? v_.cwiseAbs().maxCoeff() : 0.0; }
  [[nodiscard]] bool is_zero() const { return sup_norm() == 0.0; }
  [[nodiscard]] bool empty() const noexcept { return !dom_; }

  /// Gradient on element e.
  [[nodiscard]] std::array<double, 2> gradient(const Element& e) const noexcept {
    std::array<double, 2> g{0.0, 0.0};
    for (int k = 0; k < e.count; ++k) {
      const double u = v_[e.vertex[static_cast<std::size_t>(k)]];
      g[0] += e.grad_coef[static_cast<std::size_t>(k)][0] * u;
      g[1] += e.grad_coef[static_cast<std::size_t>(k)][1] * u;
    }
    return g;
  }
  [[nodiscard]] double gradient_magnitude(const Element& e) const noexcept {
    const auto g = gradient(e);
    return std::hypot(g[0], g[1]);
  }

  [[nodiscard]] GridFunction scaled(double s) const { return GridFunction(dom_, v_ * s, zero_trace_); }
  [[nodiscard]] GridFunction abs() const { return GridFunction(dom_, v_.cwiseAbs(), zero_trace_); }

 private:
  DomainPtr dom_;
  Eigen::VectorXd v_;
  bool zero_trace_ = true;
};

}  // namespace orlicz
