// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent reference values shared by the unit tests and the acceptance run.

#include <cmath>
#include <utility>

#include <Eigen/Dense>

namespace orlicz::oracle {

// Eigenvalues of the free-node stencil (1/h) tridiag(-1, 2, -1) against mass h.
inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiagonal_oracle(int n) {
  const int m = n - 2;
  const double h = 1.0 / (n - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    A(i, i) = 2.0 / (h * h);
    if (i + 1 < m) A(i, i + 1) = A(i + 1, i) = -1.0 / (h * h);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A);
}

// First Dirichlet eigenvalue of -(|u'|u')' = lambda |u| u on (0, 1):
// RK4 on (u, v = |u'|u'), bisecting on whether u vanishes before x = 1.
inline double shooting_cubic_oracle() {
  auto crosses = [](double lam) {
    const int steps = 20000;
    const double h = 1.0 / steps;
    double u = 0.0, v = 1.0;
    auto f = [lam](double uu, double vv) {
      return std::pair{std::copysign(std::sqrt(std::abs(vv)), vv), -lam * std::abs(uu) * uu};
    };
    for (int i = 0; i < steps; ++i) {
      const auto [a1, b1] = f(u, v);
      const auto [a2, b2] = f(u + 0.5 * h * a1, v + 0.5 * h * b1);
      const auto [a3, b3] = f(u + 0.5 * h * a2, v + 0.5 * h * b2);
      const auto [a4, b4] = f(u + h * a3, v + h * b3);
      u += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
      v += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
      if (u < 0.0) return true;
    }
    return false;
  };
  double lo = 1.0, hi = 100.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (crosses(mid)) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace orlicz::oracle
