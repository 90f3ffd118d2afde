// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "orlicz/norms.hpp"

using namespace orlicz;

namespace {

GridFunction random_nodal(const DomainPtr& dom, std::mt19937_64& rng, bool zero_trace = true) {
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  return GridFunction::sample(dom, [&](double, double) { return U(rng); }, zero_trace);
}

// trapezoid p-norm, computed without any Orlicz machinery
double trapezoid_lp(const GridFunction& u, const WeightField& w, double p) {
  const auto& q = u.domain()->quadrature_weights();
  double s = 0.0;
  for (int k = 0; k < q.size(); ++k) s += q[k] * w[k] * std::pow(std::abs(u[k]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

TEST(GridDomain, ShapesAndQuadrature) {
  const auto iv = GridDomain::interval(0.0, 1.0, 11);
  EXPECT_DOUBLE_EQ(iv->h(), 0.1);
  EXPECT_NEAR(iv->quadrature_weights().sum(), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(iv->inradius(), 0.5);
  EXPECT_EQ(iv->free_nodes().size(), 9u);

  const auto bx = GridDomain::box(0.0, 2.0, -1.0, 0.5, 33);
  EXPECT_NEAR(bx->quadrature_weights().sum(), 3.0, 3.0 * 1e-10);
  EXPECT_DOUBLE_EQ(bx->inradius(), 0.75);
  EXPECT_EQ(bx->free_nodes().size(), 31u * 31u);

  const auto dc = GridDomain::disc(0.0, 0.0, 1.0, 129);
  EXPECT_DOUBLE_EQ(dc->inradius(), 1.0);
  EXPECT_NEAR(dc->quadrature_weights().sum(), std::numbers::pi, 2e-2);
  for (int k : dc->free_nodes()) EXPECT_LT(dc->distance_to_center(k), 1.0);
}

TEST(WeightField, RejectsValuesBelowOne) {
  const auto dom = GridDomain::interval(0.0, 1.0, 5);
  EXPECT_THROW(WeightField::constant(dom, 0.5), DomainError);
  EXPECT_THROW(WeightField(dom, Eigen::VectorXd::Ones(4)), DomainError);
  EXPECT_NO_THROW(WeightField::from_function(dom, [](double x, double) { return 1.0 + x * x; }));
}

TEST(GridFunction, ZeroTraceIsEnforced) {
  const auto dom = GridDomain::interval(0.0, 1.0, 5);
  EXPECT_THROW(GridFunction(dom, Eigen::VectorXd::Ones(5)), DomainError);
  EXPECT_NO_THROW(GridFunction(dom, Eigen::VectorXd::Ones(5), false));
  const auto u = GridFunction::sample(dom, [](double, double) { return 1.0; });
  EXPECT_EQ(u[0], 0.0);
  EXPECT_EQ(u[4], 0.0);
  EXPECT_EQ(u[2], 1.0);
}

TEST(Modular, Examples) {
  const auto dom = GridDomain::interval(0.0, 1.0, 257);
  const auto one = GridFunction::sample(dom, [](double, double) { return 1.0; }, false);
  const auto sq = YoungFunction::power(2.0, 1.0);
  EXPECT_NEAR(modular(sq, WeightField::constant(dom, 1.0), one), 1.0, 1e-14);
  EXPECT_NEAR(modular(sq, WeightField::constant(dom, 2.0), one), 2.0, 1e-14);
  const auto x = GridFunction::sample(dom, [](double t, double) { return t; }, false);
  // trapezoid error for t^3/3 is h^2/12 * (f'(1) - f'(0)) = h^2/12
  const double h = dom->h();
  EXPECT_NEAR(modular(YoungFunction::power(3.0), WeightField::constant(dom, 1.0), x), 1.0 / 12.0, h * h / 10.0);
  EXPECT_EQ(modular(sq, WeightField::constant(dom, 1.0), GridFunction::zeros(dom)), 0.0);
}

TEST(Modular, DomainMismatch) {
  const auto a = GridDomain::interval(0.0, 1.0, 9);
  const auto b = GridDomain::interval(0.0, 1.0, 17);
  EXPECT_THROW((void)modular(YoungFunction::power(2.0), WeightField::constant(a, 1.0), GridFunction::zeros(b)),
               DomainError);
}

TEST(Luxemburg, Examples) {
  const auto dom = GridDomain::interval(0.0, 1.0, 129);
  const auto w = WeightField::constant(dom, 1.0);
  const auto one = GridFunction::sample(dom, [](double, double) { return 1.0; }, false);
  EXPECT_NEAR(luxemburg_norm(YoungFunction::power(2.0, 1.0), w, one), 1.0, 1e-14);
  EXPECT_EQ(luxemburg_norm(YoungFunction::power(2.0, 1.0), w, GridFunction::zeros(dom)), 0.0);

  std::mt19937_64 rng(7);
  const auto u = random_nodal(dom, rng);
  const auto wv = WeightField::from_function(dom, [](double x, double) { return 1.0 + 3.0 * x; });
  for (double p : {1.5, 2.0, 3.5}) {
    const auto phi = YoungFunction::power(p, 1.0);
    const double n1 = luxemburg_norm(phi, wv, u);
    EXPECT_NEAR(luxemburg_norm(phi, wv, u.scaled(3.0)), 3.0 * n1, 1e-13 * n1) << p;
    EXPECT_NEAR(modular(phi, wv, u.scaled(1.0 / n1)), 1.0, 1e-10) << p;
  }
}

TEST(Luxemburg, MatchesTrapezoidLp) {
  const auto dom = GridDomain::interval(0.0, 1.0, 256);
  const auto w = WeightField::constant(dom, 1.0);
  std::mt19937_64 rng(11);
  const auto u = random_nodal(dom, rng);
  const double got = luxemburg_norm(YoungFunction::power(3.0, 1.0), w, u);
  EXPECT_NEAR(got, trapezoid_lp(u, w, 3.0), 1e-8 * got);
}

TEST(Luxemburg, NormAxioms) {
  const auto dom = GridDomain::box(0.0, 1.0, 0.0, 1.0, 17);
  const auto w = WeightField::from_function(dom, [](double x, double y) { return 1.0 + x + y; });
  const auto phi = YoungFunction::plasticity(2.0, 1.0);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto u = random_nodal(dom, rng), v = random_nodal(dom, rng);
    const GridFunction sum(dom, u.values() + v.values());
    EXPECT_LE(luxemburg_norm(phi, w, sum), luxemburg_norm(phi, w, u) + luxemburg_norm(phi, w, v) + 1e-12);
    const double n = luxemburg_norm(phi, w, u);
    EXPECT_NEAR(luxemburg_norm(phi, w, u.scaled(-2.5)), 2.5 * n, 1e-12 * n);
    EXPECT_GT(n, 0.0);
  }
}

TEST(Holder, Examples) {
  const auto dom = GridDomain::interval(0.0, 1.0, 65);
  const auto w = WeightField::constant(dom, 1.0);
  const auto phi = YoungFunction::power(2.0);
  const auto one = GridFunction::sample(dom, [](double, double) { return 1.0; }, false);
  const auto z = holder_check(phi, w, GridFunction::zeros(dom), one);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_TRUE(z.holds());
  const auto h = holder_check(phi, w, one, one);
  EXPECT_NEAR(h.lhs, 1.0, 1e-14);
  // ||1|| under t^2/2 is 1/sqrt 2 and t^2/2 is self-conjugate
  EXPECT_NEAR(h.rhs, 2.0 * 0.5, 1e-9);
  EXPECT_TRUE(h.holds());
}

TEST(Holder, RandomPairsNeverViolate) {
  const auto dom = GridDomain::interval(0.0, 1.0, 65);
  const auto w = WeightField::from_function(dom, [](double x, double) { return 1.0 + x; });
  std::mt19937_64 rng(5);
  int violations = 0;
  for (const auto& phi : {YoungFunction::power(3.0), YoungFunction::plasticity(2.0, 1.0)}) {
    for (int t = 0; t < 100; ++t) {
      const auto r = holder_check(phi, w, random_nodal(dom, rng, false), random_nodal(dom, rng, false));
      if (!r.holds()) ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(Poincare, SharpConstantForSquares) {
  const auto dom = GridDomain::interval(0.0, 1.0, 257);
  const auto w = WeightField::constant(dom, 1.0);
  const auto phi = YoungFunction::power(2.0);
  const auto est = poincare_estimate(phi, phi, w, w, dom, 20);
  EXPECT_GE(est.constant, 1.0 / std::numbers::pi - 1e-2);
  EXPECT_LE(est.constant, 1.0 / std::numbers::pi + 1e-3);
  EXPECT_THROW((void)poincare_estimate(phi, phi, w, w, dom, 0), DomainError);
}

TEST(Poincare, ScalingInvariantAndDiscFinite) {
  const auto dom = GridDomain::interval(0.0, 1.0, 129);
  const auto w = WeightField::constant(dom, 1.0);
  const auto phi = YoungFunction::power(3.0), psi = YoungFunction::power(2.0);
  const auto u = principal_bump(dom);
  const double r1 = luxemburg_norm(psi, w, u) / gradient_norm(phi, w, u);
  const double r2 = luxemburg_norm(psi, w, u.scaled(2.0)) / gradient_norm(phi, w, u.scaled(2.0));
  // p = 3 against p = 2 is only homogeneous in each norm separately
  EXPECT_NEAR(r1, r2, 1e-12 * r1);

  const auto disc = GridDomain::disc(0.0, 0.0, 1.0, 41);
  const auto wd = WeightField::constant(disc, 1.0);
  const auto est = poincare_estimate(phi, psi, wd, wd, disc, 10, 9);
  EXPECT_GT(est.constant, 0.0);
  EXPECT_TRUE(std::isfinite(est.constant));
}
