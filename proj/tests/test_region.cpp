// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "orlicz/region.hpp"

using namespace orlicz;

namespace {

constexpr double pi = std::numbers::pi;

EnergySetup reference(int n = 65) {
  return EnergySetup::uniform(YoungFunction::power(3.0), YoungFunction::power(2.0), GridDomain::disc(0.0, 0.0, 1.0, n));
}

}  // namespace

TEST(BallVolume, ClosedForms) {
  EXPECT_NEAR(ball_volume(2, 1.0), pi, 1e-15);
  EXPECT_NEAR(ball_volume(3, 1.0), 4.0 * pi / 3.0, 1e-14);
  EXPECT_NEAR(ball_volume(4, 1.0), pi * pi / 2.0, 1e-14);
  EXPECT_NEAR(ball_volume(2, 0.5), pi / 4.0, 1e-15);
  EXPECT_THROW((void)ball_volume(1, 1.0), DomainError);
}

TEST(BuildTestFunction, PlateauRampAndGradient) {
  const auto box = GridDomain::box(-1.0, 1.0, -1.0, 1.0, 9);
  const auto sb = EnergySetup::uniform(YoungFunction::power(2.0), YoungFunction::power(2.0), box);
  const auto v = build_test_function(sb, 1.5);
  EXPECT_EQ(v[box->index(4, 4)], 1.5);
  EXPECT_DOUBLE_EQ(v[box->index(7, 4)], 0.75);  // |x - x0| = 3D/4
  EXPECT_EQ(v[box->index(8, 4)], 0.0);
  EXPECT_THROW((void)build_test_function(sb, 0.0), DomainError);

  const auto s = reference(129);
  const double d = -0.7;
  const auto u = build_test_function(s, d);
  const auto& dom = *s.domain();
  const double slope = 2.0 * std::abs(d) / dom.inradius();
  int ramp = 0;
  for (const auto& el : dom.elements()) {
    double lo = 1e300, hi = 0.0;
    for (int a = 0; a < el.count; ++a) {
      const double rho = dom.distance_to_center(el.vertex[static_cast<std::size_t>(a)]);
      lo = std::min(lo, rho);
      hi = std::max(hi, rho);
    }
    if (lo > 0.5 && hi < 1.0) {
      ++ramp;
      EXPECT_NEAR(u.gradient_magnitude(el), slope, 2.0 * dom.h() / lo * slope);
    } else if (hi <= 0.5) {
      EXPECT_EQ(u.gradient_magnitude(el), 0.0);
    }
  }
  EXPECT_GT(ramp, 1000);
}

TEST(EnergyBounds, PowerCaseCollapses) {
  const auto s = reference(129);
  for (double d : {0.3, 1.0, 2.5}) {
    const auto b = energy_bounds(s, d);
    EXPECT_NEAR(b.lo, b.hi, 1e-12 * b.hi);
    const double I = test_energy(s, d);
    EXPECT_NEAR(I, b.lo, 1e-10 * I);
    // annulus area 3 pi / 4 times Phi(2d)
    const double exact = 0.75 * pi * std::pow(2.0 * d, 3) / 3.0;
    EXPECT_NEAR(I, exact, 0.05 * exact);
    EXPECT_NEAR(energy_I(s, build_test_function(s, d)), exact, 0.05 * exact);
    EXPECT_NEAR(annulus_constant_norm(s, 4.0 * d), 2.0 * annulus_constant_norm(s, 2.0 * d),
                1e-12 * annulus_constant_norm(s, 4.0 * d));
  }
}

TEST(EnergyBounds, SandwichAcrossCatalog) {
  const std::vector<YoungFunction> kinds{YoungFunction::plasticity(2.0, 1.0), YoungFunction::elasticity(1.5),
                                         YoungFunction::power_sum(2.0, 2.5), YoungFunction::plasticity(1.5, 1.0),
                                         YoungFunction::power(2.0)};
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> logd(-2.0, 2.0);
  int cases = 0;
  for (int n : {17, 33}) {
    const auto dom = GridDomain::disc(0.0, 0.0, 1.0, n);
    const auto w = WeightField::from_function(dom, [](double x, double y) { return 1.5 + x * x + 0.5 * y; });
    for (const auto& phi : kinds) {
      const EnergySetup s(phi, YoungFunction::power(2.0), w, WeightField::constant(dom, 1.0));
      for (int t = 0; t < 10; ++t, ++cases) {
        const double d = std::pow(10.0, logd(rng));
        const auto b = energy_bounds(s, d);
        const double I = test_energy(s, d);
        EXPECT_LE(b.lo, I * (1 + 1e-9)) << phi.name() << " d=" << d;
        EXPECT_GE(b.hi, I * (1 - 1e-9)) << phi.name() << " d=" << d;
      }
    }
  }
  EXPECT_EQ(cases, 100);
}

TEST(GammaD, FactorByFactor) {
  const auto s = reference();
  const double area = s.domain()->quadrature_weights().sum();
  // ||1|| under t^3/3 over the nodal quadrature: area / (3 xi^3) = 1
  const double norm_one = std::cbrt(area / 3.0);
  EXPECT_NEAR(constant_norm(s, 1.0), norm_one, 1e-12 * norm_one);
  const double psi1 = 0.5, vol = pi * 0.25, twoN_m = std::pow(4.0, 3.0);
  const double want = 1.0 * psi1 * vol / (twoN_m * std::pow(norm_one, 3.0));
  EXPECT_NEAR(gamma_d(s, 1.0), want, 1e-10 * want);
  // with the exact disc area the value is 3 / 512
  EXPECT_NEAR(gamma_d(s, 1.0), 3.0 / 512.0, 0.02 * 3.0 / 512.0);
  EXPECT_NEAR(gamma_d(s, 2.0), 0.5 * gamma_d(s, 1.0), 1e-10 * gamma_d(s, 1.0));

  const auto line = EnergySetup::uniform(YoungFunction::power(2.0), YoungFunction::power(2.0),
                                         GridDomain::interval(0.0, 1.0, 9));
  EXPECT_THROW((void)gamma_d(line, 1.0), DomainError);
}

TEST(WTildeR, Examples) {
  const auto box = GridDomain::box(0.0, 1.0, 0.0, 1.0, 9);
  const auto sq = EnergySetup::uniform(YoungFunction::power(2.0), YoungFunction::power(2.0), box);
  for (double r : {0.01, 1.0, 7.0}) EXPECT_NEAR(w_tilde_r(sq, r, 1.0), r, 1e-12 * r);

  const EnergySetup s = EnergySetup::uniform(YoungFunction::power(3.0), YoungFunction::plasticity(2.0, 1.0), box);
  const auto a = s.phi_indices(), b = s.psi_indices();
  double prev = 0.0;
  for (double r : {1e-3, 0.2, 0.9, 1.0, 1.1, 5.0, 80.0}) {
    for (double c1 : {0.3, 2.0}) {
      double inner = 0.0;
      for (double num : {b.l, b.m})
        for (double den : {a.l, a.m}) inner = std::max(inner, std::pow(r, num / den));
      const double want = std::max(std::pow(c1, b.l), std::pow(c1, b.m)) * inner;
      EXPECT_NEAR(w_tilde_r(s, r, c1), want, 1e-12 * want);
    }
    EXPECT_GE(w_tilde_r(s, r, 0.5), prev);
    prev = w_tilde_r(s, r, 0.5);
  }
  EXPECT_THROW((void)w_tilde_r(s, 0.0, 1.0), DomainError);
}

TEST(LambdaInterval, EndsAndLowerBound) {
  const auto s = reference(33);
  for (double d : {0.2, 1.0}) {
    const auto v = build_test_function(s, d);
    const double lower = d * d * 0.5 * pi * 0.25;
    EXPECT_GE(energy_J(s, v), lower);
    const auto li = lambda_interval(s, d, 0.01, 50);
    EXPECT_NEAR(li.lo, test_energy(s, d) / energy_J(s, v), 1e-14 * li.lo);
    EXPECT_NEAR(li.hi, 0.01 / li.sup_J_r, 1e-14 * li.hi);
  }
  // I is 3-homogeneous and J 2-homogeneous, so the sampled sup scales like r^{2/3}
  const auto a = sample_sup_J(s, 1e-3, 40), b = sample_sup_J(s, 8e-3, 40);
  EXPECT_NEAR(b.sup, 4.0 * a.sup, 1e-9 * b.sup);
  EXPECT_THROW((void)sample_sup_J(s, 0.0, 10), DomainError);
}

TEST(Admissible, Examples) {
  const auto s = reference(33);
  const double c1 = 0.5;
  EXPECT_FALSE(admissible(s, 1.0, 2.0 * r_threshold(s, 1.0), c1));
  EXPECT_TRUE(admissible(s, 0.25, 1e-4, c1));
  EXPECT_GT(r_threshold(s, 1.0, true), r_threshold(s, 1.0, false));
  EXPECT_NEAR(r_threshold(s, 1.0, true), 8.0 * r_threshold(s, 1.0, false), 1e-9 * r_threshold(s, 1.0, true));
}

TEST(Region, ReferenceInstanceReport) {
  const auto s = reference();
  RegionOptions o;
  o.samples = 200;
  const auto gs = region_grid_search(s, {0.05, 0.1, 0.25, 1.0}, {1e-6, 1e-4, 1e-2, 1.0}, o);
  ASSERT_TRUE(gs.chosen);
  const auto& rep = gs.rows[*gs.chosen];
  EXPECT_TRUE(rep.admissible);
  EXPECT_TRUE(rep.sampled);
  EXPECT_TRUE(rep.sandwich_holds);
  EXPECT_LT(rep.w_tilde_r, rep.gamma_d);
  EXPECT_GE(rep.J_vd, rep.J_vd_lower);
  EXPECT_EQ(rep.samples, 200);
  // the chain actually bounds sup J by w~_r
  EXPECT_EQ(rep.bound_violations, 0);
  EXPECT_LE(rep.sup_J_r, rep.w_tilde_r * (1 + 1e-9));
  for (const auto& row : gs.rows) {
    EXPECT_TRUE(row.sandwich_holds);
    if (&row != &rep) {
      EXPECT_FALSE(row.sampled);
    }
  }
}

TEST(Region, ReferenceIntervalIsEmptyForEveryAdmissiblePair) {
  // sup_{I<=r} J = K r^{2/3} with K >= 1 / I_min^{2/3}, I_min the least I on {J = 1};
  // hi = r^{1/3} / K stays below lo = I(v_d) / J(v_d) whenever r is below the threshold.
  const auto s = reference();
  const double I_min = minimize_on_level(s, 1.0).level;
  const double K = 1.0 / std::cbrt(I_min * I_min);
  for (double d : {0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 3.0}) {
    const double lo = test_energy(s, d) / energy_J(s, build_test_function(s, d));
    const double hi_max = std::cbrt(r_threshold(s, d)) / K;
    EXPECT_LT(hi_max, lo) << d;
  }
  const auto li = lambda_interval(s, 0.1, 0.9 * r_threshold(s, 0.1), 100);
  EXPECT_FALSE(li.nonempty());
}

TEST(CountCriticalPoints, Examples) {
  const auto s = reference(17);
  EXPECT_EQ(count_critical_points(s, 20.0, 0), 0);
  const int found = count_critical_points(s, 20.0, 6);
  EXPECT_GE(found, 1);
}

TEST(Refinement, GammaAndWTildeStable) {
  const auto make = [](int n) { return reference(n); };
  const auto rows = refinement_table(make, {33, 65, 129}, 1.0, 1e-3, 0.5);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[2].gamma_d, rows[1].gamma_d, 0.02 * rows[2].gamma_d);
  EXPECT_NEAR(rows[2].gamma_d, 3.0 / 512.0, 0.01 * 3.0 / 512.0);
  EXPECT_EQ(rows[0].w_tilde_r, rows[2].w_tilde_r);
  EXPECT_LT(std::abs(rows[2].gamma_d - rows[1].gamma_d), std::abs(rows[1].gamma_d - rows[0].gamma_d) + 1e-15);
}

TEST(RegionCsv, RowMatchesHeader) {
  RegionReport r;
  r.critical_points = 3;
  const auto count = [](const std::string& x) { return std::count(x.begin(), x.end(), ','); };
  EXPECT_EQ(count(region_csv_header()), count(region_csv_row(r)));
  EXPECT_NE(region_pretty(r).find("admissible: no"), std::string::npos);
}
