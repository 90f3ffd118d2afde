// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "orlicz/eigensolver.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/functionals.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/young_analysis.hpp"

namespace orlicz {

/// Volume of the N-ball of the given radius, N in {2, 3, 4}.
[[nodiscard]] inline double ball_volume(int dim, double radius) {
  double gamma_half = 0.0;  // Gamma(N/2)
  switch (dim) {
    case 2: gamma_half = 1.0; break;
    case 3: gamma_half = 0.5 * std::sqrt(std::numbers::pi); break;
    case 4: gamma_half = 1.0; break;
    default: throw DomainError("ball_volume: dimension must be 2, 3 or 4");
  }
  const double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / (half * gamma_half) * std::pow(radius, dim);
}

/// Plateau-and-ramp test function: d on B(x0, D/2), linear down to 0 on the
/// annulus, 0 outside B(x0, D). x0 is the domain center, D its inradius.
[[nodiscard]] inline GridFunction build_test_function(const EnergySetup& s, double d) {
  if (d == 0.0 || !std::isfinite(d)) throw DomainError("build_test_function: d must be nonzero and finite");
  const auto& dom = *s.domain();
  const double D = dom.inradius();
  Eigen::VectorXd v(dom.size());
  for (int k = 0; k < dom.size(); ++k) {
    const double rho = dom.distance_to_center(k);
    if (rho >= D) v[k] = 0.0;
    else if (rho <= 0.5 * D) v[k] = d;
    else v[k] = 2.0 * d / D * (D - rho);
  }
  return s.function(std::move(v));
}

namespace detail {

/// Constant c on the nodes of the annulus D/2 <= |x - x0| < D, with omega-weighted mass.
inline WeightedSamples annulus_constant(const EnergySetup& s, double c) {
  const auto& dom = *s.domain();
  const double D = dom.inradius();
  const auto& q = dom.quadrature_weights();
  WeightedSamples out;
  for (int k = 0; k < dom.size(); ++k) {
    const double rho = dom.distance_to_center(k);
    if (rho >= 0.5 * D && rho < D && q[k] > 0.0) {
      out.value.push_back(std::abs(c));
      out.mass.push_back(q[k] * s.w()[k]);
    }
  }
  return out;
}

/// Constant c on all of the domain with omega-weighted mass.
inline WeightedSamples domain_constant(const EnergySetup& s, double c) {
  const auto& q = s.domain()->quadrature_weights();
  WeightedSamples out;
  for (int k = 0; k < s.domain()->size(); ++k) {
    if (q[k] <= 0.0) continue;
    out.value.push_back(std::abs(c));
    out.mass.push_back(q[k] * s.w()[k]);
  }
  return out;
}

inline double min_pow(double x, double a, double b) { return std::min(std::pow(x, a), std::pow(x, b)); }
inline double max_pow(double x, double a, double b) { return std::max(std::pow(x, a), std::pow(x, b)); }

inline void require_plane_or_space(const EnergySetup& s, const char* what) {
  if (s.domain()->dim() < 2) throw DomainError(std::string(what) + ": needs N >= 2");
}

}  // namespace detail

/// Luxemburg norm of the constant c over the whole domain.
[[nodiscard]] inline double constant_norm(const EnergySetup& s, double c) {
  return luxemburg_of(s.phi(), detail::domain_constant(s, c));
}

/// Luxemburg norm of the constant c restricted to the ramp annulus.
[[nodiscard]] inline double annulus_constant_norm(const EnergySetup& s, double c) {
  return luxemburg_of(s.phi(), detail::annulus_constant(s, c));
}

/// I(v_d) with the exact ramp gradient 2|d|/D integrated over the annulus nodes.
[[nodiscard]] inline double test_energy(const EnergySetup& s, double d) {
  return modular_of(s.phi(), detail::annulus_constant(s, 2.0 * d / s.domain()->inradius()));
}

struct EnergyBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// min/max of ||2d/D||^l and ||2d/D||^m, the norm taken over the annulus support.
[[nodiscard]] inline EnergyBounds energy_bounds(const EnergySetup& s, double d) {
  const auto idx = s.phi_indices();
  const double n = annulus_constant_norm(s, 2.0 * d / s.domain()->inradius());
  return {detail::min_pow(n, idx.l, idx.m), detail::max_pow(n, idx.l, idx.m)};
}

/// min{|d|^l1, |d|^m1} Psi(1) vol B(D/2) / ((2N)^m max{||d/D||^l, ||d/D||^m}).
[[nodiscard]] inline double gamma_d(const EnergySetup& s, double d) {
  detail::require_plane_or_space(s, "gamma_d");
  const auto& dom = *s.domain();
  const int N = dom.dim();
  const double D = dom.inradius();
  const auto a = s.phi_indices(), b = s.psi_indices();
  const double num = detail::min_pow(std::abs(d), b.l, b.m) * s.psi().value(1.0) * ball_volume(N, 0.5 * D);
  const double nd = constant_norm(s, d / D);
  return num / (std::pow(2.0 * N, a.m) * detail::max_pow(nd, a.l, a.m));
}

/// max{C1^l1, C1^m1} max{r^{l1/l}, r^{l1/m}, r^{m1/l}, r^{m1/m}}.
[[nodiscard]] inline double w_tilde_r(const EnergySetup& s, double r, double c1) {
  if (!(r > 0.0)) throw DomainError("w_tilde_r: r must be positive");
  if (!(c1 > 0.0)) throw DomainError("w_tilde_r: C1 must be positive");
  const auto a = s.phi_indices(), b = s.psi_indices();
  const double inner = std::max(detail::max_pow(r, b.l / a.l, b.l / a.m), detail::max_pow(r, b.m / a.l, b.m / a.m));
  return detail::max_pow(c1, b.l, b.m) * inner;
}

/// Poincare constant for the setup's norms from random smooth candidates.
[[nodiscard]] inline double poincare_constant(const EnergySetup& s, int trials = 64, std::uint64_t seed = 42) {
  return poincare_estimate(s.phi(), s.psi(), s.w(), s.w1(), s.domain(), trials, seed).constant;
}

struct SupSample {
  double sup = 0.0;                 ///< max sampled J on {I = r}
  std::vector<double> values;       ///< J of every sample
};

/// J over the principal bump and `samples` - 1 random zero-trace functions, each rescaled onto {I = r}.
[[nodiscard]] inline SupSample sample_sup_J(const EnergySetup& s, double r, int samples, std::uint64_t seed = 42) {
  if (!(r > 0.0)) throw DomainError("sample_sup_J: r must be positive");
  std::mt19937_64 rng(seed);
  SupSample out;
  out.values.reserve(static_cast<std::size_t>(std::max(samples, 0)));
  for (int t = 0; t < samples; ++t) {
    const GridFunction u = t == 0 ? default_init(s) : random_smooth(s.domain(), rng, 1 + t % 6);
    if (u.is_zero() || !(energy_I(s, u) > 0.0)) continue;
    const double j = energy_J(s, project_to_energy(s, u, r));
    out.values.push_back(j);
    out.sup = std::max(out.sup, j);
  }
  if (!(out.sup > 0.0)) throw RangeError("sample_sup_J: every sample was degenerate");
  return out;
}

struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;
  double sup_J_r = 0.0;
  [[nodiscard]] bool nonempty() const noexcept { return lo < hi; }
};

/// (I(v_d)/J(v_d), r / sampled sup_{I<=r} J).
[[nodiscard]] inline LambdaInterval lambda_interval(const EnergySetup& s, double d, double r, int samples,
                                                    std::uint64_t seed = 42) {
  const GridFunction v = build_test_function(s, d);
  LambdaInterval out;
  out.lo = test_energy(s, d) / energy_J(s, v);
  out.sup_J_r = sample_sup_J(s, r, samples, seed).sup;
  out.hi = r / out.sup_J_r;
  return out;
}

/// Threshold for r: min{||c d/D||^l, ||c d/D||^m} over the domain, c = 2 or 2N.
[[nodiscard]] inline double r_threshold(const EnergySetup& s, double d, bool proof_variant = false) {
  const auto a = s.phi_indices();
  const double c = proof_variant ? 2.0 * s.domain()->dim() : 2.0;
  return detail::min_pow(constant_norm(s, c * d / s.domain()->inradius()), a.l, a.m);
}

/// Both hypotheses on (d, r): r below the threshold and w~_r < gamma_d.
[[nodiscard]] inline bool admissible(const EnergySetup& s, double d, double r, double c1, bool proof_variant = false) {
  return r < r_threshold(s, d, proof_variant) && w_tilde_r(s, r, c1) < gamma_d(s, d);
}

namespace detail {

/// Descent on E = I - lambda J (Newton when it points downhill, secant-preconditioned
/// gradient otherwise). Returns the final iterate and whether the residual target was met.
inline std::pair<GridFunction, bool> descend_free_energy(const EnergySetup& s, const FreeIndex& fi, GridFunction u,
                                                         double lambda, double tol, int max_iter) {
  auto energy = [&](const GridFunction& f) { return energy_I(s, f) - lambda * energy_J(s, f); };
  double E = energy(u);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd gfull = gateaux_I(s, u).coefficients() - lambda * gateaux_J(s, u).coefficients();
    const double res = dual_norm(s, DualGridFunction(s.domain(), gfull));
    if (res <= tol * (1.0 + std::abs(E))) return {std::move(u), true};
    const Eigen::VectorXd g = fi.gather(gfull);
    std::optional<Eigen::VectorXd> dir;
    {
      SpMat H = hessian_I(s, fi, u);
      const Eigen::VectorXd hj = hessian_J_diag(s, fi, u);
      for (int i = 0; i < fi.size(); ++i) H.coeffRef(i, i) -= lambda * hj[i];
      Eigen::SimplicialLDLT<SpMat> ldlt(H);
      if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd dn = ldlt.solve(g);
        if (dn.allFinite() && g.dot(dn) > 0.0) dir = std::move(dn);
      }
    }
    if (!dir) {
      Eigen::SimplicialLDLT<SpMat> ldlt(secant_stiffness(s, fi, u, 100.0));
      if (ldlt.info() != Eigen::Success) break;
      dir = ldlt.solve(g);
    }
    const double slope = g.dot(*dir);
    if (!(slope > 0.0)) break;
    const Eigen::VectorXd dfull = fi.scatter(*dir, s.domain()->size());
    bool accepted = false;
    double t = 1.0;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      GridFunction cand = s.function(u.values() - t * dfull);
      const double En = energy(cand);
      if (En <= E - 1e-4 * t * slope) {
        u = std::move(cand);
        E = En;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  const Eigen::VectorXd gfull = gateaux_I(s, u).coefficients() - lambda * gateaux_J(s, u).coefficients();
  const bool ok = dual_norm(s, DualGridFunction(s.domain(), gfull)) <= tol * (1.0 + std::abs(E));
  return {std::move(u), ok};
}

}  // namespace detail

/// Advisory count of distinct critical points of I - lambda J found by
/// multi-start descent; the trivial point u = 0 counts once.
[[nodiscard]] inline int count_critical_points(const EnergySetup& s, double lambda, int starts,
                                               std::uint64_t seed = 42, double tol = 1e-8) {
  if (starts <= 0) return 0;
  const detail::FreeIndex fi(s);
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> amp(0.0, 1.0);
  std::vector<GridFunction> found;
  std::vector<double> norms;
  for (int st = 0; st < starts; ++st) {
    GridFunction u0 = random_smooth(s.domain(), rng, 1 + st % 5).scaled(amp(rng));
    if (u0.is_zero()) continue;
    auto [u, ok] = detail::descend_free_energy(s, fi, std::move(u0), lambda, tol, 2000);
    if (!ok) continue;
    const double nu = w_norm(s, u);
    if (nu <= 1e-3) continue;  // fell into the trivial point
    bool fresh = true;
    for (std::size_t j = 0; j < found.size() && fresh; ++j) {
      const double scale = std::max({1.0, nu, norms[j]});
      if (w_norm(s, GridFunction(s.domain(), u.values() - found[j].values())) <= 1e-3 * scale) fresh = false;
    }
    if (fresh) {
      found.push_back(std::move(u));
      norms.push_back(nu);
    }
  }
  return 1 + static_cast<int>(found.size());
}

struct RegionOptions {
  int samples = 1000;                 ///< random functions behind the sampled sup of J
  std::optional<double> c1;           ///< Poincare constant; estimated when empty
  int poincare_trials = 64;
  std::uint64_t seed = 42;
  bool proof_variant = false;         ///< use ||2N d/D|| in the r threshold
  int critical_starts = 0;            ///< 0 skips the critical-point probe
};

struct RegionReport {
  double d = 0.0;
  double r = 0.0;
  int dim = 0;
  double D = 0.0;
  bool proof_variant = false;
  double I_vd = 0.0;               ///< exact ramp gradient on the annulus nodes
  double I_vd_stencil = 0.0;       ///< energy_I of the nodal v_d
  double J_vd = 0.0;
  double J_vd_lower = 0.0;         ///< min{|d|^l1, |d|^m1} Psi(1) vol B(D/2)
  double sandwich_lo = 0.0;
  double sandwich_hi = 0.0;
  bool sandwich_holds = false;
  double norm_2d_D_domain = 0.0;
  double norm_2d_D_annulus = 0.0;
  double norm_d_D_domain = 0.0;
  double r_threshold = 0.0;
  double gamma_d = 0.0;
  double c1 = 0.0;
  double w_tilde_r = 0.0;
  bool admissible = false;
  bool sampled = false;            ///< sup_J_r and lambda_hi were computed
  int samples = 0;
  double sup_J_r = 0.0;
  double chain_bound = 0.0;        ///< r * w~_r
  int chain_violations = 0;        ///< samples with J > r * w~_r
  int bound_violations = 0;        ///< samples with J > w~_r
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  bool nonempty = false;
  std::optional<int> critical_points;
};

/// Every quantity of the three-solution region for one (d, r).
[[nodiscard]] inline RegionReport evaluate_region(const EnergySetup& s, double d, double r, const RegionOptions& o,
                                                  bool sample = true) {
  detail::require_plane_or_space(s, "evaluate_region");
  if (!(r > 0.0)) throw DomainError("evaluate_region: r must be positive");
  const GridFunction v = build_test_function(s, d);
  const auto& dom = *s.domain();
  const auto b = s.psi_indices();
  RegionReport rep;
  rep.d = d;
  rep.r = r;
  rep.dim = dom.dim();
  rep.D = dom.inradius();
  rep.proof_variant = o.proof_variant;
  rep.I_vd = test_energy(s, d);
  rep.I_vd_stencil = energy_I(s, v);
  rep.J_vd = energy_J(s, v);
  rep.J_vd_lower = detail::min_pow(std::abs(d), b.l, b.m) * s.psi().value(1.0) * ball_volume(rep.dim, 0.5 * rep.D);
  const auto sandwich = energy_bounds(s, d);
  rep.sandwich_lo = sandwich.lo;
  rep.sandwich_hi = sandwich.hi;
  rep.sandwich_holds = sandwich.lo <= rep.I_vd * (1 + 1e-9) && rep.I_vd <= sandwich.hi * (1 + 1e-9);
  rep.norm_2d_D_domain = constant_norm(s, 2.0 * d / rep.D);
  rep.norm_2d_D_annulus = annulus_constant_norm(s, 2.0 * d / rep.D);
  rep.norm_d_D_domain = constant_norm(s, d / rep.D);
  rep.r_threshold = r_threshold(s, d, o.proof_variant);
  rep.gamma_d = gamma_d(s, d);
  rep.c1 = o.c1 ? *o.c1 : poincare_constant(s, o.poincare_trials, o.seed);
  rep.w_tilde_r = w_tilde_r(s, r, rep.c1);
  rep.admissible = r < rep.r_threshold && rep.w_tilde_r < rep.gamma_d;
  rep.lambda_lo = rep.I_vd / rep.J_vd;
  rep.chain_bound = r * rep.w_tilde_r;
  if (sample) {
    const auto sup = sample_sup_J(s, r, o.samples, o.seed);
    rep.sampled = true;
    rep.samples = static_cast<int>(sup.values.size());
    rep.sup_J_r = sup.sup;
    for (double j : sup.values) {
      if (j > rep.chain_bound * (1.0 + 1e-9)) ++rep.chain_violations;
      if (j > rep.w_tilde_r * (1.0 + 1e-9)) ++rep.bound_violations;
    }
    rep.lambda_hi = r / sup.sup;
    rep.nonempty = rep.lambda_lo < rep.lambda_hi;
    if (o.critical_starts > 0 && rep.nonempty)
      rep.critical_points = count_critical_points(s, 0.5 * (rep.lambda_lo + rep.lambda_hi), o.critical_starts, o.seed);
  }
  return rep;
}

struct GridSearch {
  std::vector<RegionReport> rows;
  std::optional<std::size_t> chosen;  ///< admissible row with the largest r, then smallest |d|
};

/// Evaluates every (d, r) pair without sampling, then samples the chosen
/// admissible pair (or every admissible pair when `sample_all`).
[[nodiscard]] inline GridSearch region_grid_search(const EnergySetup& s, const std::vector<double>& ds,
                                                   const std::vector<double>& rs, RegionOptions o,
                                                   bool sample_all = false) {
  if (!o.c1) o.c1 = poincare_constant(s, o.poincare_trials, o.seed);
  GridSearch out;
  out.rows.reserve(ds.size() * rs.size());
  for (double d : ds)
    for (double r : rs) out.rows.push_back(evaluate_region(s, d, r, o, false));
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    if (!row.admissible) continue;
    if (!out.chosen) {
      out.chosen = i;
      continue;
    }
    const auto& best = out.rows[*out.chosen];
    if (row.r > best.r || (row.r == best.r && std::abs(row.d) < std::abs(best.d))) out.chosen = i;
  }
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const bool pick = sample_all ? out.rows[i].admissible : out.chosen == i;
    if (pick) out.rows[i] = evaluate_region(s, out.rows[i].d, out.rows[i].r, o, true);
  }
  return out;
}

struct RefinementRow {
  int n = 0;
  double h = 0.0;
  double gamma_d = 0.0;
  double w_tilde_r = 0.0;
  double norm_2d_D_domain = 0.0;
  double I_vd = 0.0;
};

/// gamma_d, w~_r and the norms under grid refinement, C1 held fixed.
[[nodiscard]] inline std::vector<RefinementRow> refinement_table(
    const std::function<EnergySetup(int)>& make_setup, const std::vector<int>& sizes, double d, double r, double c1) {
  std::vector<RefinementRow> rows;
  for (int n : sizes) {
    const EnergySetup s = make_setup(n);
    rows.push_back({n, s.domain()->h(), gamma_d(s, d), w_tilde_r(s, r, c1),
                    constant_norm(s, 2.0 * d / s.domain()->inradius()), test_energy(s, d)});
  }
  return rows;
}

/// Column names matching region_csv_row.
[[nodiscard]] inline std::string region_csv_header() {
  return "d,r,dim,D,proof_variant,I_vd,I_vd_stencil,J_vd,J_vd_lower,sandwich_lo,sandwich_hi,sandwich_holds,norm_2d_D_domain,"
         "norm_2d_D_annulus,norm_d_D_domain,r_threshold,gamma_d,c1,w_tilde_r,admissible,sampled,samples,sup_J_r,"
         "chain_bound,chain_violations,bound_violations,lambda_lo,lambda_hi,nonempty,critical_points";
}

[[nodiscard]] inline std::string region_csv_row(const RegionReport& r) {
  std::ostringstream os;
  os.precision(12);
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << r.d << ',' << r.r << ',' << r.dim << ',' << r.D << ',' << b(r.proof_variant) << ',' << r.I_vd << ','
     << r.I_vd_stencil << ',' << r.J_vd << ',' << r.J_vd_lower << ',' << r.sandwich_lo << ',' << r.sandwich_hi << ','
     << b(r.sandwich_holds) << ',' << r.norm_2d_D_domain << ',' << r.norm_2d_D_annulus << ',' << r.norm_d_D_domain << ','
     << r.r_threshold << ',' << r.gamma_d << ',' << r.c1 << ',' << r.w_tilde_r << ',' << b(r.admissible) << ','
     << b(r.sampled) << ',' << r.samples << ',' << r.sup_J_r << ',' << r.chain_bound << ',' << r.chain_violations
     << ',' << r.bound_violations << ',' << r.lambda_lo << ',' << r.lambda_hi << ',' << b(r.nonempty) << ',';
  if (r.critical_points) os << *r.critical_points;
  return os.str();
}

/// Human-readable block for one report.
[[nodiscard]] inline std::string region_pretty(const RegionReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << "(d, r) = (" << r.d << ", " << r.r << ")  N = " << r.dim << "  D = " << r.D
     << (r.proof_variant ? "  [2N threshold]" : "") << '\n'
     << "  I(v_d) = " << r.I_vd << " (stencil " << r.I_vd_stencil << ")  J(v_d) = " << r.J_vd
     << " >= " << r.J_vd_lower << '\n'
     << "  sandwich [" << r.sandwich_lo << ", " << r.sandwich_hi << "] " << (r.sandwich_holds ? "holds" : "FAILS") << '\n'
     << "  ||2d/D|| domain " << r.norm_2d_D_domain << ", annulus " << r.norm_2d_D_annulus << '\n'
     << "  r < " << r.r_threshold << " : " << (r.r < r.r_threshold ? "yes" : "no") << '\n'
     << "  w~_r = " << r.w_tilde_r << " (C1 = " << r.c1 << ")  gamma_d = " << r.gamma_d << '\n'
     << "  admissible: " << (r.admissible ? "yes" : "no") << '\n';
  if (r.sampled) {
    os << "  sampled sup J on {I <= r} = " << r.sup_J_r << " over " << r.samples << " samples\n"
       << "  r * w~_r = " << r.chain_bound << " exceeded by " << r.chain_violations << " samples; w~_r exceeded by "
       << r.bound_violations << '\n'
       << "  lambda interval (" << r.lambda_lo << ", " << r.lambda_hi << ") " << (r.nonempty ? "nonempty" : "EMPTY")
       << '\n';
    if (r.critical_points) os << "  critical points found: " << *r.critical_points << '\n';
  } else {
    os << "  lambda lower end " << r.lambda_lo << " (upper end not sampled)\n";
  }
  return os.str();
}

}  // namespace orlicz
