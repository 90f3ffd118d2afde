// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "orlicz/errors.hpp"
#include "orlicz/functionals.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/norms.hpp"

namespace orlicz {

struct SolverOptions {
  double tol = 1e-8;           ///< stop when residual <= tol * (1 + I(u))
  long max_iter = 100000;
  bool onesigned = true;
  std::uint64_t seed = 42;
  int starts = 8;
  double armijo = 1e-4;        ///< sufficient-decrease constant
  double backtrack = 0.5;
  double initial_step = 1.0;
  double clamp = 100.0;        ///< preconditioner coefficients kept within [1/clamp, clamp] * mean
  bool polish = true;          ///< finish with bordered Newton steps
  int max_polish = 30;
};

struct EigenPair {
  double lambda = 0.0;
  GridFunction u;
  double alpha = 0.0;
  double level = 0.0;     ///< I(u)
  double residual = 0.0;  ///< dual norm of I'(u) - lambda J'(u)
  long iterations = 0;
  std::vector<double> history;  ///< I after each accepted step, starting with the projected init
};

/// Raised when the iteration budget runs out before the residual target is met.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, EigenPair last, std::vector<double> residuals)
      : std::runtime_error(what), last_(std::move(last)), residuals_(std::move(residuals)) {}
  [[nodiscard]] const EigenPair& last() const noexcept { return last_; }
  [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return residuals_; }

 private:
  EigenPair last_;
  std::vector<double> residuals_;
};

/// <I'(u), u> / <J'(u), u>.
[[nodiscard]] inline double rayleigh_multiplier(const EnergySetup& s, const GridFunction& u) {
  if (u.is_zero()) throw DomainError("rayleigh_multiplier: u vanishes");
  const double den = gateaux_J(s, u)(u);
  if (!(den > 0.0)) throw DomainError("rayleigh_multiplier: <J'(u), u> = 0");
  return gateaux_I(s, u)(u) / den;
}

/// Dual norm of I'(u) - lambda J'(u).
[[nodiscard]] inline double residual(const EnergySetup& s, const GridFunction& u, double lambda) {
  return dual_norm(s, gateaux_I(s, u) - gateaux_J(s, u) * lambda);
}

[[nodiscard]] inline double residual(const EnergySetup& s, const EigenPair& pair) {
  return residual(s, pair.u, pair.lambda);
}

/// Sign changes along the node order of a 1D function (zeros skipped).
[[nodiscard]] inline int sign_changes(const GridFunction& u) {
  int changes = 0, last = 0;
  for (Eigen::Index k = 0; k < u.values().size(); ++k) {
    const double v = u.values()[k];
    const int sg = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;

/// Numbering of the free nodes of a setup.
struct FreeIndex {
  explicit FreeIndex(const EnergySetup& s) : of(static_cast<std::size_t>(s.domain()->size()), -1), nodes(s.free_nodes()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) of[static_cast<std::size_t>(nodes[i])] = static_cast<int>(i);
  }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(nodes.size()); }
  [[nodiscard]] Eigen::VectorXd gather(const Eigen::VectorXd& full) const {
    Eigen::VectorXd r(size());
    for (int i = 0; i < size(); ++i) r[i] = full[nodes[static_cast<std::size_t>(i)]];
    return r;
  }
  [[nodiscard]] Eigen::VectorXd scatter(const Eigen::VectorXd& part, int n) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < size(); ++i) r[nodes[static_cast<std::size_t>(i)]] = part[i];
    return r;
  }
  std::vector<int> of;
  std::vector<int> nodes;
};

/// Adds area * G^T A G for a 2x2 element matrix A into the free-node triplets.
inline void add_element(std::vector<Eigen::Triplet<double>>& trip, const FreeIndex& fi, const Element& el,
                        const double A[2][2], double scale) {
  for (int a = 0; a < el.count; ++a) {
    const int ia = fi.of[static_cast<std::size_t>(el.vertex[static_cast<std::size_t>(a)])];
    if (ia < 0) continue;
    const auto& ga = el.grad_coef[static_cast<std::size_t>(a)];
    const double Aga0 = A[0][0] * ga[0] + A[0][1] * ga[1];
    const double Aga1 = A[1][0] * ga[0] + A[1][1] * ga[1];
    for (int b = 0; b < el.count; ++b) {
      const int ib = fi.of[static_cast<std::size_t>(el.vertex[static_cast<std::size_t>(b)])];
      if (ib < 0) continue;
      const auto& gb = el.grad_coef[static_cast<std::size_t>(b)];
      trip.emplace_back(ia, ib, scale * (Aga0 * gb[0] + Aga1 * gb[1]));
    }
  }
}

/// Secant stiffness sum omega phi(|g|)/|g| G^T G, coefficients clamped around their energy mean.
inline SpMat secant_stiffness(const EnergySetup& s, const FreeIndex& fi, const GridFunction& u, double clamp) {
  const auto& els = s.domain()->elements();
  const auto& om = s.omega_on_elements();
  std::vector<double> kappa(els.size(), -1.0);
  double num = 0.0, den = 0.0;
  for (std::size_t e = 0; e < els.size(); ++e) {
    const double g = u.gradient_magnitude(els[e]);
    if (g > 0.0) {
      kappa[e] = s.phi().derivative(g) / g;
      num += els[e].area * om[e] * kappa[e] * g * g;
      den += els[e].area * om[e] * g * g;
    }
  }
  const double ref = den > 0.0 ? num / den : 1.0;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(els.size() * 9);
  for (std::size_t e = 0; e < els.size(); ++e) {
    double k = kappa[e] < 0.0 ? s.phi().second_derivative(0.0) : kappa[e];
    if (!std::isfinite(k)) k = clamp * ref;
    k = std::clamp(k, ref / clamp, ref * clamp);
    const double A[2][2] = {{k, 0.0}, {0.0, k}};
    add_element(trip, fi, els[e], A, els[e].area * om[e]);
  }
  SpMat K(fi.size(), fi.size());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

/// Tangent (second-derivative) matrix of I at u.
inline SpMat hessian_I(const EnergySetup& s, const FreeIndex& fi, const GridFunction& u) {
  const auto& els = s.domain()->elements();
  const auto& om = s.omega_on_elements();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(els.size() * 9);
  for (std::size_t e = 0; e < els.size(); ++e) {
    const auto g = u.gradient(els[e]);
    const double mag = std::hypot(g[0], g[1]);
    double A[2][2];
    if (mag == 0.0) {
      double d2 = s.phi().second_derivative(0.0);
      if (!std::isfinite(d2)) d2 = 1e12;
      A[0][0] = A[1][1] = d2;
      A[0][1] = A[1][0] = 0.0;
    } else {
      const double k = s.phi().derivative(mag) / mag;
      const double d2 = s.phi().second_derivative(mag);
      const double n0 = g[0] / mag, n1 = g[1] / mag;
      A[0][0] = k + (d2 - k) * n0 * n0;
      A[1][1] = k + (d2 - k) * n1 * n1;
      A[0][1] = A[1][0] = (d2 - k) * n0 * n1;
    }
    add_element(trip, fi, els[e], A, els[e].area * om[e]);
  }
  SpMat H(fi.size(), fi.size());
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

/// Diagonal of the second derivative of J at u.
inline Eigen::VectorXd hessian_J_diag(const EnergySetup& s, const FreeIndex& fi, const GridFunction& u) {
  Eigen::VectorXd d(fi.size());
  for (int i = 0; i < fi.size(); ++i) {
    const int k = fi.nodes[static_cast<std::size_t>(i)];
    double v = s.psi().second_derivative(std::abs(u[k]));
    if (!std::isfinite(v)) v = 1e12;
    d[i] = s.mass()[k] * v;
  }
  return d;
}

inline double relative_residual(const EnergySetup& s, const GridFunction& u, double& lambda, double& level) {
  lambda = rayleigh_multiplier(s, u);
  level = energy_I(s, u);
  return residual(s, u, lambda);
}

/// One bordered Newton step for I'(u) = lambda J'(u), J(u) = alpha; returns the raw update.
inline std::optional<Eigen::VectorXd> newton_direction(const EnergySetup& s, const FreeIndex& fi,
                                                       const GridFunction& u, double lambda, double alpha) {
  const int m = fi.size();
  const SpMat H = hessian_I(s, fi, u);
  const Eigen::VectorXd hj = hessian_J_diag(s, fi, u);
  const Eigen::VectorXd fI = fi.gather(gateaux_I(s, u).coefficients());
  const Eigen::VectorXd fJ = fi.gather(gateaux_J(s, u).coefficients());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(H.nonZeros() + 3 * m));
  for (int c = 0; c < H.outerSize(); ++c)
    for (SpMat::InnerIterator it(H, c); it; ++it) trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < m; ++i) {
    trip.emplace_back(i, i, -lambda * hj[i]);
    trip.emplace_back(i, m, -fJ[i]);
    trip.emplace_back(m, i, -fJ[i]);
  }
  SpMat B(m + 1, m + 1);
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(B);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = -(fI - lambda * fJ);
  rhs[m] = energy_J(s, u) - alpha;
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite()) return std::nullopt;
  return fi.scatter(sol.head(m), s.domain()->size());
}

/// Newton polish toward a critical point of I on {J = alpha}. With `monotone`,
/// a step is kept only if it does not raise I.
inline void newton_polish(const EnergySetup& s, const FreeIndex& fi, GridFunction& u, double alpha,
                          const SolverOptions& opts, bool monotone, long& iterations, std::vector<double>& history,
                          std::vector<double>& residuals) {
  double lambda = 0.0, level = 0.0;
  double res = relative_residual(s, u, lambda, level);
  int extra = 0;
  for (int it = 0; it < opts.max_polish; ++it) {
    const bool met = res <= opts.tol * (1.0 + level);
    if (met && ++extra > 2) break;
    const auto dir = newton_direction(s, fi, u, lambda, alpha);
    if (!dir) break;
    bool accepted = false;
    double t = 1.0;
    for (int bt = 0; bt < 8 && !accepted; ++bt, t *= 0.5) {
      Eigen::VectorXd v = u.values() + t * *dir;
      s.restrict_to_free(v);
      if (!v.allFinite() || v.isZero(0.0)) continue;
      GridFunction cand(s.domain(), std::move(v));
      try {
        cand = project_to_level(s, cand, alpha);
      } catch (const DomainError&) {
        continue;
      }
      double l2 = 0.0, lev2 = 0.0;
      const double r2 = relative_residual(s, cand, l2, lev2);
      if (!(r2 < res)) continue;
      if (monotone && lev2 > level * (1.0 + 1e-13)) continue;
      u = std::move(cand);
      res = r2;
      lambda = l2;
      level = lev2;
      accepted = true;
    }
    if (!accepted) break;
    ++iterations;
    history.push_back(level);
    residuals.push_back(res);
  }
}

/// Objective minimized by the descent: I plus an optional penalty with gradient.
struct Penalty {
  std::function<double(const GridFunction&)> value;
  std::function<Eigen::VectorXd(const GridFunction&)> gradient;
};

/// Preconditioned projected-gradient descent of I (+ penalty) on {J = alpha}.
inline GridFunction projected_descent(const EnergySetup& s, const FreeIndex& fi, GridFunction u, double alpha,
                                      const SolverOptions& opts, const Penalty* pen, long& iterations,
                                      std::vector<double>& history, std::vector<double>& residuals,
                                      double switch_ratio) {
  auto objective = [&](const GridFunction& f) { return energy_I(s, f) + (pen ? pen->value(f) : 0.0); };
  double E = objective(u);
  int stalls = 0;
  while (iterations < opts.max_iter) {
    Eigen::VectorXd fI = gateaux_I(s, u).coefficients();
    const Eigen::VectorXd fJfull = gateaux_J(s, u).coefficients();
    if (pen) fI += pen->gradient(u);
    if (!pen) {
      const double lam = fI.dot(u.values()) / fJfull.dot(u.values());
      const double res = dual_norm(s, DualGridFunction(s.domain(), fI - lam * fJfull));
      const double level = energy_I(s, u);
      residuals.push_back(res);
      if (res <= switch_ratio * opts.tol * (1.0 + level)) break;
    }
    const SpMat K = secant_stiffness(s, fi, u, opts.clamp);
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success) break;
    const Eigen::VectorXd gI = fi.gather(fI), gJ = fi.gather(fJfull);
    const Eigen::VectorXd dI = ldlt.solve(gI), dJ = ldlt.solve(gJ);
    const double beta = gJ.dot(dI) / gJ.dot(dJ);
    const Eigen::VectorXd d = dI - beta * dJ;
    const double slope = gI.dot(d);
    if (!(slope > 0.0)) break;
    const Eigen::VectorXd dfull = fi.scatter(d, s.domain()->size());
    double t = opts.initial_step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, t *= opts.backtrack) {
      Eigen::VectorXd v = u.values() - t * dfull;
      s.restrict_to_free(v);
      if (v.isZero(0.0)) continue;
      GridFunction cand(s.domain(), std::move(v));
      try {
        cand = project_to_level(s, cand, alpha);
      } catch (const DomainError&) {
        continue;
      }
      const double En = objective(cand);
      if (En <= E - opts.armijo * t * slope) {
        const double drop = (E - En) / std::max(std::abs(E), 1e-300);
        u = std::move(cand);
        E = En;
        accepted = true;
        stalls = drop < 1e-12 ? stalls + 1 : 0;
        break;
      }
    }
    if (!accepted) break;
    ++iterations;
    history.push_back(energy_I(s, u));
    if (stalls >= 5) break;
  }
  return u;
}

inline EigenPair make_pair(const EnergySetup& s, GridFunction u, double alpha, long iterations,
                           std::vector<double> history) {
  EigenPair p{0.0, std::move(u), alpha, 0.0, 0.0, iterations, std::move(history)};
  p.residual = relative_residual(s, p.u, p.lambda, p.level);
  return p;
}

}  // namespace detail

/// Default initial guess: the principal sine/cosine bump of the domain.
[[nodiscard]] inline GridFunction default_init(const EnergySetup& s) {
  Eigen::VectorXd v = principal_bump(s.domain()).values();
  s.restrict_to_free(v);
  return GridFunction(s.domain(), std::move(v));
}

/// Minimizes I on {J = alpha} from `init`; lambda is the Rayleigh multiplier of the result.
[[nodiscard]] inline EigenPair minimize_on_level(const EnergySetup& s, double alpha, const GridFunction& init,
                                                 const SolverOptions& opts = {}) {
  if (!(alpha > 0.0)) throw DomainError("minimize_on_level: alpha must be positive");
  require_same_domain(s.domain(), init.domain(), "minimize_on_level");
  Eigen::VectorXd v0 = opts.onesigned ? init.values().cwiseAbs() : init.values();
  s.restrict_to_free(v0);
  if (v0.isZero(0.0)) throw DomainError("minimize_on_level: initial guess vanishes on the free nodes");
  const detail::FreeIndex fi(s);
  GridFunction u = project_to_level(s, GridFunction(s.domain(), std::move(v0)), alpha);
  long iterations = 0;
  std::vector<double> history{energy_I(s, u)}, residuals;
  // descent hands over to Newton once the residual is within a few orders of the target
  const double switch_ratio = opts.polish ? 1e4 : 1.0;
  u = detail::projected_descent(s, fi, std::move(u), alpha, opts, nullptr, iterations, history, residuals,
                                switch_ratio);
  if (opts.polish) {
    detail::newton_polish(s, fi, u, alpha, opts, true, iterations, history, residuals);
    double lambda = 0.0, level = 0.0;
    if (detail::relative_residual(s, u, lambda, level) > opts.tol * (1.0 + level) && iterations < opts.max_iter) {
      // Newton could not finish from here: resume plain descent to the full target
      u = detail::projected_descent(s, fi, std::move(u), alpha, opts, nullptr, iterations, history, residuals, 1.0);
      detail::newton_polish(s, fi, u, alpha, opts, true, iterations, history, residuals);
    }
  }
  if (opts.onesigned) u = u.abs();
  EigenPair pair = detail::make_pair(s, std::move(u), alpha, iterations, std::move(history));
  if (!(pair.residual <= opts.tol * (1.0 + pair.level))) {
    throw NonConvergence("minimize_on_level: residual " + models::fmt_num(pair.residual) + " above tolerance after " +
                             std::to_string(pair.iterations) + " iterations",
                         std::move(pair), std::move(residuals));
  }
  return pair;
}

[[nodiscard]] inline EigenPair minimize_on_level(const EnergySetup& s, double alpha, const SolverOptions& opts = {}) {
  return minimize_on_level(s, alpha, default_init(s), opts);
}

struct SweepRow {
  double alpha = 0.0;
  std::optional<EigenPair> pair;
  std::string error;  ///< non-empty when the solve failed
};

/// minimize_on_level for each alpha, warm-started from the previous minimizer.
[[nodiscard]] inline std::vector<SweepRow> spectrum_sweep(const EnergySetup& s, const std::vector<double>& alphas,
                                                          const SolverOptions& opts = {}) {
  std::vector<SweepRow> rows;
  std::optional<GridFunction> warm;
  for (double a : alphas) {
    SweepRow row;
    row.alpha = a;
    try {
      row.pair = minimize_on_level(s, a, warm ? *warm : default_init(s), opts);
      warm = row.pair->u;
    } catch (const NonConvergence& e) {
      row.error = e.what();
      warm = e.last().u;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct LSLevel {
  int k = 0;
  double c_k_alpha = 0.0;  ///< J(s u_k) with I(s u_k) = alpha
  EigenPair pair;
  std::string method;      ///< "nodal-1d" or "deflation-2d"
  bool reliable = true;
  std::string note;
};

namespace detail {

/// Max-min level of a critical direction: J at the multiple of u with I = alpha.
inline double ls_level(const EnergySetup& s, const GridFunction& u, double alpha) {
  return energy_J(s, project_to_energy(s, u, alpha));
}

/// Discrete 1D equation marched from the left wall with u[1] = c; the flux
/// omega phi(|u'|) sgn(u') drops by lambda * mass * psi(|u|) sgn(u) at each node.
struct Shot {
  Eigen::VectorXd u;
  int changes = 0;
  bool finite = true;
};

inline Shot shoot_1d(const EnergySetup& s, double c, double lambda) {
  const auto& dom = *s.domain();
  const int n = dom.size();
  const double h = dom.hx();
  const auto& om = s.omega_on_elements();
  Shot out;
  out.u = Eigen::VectorXd::Zero(n);
  out.u[1] = c;
  double flux = om[0] * s.phi().derivative(std::abs(c) / h) * (c > 0.0 ? 1.0 : -1.0);
  for (int i = 1; i + 1 < n; ++i) {
    const double ui = out.u[i];
    if (ui != 0.0) flux -= lambda * s.mass()[i] * s.psi().derivative(std::abs(ui)) * (ui > 0.0 ? 1.0 : -1.0);
    const double y = std::abs(flux) / om[static_cast<std::size_t>(i)];
    const double g = (flux >= 0.0 ? 1.0 : -1.0) * s.phi().inverse_derivative(y);
    out.u[i + 1] = ui + h * g;
    if (!std::isfinite(out.u[i + 1])) {
      out.finite = false;
      break;
    }
  }
  int last = 0;
  for (int i = 1; i < n; ++i) {
    const double v = out.u[i];
    const int sg = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (sg != 0 && last != 0 && sg != last) ++out.changes;
    if (sg != 0) last = sg;
  }
  return out;
}

/// k-th discrete eigenfunction through u[1] = c: bisection for the smallest
/// lambda whose shot changes sign k times, seeded near `guess`.
inline std::optional<std::pair<double, Eigen::VectorXd>> shoot_kth(const EnergySetup& s, double c, int k,
                                                                   double guess) {
  double lo = 0.0, hi = std::max(guess, 1e-12);
  auto enough = [&](double lam) {
    const Shot sh = shoot_1d(s, c, lam);
    return !sh.finite || sh.changes >= k;
  };
  int grow = 0;
  while (!enough(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200) return std::nullopt;
  }
  if (lo == 0.0) {
    lo = hi;
    while (lo > 1e-300 && enough(lo)) {
      hi = lo;
      lo *= 0.5;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (enough(mid)) hi = mid; else lo = mid;
  }
  Shot a = shoot_1d(s, c, lo), b = shoot_1d(s, c, hi);
  const int n = s.domain()->size();
  const bool use_b = b.finite && (!a.finite || std::abs(b.u[n - 1]) < std::abs(a.u[n - 1]));
  Shot& best = use_b ? b : a;
  if (!best.finite) return std::nullopt;
  best.u[n - 1] = 0.0;
  return std::make_pair(use_b ? hi : lo, std::move(best.u));
}

/// Exact discrete relaxation in 1D: shoot for the k-th eigenfunction and
/// adjust u[1] so that J = alpha.
inline std::optional<GridFunction> shooting_relax(const EnergySetup& s, const GridFunction& seed, double alpha,
                                                  int k) {
  if (s.domain()->dim() != 1 || static_cast<int>(s.free_nodes().size()) != s.domain()->size() - 2)
    return std::nullopt;
  double c = std::abs(seed[1]);
  if (!(c > 0.0)) c = seed.sup_norm() / s.domain()->size();
  double lam = rayleigh_multiplier(s, seed);
  auto eval = [&](double cc) -> std::optional<std::pair<double, Eigen::VectorXd>> {
    auto r = shoot_kth(s, cc, k, lam);
    if (r) lam = r->first;
    return r;
  };
  auto f = [&](const Eigen::VectorXd& u) {
    return std::log(energy_J(s, GridFunction(s.domain(), u))) - std::log(alpha);
  };
  auto r0 = eval(c);
  if (!r0) return std::nullopt;
  double x0 = std::log(c), f0 = f(r0->second);
  Eigen::VectorXd best = r0->second;
  double best_f = std::abs(f0);
  double x1 = x0 - 0.5 * f0;  // J grows at least like c^l with l >= 1
  for (int it = 0; it < 60 && best_f > 1e-14; ++it) {
    auto r1 = eval(std::exp(x1));
    if (!r1) return std::nullopt;
    const double f1 = f(r1->second);
    if (std::abs(f1) < best_f) {
      best_f = std::abs(f1);
      best = r1->second;
    }
    const double slope = (f1 - f0) / (x1 - x0);
    double x2 = slope > 0.0 ? x1 - f1 / slope : x1 - 0.5 * f1;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    if (std::abs(x1 - x0) < 1e-16) break;
  }
  Eigen::VectorXd v = best;
  s.restrict_to_free(v);
  return project_to_level(s, GridFunction(s.domain(), std::move(v)), alpha);
}

inline LSLevel nodal_level_1d(const EnergySetup& s, double alpha, int k, const SolverOptions& opts) {
  const auto& dom = *s.domain();
  const int n = dom.size();
  std::vector<int> cuts{0};
  for (int j = 1; j < k; ++j) cuts.push_back(static_cast<int>(std::lround(static_cast<double>(j) * (n - 1) / k)));
  cuts.push_back(n - 1);
  Eigen::VectorXd glued = Eigen::VectorXd::Zero(n);
  long iterations = 0;
  SolverOptions sub = opts;
  sub.onesigned = true;
  for (int j = 0; j < k; ++j) {
    std::vector<int> pinned;
    for (int node = 0; node < n; ++node)
      if (node <= cuts[static_cast<std::size_t>(j)] || node >= cuts[static_cast<std::size_t>(j + 1)]) pinned.push_back(node);
    const EnergySetup piece = s.with_pinned(pinned);
    if (piece.free_nodes().empty()) throw DomainError("ls_sequence: grid too coarse for k = " + std::to_string(k));
    const double a = dom.point(cuts[static_cast<std::size_t>(j)])[0];
    const double b = dom.point(cuts[static_cast<std::size_t>(j + 1)])[0];
    Eigen::VectorXd init = GridFunction::sample(s.domain(), [&](double x, double) {
      return x > a && x < b ? std::sin(std::numbers::pi * (x - a) / (b - a)) : 0.0;
    }).values();
    piece.restrict_to_free(init);
    const EigenPair part = minimize_on_level(piece, alpha / k, GridFunction(s.domain(), init), sub);
    iterations += part.iterations;
    glued += (j % 2 == 0 ? 1.0 : -1.0) * part.u.values();
  }
  GridFunction u = project_to_level(s, GridFunction(s.domain(), glued), alpha);
  std::vector<double> history{energy_I(s, u)}, residuals;
  if (auto relaxed = shooting_relax(s, u, alpha, k)) {
    u = std::move(*relaxed);
    history.push_back(energy_I(s, u));
    ++iterations;
  } else {
    const FreeIndex fi(s);
    newton_polish(s, fi, u, alpha, opts, false, iterations, history, residuals);
  }
  LSLevel lv;
  lv.k = k;
  lv.method = "nodal-1d";
  lv.pair = make_pair(s, std::move(u), alpha, iterations, std::move(history));
  lv.c_k_alpha = ls_level(s, lv.pair.u, alpha);
  if (lv.pair.residual > opts.tol * (1.0 + lv.pair.level)) {
    lv.reliable = false;
    lv.note = "residual above tolerance";
  }
  if (sign_changes(lv.pair.u) != k - 1) {
    lv.reliable = false;
    lv.note = "relaxed candidate has " + std::to_string(sign_changes(lv.pair.u)) + " sign changes";
  }
  return lv;
}

inline double m_dot(const EnergySetup& s, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (s.mass().array() * a.array() * b.array()).sum();
}

inline LSLevel deflated_level(const EnergySetup& s, double alpha, int k, const std::vector<LSLevel>& found,
                              const SolverOptions& opts) {
  std::vector<Eigen::VectorXd> prev;
  double lam_max = 0.0;
  for (const auto& lv : found) {
    Eigen::VectorXd v = lv.pair.u.values();
    v /= std::sqrt(m_dot(s, v, v));
    prev.push_back(std::move(v));
    lam_max = std::max(lam_max, lv.pair.lambda);
  }
  const double mu = 10.0 * lam_max;
  Penalty pen;
  pen.value = [&](const GridFunction& u) {
    double acc = 0.0;
    for (const auto& v : prev) acc += std::pow(m_dot(s, v, u.values()), 2);
    return 0.5 * mu * acc;
  };
  pen.gradient = [&](const GridFunction& u) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(u.values().size());
    for (const auto& v : prev) g += mu * m_dot(s, v, u.values()) * (s.mass().array() * v.array()).matrix();
    s.restrict_to_free(g);
    return g;
  };
  const FreeIndex fi(s);
  std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(k));
  std::optional<GridFunction> best;
  double best_E = std::numeric_limits<double>::infinity();
  long iterations = 0;
  SolverOptions desc = opts;
  desc.max_iter = std::min<long>(opts.max_iter, 2000);
  for (int st = 0; st < std::max(1, opts.starts); ++st) {
    GridFunction u0 = random_smooth(s.domain(), rng, 3 + k);
    Eigen::VectorXd v0 = u0.values();
    s.restrict_to_free(v0);
    if (v0.isZero(0.0)) continue;
    GridFunction u = project_to_level(s, GridFunction(s.domain(), v0), alpha);
    long its = 0;
    std::vector<double> hist, res;
    u = projected_descent(s, fi, std::move(u), alpha, desc, &pen, its, hist, res, 1.0);
    iterations += its;
    const double E = energy_I(s, u) + pen.value(u);
    if (E < best_E) {
      best_E = E;
      best = std::move(u);
    }
  }
  if (!best) throw DomainError("ls_sequence: every start vanished on the free nodes");
  GridFunction u = *best;
  std::vector<double> history{energy_I(s, u)}, residuals;
  newton_polish(s, fi, u, alpha, opts, false, iterations, history, residuals);
  LSLevel lv;
  lv.k = k;
  lv.method = "deflation-2d";
  lv.pair = make_pair(s, std::move(u), alpha, iterations, std::move(history));
  lv.c_k_alpha = ls_level(s, lv.pair.u, alpha);
  Eigen::VectorXd w = lv.pair.u.values();
  w /= std::sqrt(m_dot(s, w, w));
  for (std::size_t j = 0; j < prev.size(); ++j) {
    if (std::abs(m_dot(s, w, prev[j])) >= 0.99) {
      lv.reliable = false;
      lv.note = "collapsed onto level " + std::to_string(j + 1);
    }
  }
  if (lv.pair.residual > opts.tol * (1.0 + lv.pair.level)) {
    lv.reliable = false;
    if (lv.note.empty()) lv.note = "residual above tolerance";
  }
  return lv;
}

}  // namespace detail

/// Approximate Ljusternik-Schnirelmann levels k = 1..k_max on {J = alpha}.
/// 1D glues one-signed pieces on k equal subintervals; 2D uses penalized multi-start descent.
[[nodiscard]] inline std::vector<LSLevel> ls_sequence(const EnergySetup& s, double alpha, int k_max,
                                                      const SolverOptions& opts = {}) {
  if (k_max < 1) throw DomainError("ls_sequence: k_max must be >= 1");
  std::vector<LSLevel> out;
  {
    LSLevel first;
    first.k = 1;
    first.method = s.domain()->dim() == 1 ? "nodal-1d" : "deflation-2d";
    SolverOptions o = opts;
    o.onesigned = true;
    try {
      first.pair = minimize_on_level(s, alpha, o);
    } catch (const NonConvergence& e) {
      first.pair = e.last();
      first.reliable = false;
      first.note = e.what();
    }
    first.c_k_alpha = detail::ls_level(s, first.pair.u, alpha);
    out.push_back(std::move(first));
  }
  for (int k = 2; k <= k_max; ++k) {
    LSLevel lv = s.domain()->dim() == 1 ? detail::nodal_level_1d(s, alpha, k, opts)
                                        : detail::deflated_level(s, alpha, k, out, opts);
    if (lv.c_k_alpha > out.back().c_k_alpha * (1.0 + 1e-6)) {
      lv.reliable = false;
      if (lv.note.empty()) lv.note = "level above the previous one";
    }
    out.push_back(std::move(lv));
  }
  return out;
}

}  // namespace orlicz
