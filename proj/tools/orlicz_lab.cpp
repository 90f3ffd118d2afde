// SPDX-License-Identifier: Apache-2.0
// orlicz_lab: batch front end for the orlicz library.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orlicz/catalog.hpp"
#include "orlicz/conjugate.hpp"
#include "orlicz/eigensolver.hpp"
#include "orlicz/io.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/region.hpp"
#include "orlicz/young_analysis.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace orlicz;

namespace {

enum Exit : int { ok = 0, violation = 1, config_error = 2, numerical = 3 };

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool proof_variant = false;
};

struct Run {
  std::string command;
  RunConfig rc;
  fs::path out;
  int threads = 1;
  json summary;
  std::vector<std::string> violations;

  [[nodiscard]] std::string path(const std::string& file) const { return (out / file).string(); }
  void violate(const std::string& what) {
    violations.push_back(what);
    std::cerr << "contract violation: " << what << '\n';
  }
};

int thread_cap() {
  const char* env = std::getenv("ORLICZ_LAB_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("ORLICZ_LAB_THREADS", "expected a positive integer");
  return static_cast<int>(std::min<long>(v, 256));
}

std::vector<double> number_list(const YAML::Node& block, const std::string& where, const char* key) {
  const auto node = block[key];
  if (node && node.IsScalar()) return {config::get<double>(block, where, key)};
  return config::get<std::vector<double>>(block, where, key);
}

// ---------------------------------------------------------------- catalog

int cmd_catalog(Run& run) {
  CsvWriter csv(run.path("catalog.csv"), "catalog", "label,name,source,l,m,closed_form,delta2,m_bound,witness_t");
  json rows = json::array();
  std::printf("%-16s %-28s %-14s %10s %10s  %s\n", "label", "function", "source", "l", "m", "doubling");
  for (const auto& e : catalog()) {
    const auto r = classify(e);
    csv.row(r.label, r.name, r.source, r.l, r.m, r.closed_form, r.delta2, r.m_bound, r.witness_t);
    std::printf("%-16s %-28s %-14s %10s %10s  %s\n", r.label.c_str(), r.name.c_str(), r.source.c_str(),
                format_number(r.l).c_str(), format_number(r.m).c_str(),
                r.delta2 ? "satisfied" : ("violated (t = " + format_number(r.witness_t) + ")").c_str());
    rows.push_back({{"label", r.label}, {"name", r.name}, {"l", r.l}, {"m", r.delta2 ? json(r.m) : json("inf")},
                    {"delta2", r.delta2}});
  }
  run.summary["entries"] = rows;
  return ok;
}

// ---------------------------------------------------------------- check-young

int cmd_check_young(Run& run) {
  config::check_keys(run.rc.command, run.command, {"horizon"});
  const double horizon = config::get_or(run.rc.command, run.command, "horizon", 1e6);
  if (!run.rc.phi) throw ConfigError("phi", "missing");
  CsvWriter csv(run.path("check_young.csv"), "check-young",
                "role,name,l,m,closed_form,delta2,m_bound,witness_t,convex,growth_condition");
  json out = json::object();
  auto check = [&](const char* role, const YoungFunction& f) {
    const auto idx = simonenko_indices(f);
    const auto d2 = check_delta2(f, horizon);
    const bool convex = is_convex_sampled(f);
    const bool growth = 1.0 < idx.l && idx.l <= idx.m && d2.satisfied;
    csv.row(std::string(role), f.name(), idx.l, idx.m, idx.closed_form, d2.satisfied, d2.m_bound, d2.witness_t,
            convex, growth);
    std::cout << role << ": " << f.name() << "  (l, m) = (" << format_number(idx.l) << ", "
              << (d2.satisfied ? format_number(idx.m) : std::string("inf")) << ")  doubling "
              << (d2.satisfied ? "satisfied" : "violated") << (convex ? "" : "  NOT CONVEX") << '\n';
    out[role] = {{"name", f.name()},    {"l", idx.l},       {"m", d2.satisfied ? json(idx.m) : json("inf")},
                 {"delta2", d2.satisfied}, {"convex", convex}, {"growth_condition", growth}};
    if (!convex) run.violate(std::string(role) + " is not convex on the sampled range");
    if (!growth) run.violate(std::string(role) + " fails 1 < l <= m < inf");
  };
  check("phi", *run.rc.phi);
  if (run.rc.psi) {
    check("psi", *run.rc.psi);
    const bool dom = dominates_essentially(*run.rc.psi, *run.rc.phi, {0.5, 1.0, 2.0, 10.0}, horizon);
    out["psi_dominated_by_phi"] = dom;
    std::cout << "psi grows essentially slower than phi: " << (dom ? "yes" : "no") << '\n';
  }
  run.summary["check"] = out;
  return run.violations.empty() ? ok : violation;
}

// ---------------------------------------------------------------- conjugate

int cmd_conjugate(Run& run) {
  const auto& b = run.rc.command;
  config::check_keys(b, run.command, {"s", "s_min", "s_max", "points"});
  if (!run.rc.phi) throw ConfigError("phi", "missing");
  std::vector<double> s;
  if (b["s"]) {
    s = number_list(b, run.command, "s");
  } else {
    const double lo = config::get_or(b, run.command, "s_min", 1e-2);
    const double hi = config::get_or(b, run.command, "s_max", 1e2);
    const int n = config::get_or(b, run.command, "points", 9);
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError(run.command, "need 0 < s_min < s_max and points >= 2");
    s = log_grid(lo, hi, static_cast<std::size_t>(n));
  }
  const auto& phi = *run.rc.phi;
  const auto& table = conjugate_table(phi);
  const auto twice = double_conjugate(phi, *std::max_element(s.begin(), s.end()));
  CsvWriter csv(run.path("conjugate.csv"), "conjugate", "s,conjugate,sup_formula,rel_gap,double_conjugate,phi");
  double worst = 0.0, worst_inv = 0.0;
  for (double x : s) {
    if (!(x > 0.0)) throw ConfigError(run.command + ".s", "values must be positive");
    const double c = conjugate(phi, x), sup = table.sup_formula(x);
    const double gap = std::abs(c - sup) / std::max(std::abs(sup), 1e-300);
    const double back = twice(x), ref = phi(x);
    worst = std::max(worst, gap);
    worst_inv = std::max(worst_inv, std::abs(back - ref) / std::max(ref, 1e-300));
    csv.row(x, c, sup, gap, back, ref);
    std::cout << format_number(x) << '\t' << format_number(c) << '\n';
  }
  run.summary["phi"] = phi.name();
  run.summary["max_rel_gap"] = worst;
  run.summary["max_involution_error"] = worst_inv;
  if (worst > 1e-6) run.violate("table and sup formula differ by " + format_number(worst));
  if (worst_inv > 1e-5) run.violate("double conjugate differs from phi by " + format_number(worst_inv));
  return run.violations.empty() ? ok : violation;
}

// ---------------------------------------------------------------- norm

int cmd_norm(Run& run) {
  const auto& b = run.rc.command;
  config::check_keys(b, run.command, {"u", "quantity", "zero_trace"});
  const auto setup_phi = run.rc.phi;
  if (!setup_phi) throw ConfigError("phi", "missing");
  if (!run.rc.domain) throw ConfigError("domain", "missing");
  const auto& dom = run.rc.domain;
  const bool zero_trace = config::get_or(b, run.command, "zero_trace", false);
  GridFunction u;
  const auto un = b["u"];
  if (!un || un.IsScalar()) {
    const bool bump = un && un.as<std::string>() == "bump";
    if (bump) {
      u = principal_bump(dom);
    } else {
      const double c = un ? config::get<double>(b, run.command, "u") : 1.0;
      u = GridFunction::sample(dom, [c](double, double) { return c; }, zero_trace);
    }
  } else {
    config::check_keys(un, run.command + ".u", {"csv"});
    const auto key = run.command + ".u.csv";
    u = GridFunction(dom,
                     read_nodal_csv(config::resolve(run.rc.base_dir, config::get<std::string>(un, run.command + ".u", "csv")),
                                    dom->size(), key),
                     zero_trace);
  }
  const auto quantity = config::get_or<std::string>(b, run.command, "quantity", "luxemburg");
  const auto& phi = *setup_phi;
  const auto& w = *run.rc.omega;
  double value = 0.0;
  if (quantity == "luxemburg") {
    value = luxemburg_norm(phi, w, u);
  } else if (quantity == "modular") {
    value = modular(phi, w, u);
  } else if (quantity == "gradient_norm") {
    value = gradient_norm(phi, w, u);
  } else if (quantity == "gradient_modular") {
    value = gradient_modular(phi, w, u);
  } else if (quantity == "sobolev") {
    if (!run.rc.psi) throw ConfigError("psi", "needed for the sobolev norm");
    value = sobolev_norm(phi, *run.rc.psi, w, *run.rc.omega1, u);
  } else {
    throw ConfigError(run.command + ".quantity", "unknown quantity '" + quantity + "'");
  }
  CsvWriter csv(run.path("norm.csv"), "norm", "quantity,phi,domain,value");
  csv.row(quantity, phi.name(), dom->describe(), value);
  std::cout << format_number(value) << '\n';
  run.summary["quantity"] = quantity;
  run.summary["value"] = value;
  return ok;
}

// ---------------------------------------------------------------- eig

void write_function(const std::string& path, const std::string& command, const GridFunction& u) {
  CsvWriter csv(path, command, "x,y,u");
  const auto& dom = *u.domain();
  for (int k = 0; k < dom.size(); ++k) {
    const auto p = dom.point(k);
    csv.row(p[0], p[1], u[k]);
  }
}

int cmd_eig(Run& run) {
  const auto& b = run.rc.command;
  config::check_keys(b, run.command, {"alpha", "ls_k", "write_u"});
  const double alpha = config::get_or(b, run.command, "alpha", 1.0);
  const int ls_k = config::get_or(b, run.command, "ls_k", 0);
  const bool write_u = config::get_or(b, run.command, "write_u", true);
  if (!(alpha > 0.0)) throw ConfigError(run.command + ".alpha", "must be positive");
  if (ls_k < 0) throw ConfigError(run.command + ".ls_k", "must be >= 0");
  const auto s = run.rc.setup();
  const auto& opts = run.rc.solver;

  const auto pair = minimize_on_level(s, alpha, opts);
  CsvWriter csv(run.path("eig.csv"), "eig", "alpha,lambda,level_I,residual,iterations");
  csv.row(pair.alpha, pair.lambda, pair.level, pair.residual, pair.iterations);
  if (write_u) write_function(run.path("eigenfunction.csv"), "eig", pair.u);
  std::cout << "lambda = " << format_number(pair.lambda) << "  I(u) = " << format_number(pair.level)
            << "  residual = " << format_number(pair.residual) << "  iterations = " << pair.iterations << '\n';
  run.summary["lambda"] = pair.lambda;
  run.summary["level_I"] = pair.level;
  run.summary["residual"] = pair.residual;
  run.summary["iterations"] = pair.iterations;
  if (pair.residual > opts.tol * (1.0 + pair.level)) run.violate("residual above tolerance");
  if (opts.onesigned && sign_changes(pair.u) != 0) run.violate("minimizer changes sign");

  if (ls_k > 0) {
    const auto levels = ls_sequence(s, alpha, ls_k, opts);
    CsvWriter ls(run.path("ls.csv"), "eig", "k,lambda,c_k_alpha,residual,method,reliable,note");
    json rows = json::array();
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& lv = levels[i];
      ls.row(lv.k, lv.pair.lambda, lv.c_k_alpha, lv.pair.residual, lv.method, lv.reliable, lv.note);
      std::cout << "  k = " << lv.k << "  lambda = " << format_number(lv.pair.lambda)
                << "  c = " << format_number(lv.c_k_alpha) << (lv.reliable ? "" : "  (unreliable: " + lv.note + ")")
                << '\n';
      rows.push_back({{"k", lv.k}, {"lambda", lv.pair.lambda}, {"c_k_alpha", lv.c_k_alpha}, {"reliable", lv.reliable}});
      if (!lv.reliable) run.violate("level " + std::to_string(lv.k) + " unreliable: " + lv.note);
      if (i > 0 && lv.c_k_alpha > levels[i - 1].c_k_alpha * (1.0 + 1e-9))
        run.violate("level " + std::to_string(lv.k) + " increases");
    }
    run.summary["ls"] = rows;
  }
  return run.violations.empty() ? ok : violation;
}

// ---------------------------------------------------------------- spectrum

std::vector<SweepRow> parallel_sweep(const EnergySetup& s, const std::vector<double>& alphas,
                                     const SolverOptions& opts, int threads) {
  const int chunks = std::max(1, std::min<int>(threads, static_cast<int>(alphas.size())));
  if (chunks == 1) return spectrum_sweep(s, alphas, opts);
  std::vector<std::vector<SweepRow>> parts(static_cast<std::size_t>(chunks));
  std::vector<std::thread> pool;
  const std::size_t per = (alphas.size() + static_cast<std::size_t>(chunks) - 1) / static_cast<std::size_t>(chunks);
  for (int c = 0; c < chunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * per, hi = std::min(alphas.size(), lo + per);
    if (lo >= hi) break;
    pool.emplace_back([&, c, lo, hi] {
      parts[static_cast<std::size_t>(c)] =
          spectrum_sweep(s, std::vector<double>(alphas.begin() + static_cast<long>(lo),
                                                alphas.begin() + static_cast<long>(hi)), opts);
    });
  }
  for (auto& t : pool) t.join();
  std::vector<SweepRow> rows;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(rows));
  return rows;
}

int cmd_spectrum(Run& run) {
  const auto& b = run.rc.command;
  config::check_keys(b, run.command, {"alphas", "alpha_min", "alpha_max", "points"});
  std::vector<double> alphas;
  if (b["alphas"]) {
    alphas = number_list(b, run.command, "alphas");
  } else {
    const double lo = config::get_or(b, run.command, "alpha_min", 0.1);
    const double hi = config::get_or(b, run.command, "alpha_max", 10.0);
    const int n = config::get_or(b, run.command, "points", 10);
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError(run.command, "need 0 < alpha_min < alpha_max, points >= 2");
    alphas = log_grid(lo, hi, static_cast<std::size_t>(n));
  }
  const auto s = run.rc.setup();
  const auto& opts = run.rc.solver;
  auto rows = parallel_sweep(s, alphas, opts, run.threads);
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& c) { return a.alpha < c.alpha; });

  CsvWriter csv(run.path("spectrum.csv"), "spectrum", "alpha,lambda,level_I,residual,iterations,error");
  json out = json::array();
  bool failed = false;
  for (const auto& r : rows) {
    if (r.pair) {
      csv.row(r.alpha, r.pair->lambda, r.pair->level, r.pair->residual, r.pair->iterations, std::string());
      std::cout << format_number(r.alpha) << '\t' << format_number(r.pair->lambda) << '\n';
      out.push_back({{"alpha", r.alpha}, {"lambda", r.pair->lambda}, {"residual", r.pair->residual}});
      if (r.pair->residual > opts.tol * (1.0 + r.pair->level))
        run.violate("residual above tolerance at alpha " + format_number(r.alpha));
    } else {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      csv.row(r.alpha, std::nan(""), std::nan(""), std::nan(""), 0, err);
      std::cerr << "alpha " << format_number(r.alpha) << ": " << r.error << '\n';
      out.push_back({{"alpha", r.alpha}, {"error", r.error}});
      failed = true;
    }
  }
  run.summary["rows"] = out;
  if (failed) return numerical;
  return run.violations.empty() ? ok : violation;
}

// ---------------------------------------------------------------- region

int cmd_region(Run& run, bool proof_variant) {
  const auto& b = run.rc.command;
  config::check_keys(b, run.command, {"d", "r", "samples", "c1", "poincare_trials", "critical_starts", "sample_all"});
  const auto ds = number_list(b, run.command, "d");
  const auto rs = number_list(b, run.command, "r");
  RegionOptions o;
  o.samples = config::get_or(b, run.command, "samples", o.samples);
  if (b["c1"]) o.c1 = config::get<double>(b, run.command, "c1");
  o.poincare_trials = config::get_or(b, run.command, "poincare_trials", o.poincare_trials);
  o.critical_starts = config::get_or(b, run.command, "critical_starts", 0);
  o.seed = run.rc.seed;
  o.proof_variant = proof_variant;
  const bool sample_all = config::get_or(b, run.command, "sample_all", false);
  if (o.samples < 1) throw ConfigError(run.command + ".samples", "must be >= 1");
  if (ds.empty() || rs.empty()) throw ConfigError(run.command, "d and r need at least one value");
  const auto s = run.rc.setup();

  const auto grid = region_grid_search(s, ds, rs, o, sample_all);
  CsvWriter csv(run.path("region.csv"), "region", region_csv_header());
  for (const auto& row : grid.rows) csv.raw(region_csv_row(row));
  std::cout << grid.rows.size() << " (d, r) pairs evaluated, "
            << std::count_if(grid.rows.begin(), grid.rows.end(), [](const RegionReport& r) { return r.admissible; })
            << " admissible\n";
  if (!grid.chosen) {
    run.violate("no admissible (d, r) pair on the grid");
    return violation;
  }
  const auto& rep = grid.rows[*grid.chosen];
  std::cout << region_pretty(rep);
  json chosen = {{"d", rep.d},
                 {"r", rep.r},
                 {"admissible", rep.admissible},
                 {"sandwich_holds", rep.sandwich_holds},
                 {"w_tilde_r", rep.w_tilde_r},
                 {"gamma_d", rep.gamma_d},
                 {"c1", rep.c1},
                 {"sup_J_r", rep.sup_J_r},
                 {"chain_bound", rep.chain_bound},
                 {"chain_violations", rep.chain_violations},
                 {"lambda_lo", rep.lambda_lo},
                 {"lambda_hi", rep.lambda_hi},
                 {"nonempty", rep.nonempty}};
  if (rep.critical_points) chosen["critical_points"] = *rep.critical_points;
  run.summary["chosen"] = chosen;
  for (const auto& row : grid.rows) {
    const std::string at = "(d, r) = (" + format_number(row.d) + ", " + format_number(row.r) + ")";
    if (!row.sandwich_holds) run.violate("energy sandwich fails at " + at);
    if (!row.sampled) continue;
    if (row.admissible && !row.nonempty) run.violate("admissible but the lambda interval is empty at " + at);
    if (row.chain_violations > 0)
      run.violate(std::to_string(row.chain_violations) + " samples exceed r * w~_r at " + at);
  }
  return run.violations.empty() ? ok : violation;
}

// ---------------------------------------------------------------- driver

int dispatch(Run& run, const Flags& f) {
  if (run.command == "catalog") return cmd_catalog(run);
  if (run.command == "check-young") return cmd_check_young(run);
  if (run.command == "conjugate") return cmd_conjugate(run);
  if (run.command == "norm") return cmd_norm(run);
  if (run.command == "eig") return cmd_eig(run);
  if (run.command == "spectrum") return cmd_spectrum(run);
  return cmd_region(run, f.proof_variant);
}

void write_summary(const Run& run, int status, const std::string& error) {
  if (run.out.empty()) return;
  json j;
  j["tool"] = "orlicz-lab";
  j["version"] = kVersion;
  j["command"] = run.command;
  j["seed"] = run.rc.seed;
  j["threads"] = run.threads;
  j["exit_status"] = status;
  if (!error.empty()) j["error"] = error;
  j["violations"] = run.violations;
  j["result"] = run.summary;
  std::ofstream(run.out / "summary.json") << j.dump(2) << '\n';
}

int run_command(const std::string& command, const Flags& f) {
  Run run;
  run.command = command;
  int status = ok;
  std::string error;
  try {
    run.threads = thread_cap();
    if (!f.config.empty()) {
      run.rc = load_config(f.config, command);
    } else if (command != "catalog") {
      throw ConfigError("--config", "required for " + command);
    }
    if (f.seed) {
      run.rc.seed = *f.seed;
      run.rc.solver.seed = *f.seed;
    }
    run.out = f.out.empty() ? fs::path(run.rc.out_dir) : fs::path(f.out);
    std::error_code ec;
    fs::create_directories(run.out, ec);
    if (ec) throw ConfigError("--out", "cannot create '" + run.out.string() + "': " + ec.message());
    status = dispatch(run, f);
  } catch (const ConfigError& e) {
    status = config_error;
    error = e.what();
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const NonConvergence& e) {
    status = numerical;
    error = e.what();
    std::cerr << "numerical failure: " << e.what() << '\n';
  } catch (const RangeError& e) {
    status = numerical;
    error = e.what();
    std::cerr << "numerical failure: " << e.what() << '\n';
  } catch (const std::exception& e) {
    status = violation;
    error = e.what();
    std::cerr << "error: " << e.what() << '\n';
  }
  write_summary(run, status, error);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Orlicz-Sobolev numerics: Young functions, norms, eigenvalues, three-solution regions"};
  app.set_version_flag("--version", std::string("orlicz-lab ") + kVersion);
  app.require_subcommand(1, 1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"catalog", "List built-in Young functions with growth indices and doubling class"},
      {"check-young", "Check convexity, growth indices and doubling for phi (and psi)"},
      {"conjugate", "Tabulate the complementary function of phi"},
      {"norm", "Luxemburg norm, modular or Sobolev norm of a grid function"},
      {"eig", "Minimize I on {J = alpha}; optionally the minimax sequence"},
      {"spectrum", "Eigenvalue as a function of the level alpha"},
      {"region", "Three-solution parameter region over a (d, r) grid"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "YAML run configuration");
    sub->add_option("--out", flags.out, "Output directory (overrides output.dir)");
    sub->add_option("--seed", flags.seed, "Random seed (overrides the config)");
    if (std::string(name) == "region")
      sub->add_flag("--proof-variant", flags.proof_variant, "Use the 2N constant in the r threshold");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }
  return run_command(app.get_subcommands().front()->get_name(), flags);
}
