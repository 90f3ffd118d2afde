// SPDX-License-Identifier: Apache-2.0
#pragma once

// Needs yaml-cpp; not part of the umbrella header.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "orlicz/eigensolver.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/functionals.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/region.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

inline constexpr const char* kVersion = "0.1.0";

/// Twelve significant digits; integral values keep a trailing ".0".
[[nodiscard]] inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  std::string out(buf);
  if (std::isfinite(x) && out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

/// Numeric columns read from a CSV file; '#' lines and a non-numeric first line are skipped.
[[nodiscard]] inline std::vector<std::vector<double>> read_csv_numbers(const std::string& path, const std::string& key) {
  std::ifstream in(path);
  if (!in) throw ConfigError(key, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError(key, path + ":" + std::to_string(lineno) + ": not a number");
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Tabulated Phi from a two-column (t, Phi(t)) CSV.
[[nodiscard]] inline YoungFunction read_tabulated(const std::string& path, const std::string& key) {
  std::vector<double> t, v;
  for (const auto& row : read_csv_numbers(path, key)) {
    if (row.size() != 2) throw ConfigError(key, "tabulated CSV needs exactly two columns");
    t.push_back(row[0]);
    v.push_back(row[1]);
  }
  try {
    return YoungFunction::tabulated(std::move(t), std::move(v));
  } catch (const InvalidYoungFunction& e) {
    throw ConfigError(key, e.what());
  }
}

/// Nodal values, one per line (or one row), in grid order.
[[nodiscard]] inline Eigen::VectorXd read_nodal_csv(const std::string& path, int expected, const std::string& key) {
  std::vector<double> flat;
  for (const auto& row : read_csv_numbers(path, key)) flat.insert(flat.end(), row.begin(), row.end());
  if (static_cast<int>(flat.size()) != expected)
    throw ConfigError(key, "expected " + std::to_string(expected) + " nodal values, got " + std::to_string(flat.size()));
  return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

namespace config {

/// Rejects any key of a map node outside `allowed`.
inline void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where, "expected a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <class T>
T get(const YAML::Node& node, const std::string& where, const char* key) {
  const auto child = node[key];
  const std::string path = where.empty() ? key : where + "." + key;
  if (!child) throw ConfigError(path, "missing");
  try {
    return child.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, "wrong type");
  }
}

template <class T>
T get_or(const YAML::Node& node, const std::string& where, const char* key, T fallback) {
  return node[key] ? get<T>(node, where, key) : fallback;
}

inline std::string join(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

/// Relative paths are taken against the directory of the config file.
inline std::string resolve(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() || base.empty() ? path : (std::filesystem::path(base) / p).string();
}

}  // namespace config

/// Young function from `{kind: ..., <params>}`.
[[nodiscard]] inline YoungFunction parse_young(const YAML::Node& node, const std::string& where,
                                         const std::string& base = "") {
  using namespace config;
  if (!node || !node.IsMap()) throw ConfigError(where, "expected a mapping with 'kind'");
  const auto kind = get<std::string>(node, where, "kind");
  try {
    if (kind == "power") {
      check_keys(node, where, {"kind", "p", "coef"});
      const double p = get<double>(node, where, "p");
      return node["coef"] ? YoungFunction::power(p, get<double>(node, where, "coef")) : YoungFunction::power(p);
    }
    if (kind == "power_sum") {
      check_keys(node, where, {"kind", "p", "q"});
      return YoungFunction::power_sum(get<double>(node, where, "p"), get<double>(node, where, "q"));
    }
    if (kind == "plasticity") {
      check_keys(node, where, {"kind", "alpha", "beta"});
      return YoungFunction::plasticity(get<double>(node, where, "alpha"), get<double>(node, where, "beta"));
    }
    if (kind == "elasticity") {
      check_keys(node, where, {"kind", "gamma"});
      return YoungFunction::elasticity(get<double>(node, where, "gamma"));
    }
    if (kind == "newtonian") {
      check_keys(node, where, {"kind", "alpha", "beta"});
      return YoungFunction::newtonian(get<double>(node, where, "alpha"), get<double>(node, where, "beta"));
    }
    if (kind == "exp_square") {
      check_keys(node, where, {"kind"});
      return YoungFunction::exp_square();
    }
    if (kind == "tabulated") {
      check_keys(node, where, {"kind", "csv"});
      return read_tabulated(resolve(base, get<std::string>(node, where, "csv")), join(where, "csv"));
    }
  } catch (const InvalidYoungFunction& e) {
    throw ConfigError(where, e.what());
  }
  throw ConfigError(join(where, "kind"), "unknown kind '" + kind + "'");
}

/// Domain from `{shape, n, extent}`; extent is [a, b], [x0, x1, y0, y1] or [cx, cy, R].
[[nodiscard]] inline DomainPtr parse_domain(const YAML::Node& node, const std::string& where) {
  using namespace config;
  if (!node) throw ConfigError(where, "missing");
  check_keys(node, where, {"shape", "n", "extent"});
  const auto shape = get<std::string>(node, where, "shape");
  const int n = get<int>(node, where, "n");
  const auto ext = get<std::vector<double>>(node, where, "extent");
  auto need = [&](std::size_t k) {
    if (ext.size() != k) throw ConfigError(join(where, "extent"), shape + " needs " + std::to_string(k) + " numbers");
  };
  try {
    if (shape == "interval") {
      need(2);
      return GridDomain::interval(ext[0], ext[1], n);
    }
    if (shape == "box") {
      need(4);
      return GridDomain::box(ext[0], ext[1], ext[2], ext[3], n);
    }
    if (shape == "disc") {
      need(3);
      return GridDomain::disc(ext[0], ext[1], ext[2], n);
    }
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  }
  throw ConfigError(join(where, "shape"), "unknown shape '" + shape + "'");
}

/// A scalar constant or `{csv: path}` of nodal values.
[[nodiscard]] inline WeightField parse_weight(const YAML::Node& node, const std::string& where, const DomainPtr& dom,
                                       const std::string& base = "") {
  using namespace config;
  try {
    if (!node || node.IsNull()) return WeightField::constant(dom, 1.0);
    if (node.IsScalar()) return WeightField::constant(dom, node.as<double>());
    check_keys(node, where, {"csv"});
    return WeightField(dom, read_nodal_csv(resolve(base, get<std::string>(node, where, "csv")), dom->size(),
                                          join(where, "csv")));
  } catch (const DomainError& e) {
    throw ConfigError(where, e.what());
  } catch (const YAML::Exception&) {
    throw ConfigError(where, "expected a number or {csv: path}");
  }
}

struct RunConfig {
  std::optional<YoungFunction> phi, psi;
  DomainPtr domain;
  std::optional<WeightField> omega, omega1;
  SolverOptions solver;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  YAML::Node command;  ///< the block named after the subcommand, validated by the command
  std::string base_dir;  ///< directory of the config file

  [[nodiscard]] EnergySetup setup() const {
    if (!phi) throw ConfigError("phi", "missing");
    if (!psi) throw ConfigError("psi", "missing");
    if (!domain) throw ConfigError("domain", "missing");
    return EnergySetup(*phi, *psi, *omega, *omega1);
  }
};

/// Top-level keys: phi, psi, domain, weights, solver, seed, output and one block per subcommand.
[[nodiscard]] inline RunConfig parse_config(const YAML::Node& root, const std::string& command,
                                        const std::string& base_dir = "") {
  using namespace config;
  if (!root || root.IsNull()) throw ConfigError("", "empty configuration");
  check_keys(root, "", {"phi", "psi", "domain", "weights", "solver", "seed", "output", "check-young", "conjugate",
                        "norm", "eig", "region", "spectrum"});
  RunConfig rc;
  rc.base_dir = base_dir;
  if (root["phi"]) rc.phi = parse_young(root["phi"], "phi", base_dir);
  if (root["psi"]) rc.psi = parse_young(root["psi"], "psi", base_dir);
  if (root["domain"]) rc.domain = parse_domain(root["domain"], "domain");
  if (root["weights"]) {
    if (!rc.domain) throw ConfigError("weights", "needs a domain");
    check_keys(root["weights"], "weights", {"omega", "omega1"});
  }
  if (rc.domain) {
    rc.omega = parse_weight(root["weights"] ? root["weights"]["omega"] : YAML::Node(), "weights.omega", rc.domain, base_dir);
    rc.omega1 = parse_weight(root["weights"] ? root["weights"]["omega1"] : YAML::Node(), "weights.omega1", rc.domain, base_dir);
  }
  rc.seed = get_or<std::uint64_t>(root, "", "seed", 42);
  rc.solver.seed = rc.seed;
  if (const auto s = root["solver"]) {
    check_keys(s, "solver", {"tol", "max_iter", "onesigned", "seed", "starts"});
    rc.solver.tol = get_or(s, "solver", "tol", rc.solver.tol);
    rc.solver.max_iter = get_or(s, "solver", "max_iter", rc.solver.max_iter);
    rc.solver.onesigned = get_or(s, "solver", "onesigned", rc.solver.onesigned);
    rc.solver.seed = get_or<std::uint64_t>(s, "solver", "seed", rc.solver.seed);
    rc.solver.starts = get_or(s, "solver", "starts", rc.solver.starts);
    if (!(rc.solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
    if (rc.solver.max_iter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"dir"});
    rc.out_dir = get<std::string>(o, "output", "dir");
  }
  rc.command = root[command] ? root[command] : YAML::Node(YAML::NodeType::Map);
  return rc;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path, const std::string& command) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError("--config", "cannot read '" + path + "'");
  } catch (const YAML::ParserException& e) {
    throw ConfigError("--config", std::string("parse error: ") + e.what());
  }
  return parse_config(root, command, std::filesystem::path(path).parent_path().string());
}

/// Versioned CSV: a `# orlicz-lab v<version> <command>` line, the column names, then rows.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& command, const std::string& columns) : out_(path) {
    if (!out_) throw ConfigError("--out", "cannot write '" + path + "'");
    out_ << "# orlicz-lab v" << kVersion << ' ' << command << '\n' << columns << '\n';
  }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  void raw(const std::string& line) { out_ << line << '\n'; }

 private:
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_number(v);
    } else if constexpr (std::is_arithmetic_v<T>) {
      return std::to_string(v);
    } else {
      return std::string(v);
    }
  }

  std::ofstream out_;
};

}  // namespace orlicz
