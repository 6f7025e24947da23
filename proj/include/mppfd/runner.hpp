#pragma once

// Run configuration, the benchmark run loop and the convergence harness.
//
// Configuration layers, lowest to highest precedence: case defaults, a
// `key = value` config file, command-line flags.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mppfd/cases.hpp"
#include "mppfd/diagnostics.hpp"
#include "mppfd/errors.hpp"
#include "mppfd/integrator.hpp"

namespace mppfd {

struct RunConfig {
  std::string case_name;
  Scheme scheme = Scheme::hermite_linear;
  bool limiter = true;
  std::size_t nx = 0, ny = 0;
  double cfl = 0.6;
  double t_final = 0.0;
  std::size_t diag_every = 10;
  std::vector<double> snapshot_times;
  std::string output_dir;  ///< empty: no files are written
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
};

/// Ordered key/value entries from one configuration layer.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"case", "scheme", "limiter", "nx",   "ny",   "cfl",  "tfinal",
                                             "diag_every", "snapshot_times", "output", "xmin", "xmax", "ymin", "ymax"};
  return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a real number, got '" + value + "'");
  }
}

inline std::size_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
}

inline bool parse_switch(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected on/off, got '" + value + "'");
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_real(key, item));
  }
  return out;
}

/// Shortest text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment. Unknown keys are rejected.
inline ConfigEntries parse_config_text(std::istream& is) {
  ConfigEntries entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

inline ConfigEntries read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config_text(is);
}

/// Resolves layered entries (later layers win) on top of the case defaults.
inline RunConfig resolve_config(const std::vector<ConfigEntries>& layers) {
  std::map<std::string, std::string> merged;
  for (const auto& layer : layers) {
    for (const auto& [k, v] : layer) {
      if (std::find(config_keys().begin(), config_keys().end(), k) == config_keys().end()) {
        throw ConfigError("unknown config key '" + k + "'");
      }
      merged[k] = v;
    }
  }
  if (!merged.count("case")) throw ConfigError("config key 'case' is required");
  const CaseSpec& spec = find_case(merged["case"]);

  RunConfig c;
  c.case_name = spec.name;
  c.nx = spec.nx;
  c.ny = spec.ny;
  c.t_final = spec.t_final;
  c.x_min = spec.x_min, c.x_max = spec.x_max, c.y_min = spec.y_min, c.y_max = spec.y_max;

  for (const auto& [k, v] : merged) {
    if (k == "case") continue;
    if (k == "scheme") c.scheme = parse_scheme(v);
    else if (k == "limiter") c.limiter = detail::parse_switch(k, v);
    else if (k == "nx") c.nx = detail::parse_count(k, v);
    else if (k == "ny") c.ny = detail::parse_count(k, v);
    else if (k == "cfl") c.cfl = detail::parse_real(k, v);
    else if (k == "tfinal") c.t_final = detail::parse_real(k, v);
    else if (k == "diag_every") c.diag_every = detail::parse_count(k, v);
    else if (k == "snapshot_times") c.snapshot_times = detail::parse_real_list(k, v);
    else if (k == "output") c.output_dir = v;
    else if (k == "xmin") c.x_min = detail::parse_real(k, v);
    else if (k == "xmax") c.x_max = detail::parse_real(k, v);
    else if (k == "ymin") c.y_min = detail::parse_real(k, v);
    else if (k == "ymax") c.y_max = detail::parse_real(k, v);
  }

  if (c.nx < Grid2D::min_nodes) {
    throw ConfigError("config key 'nx': must be at least " + std::to_string(Grid2D::min_nodes));
  }
  if (c.ny < Grid2D::min_nodes) {
    throw ConfigError("config key 'ny': must be at least " + std::to_string(Grid2D::min_nodes));
  }
  if (!(c.cfl > 0.0 && c.cfl <= SchemeConfig::max_cfl)) {
    throw ConfigError("config key 'cfl': must lie in (0, 2/3], got " + detail::format_real(c.cfl));
  }
  if (!(c.t_final > 0.0)) throw ConfigError("config key 'tfinal': must be positive");
  if (c.diag_every == 0) throw ConfigError("config key 'diag_every': must be at least 1");
  if (!(c.x_max > c.x_min)) throw ConfigError("config keys 'xmin'/'xmax': xmax must exceed xmin");
  if (!(c.y_max > c.y_min)) throw ConfigError("config keys 'ymin'/'ymax': ymax must exceed ymin");
  for (double t : c.snapshot_times) {
    if (t < 0.0 || t > c.t_final) throw ConfigError("config key 'snapshot_times': times must lie in [0, tfinal]");
  }
  std::sort(c.snapshot_times.begin(), c.snapshot_times.end());
  c.snapshot_times.erase(std::unique(c.snapshot_times.begin(), c.snapshot_times.end()), c.snapshot_times.end());
  return c;
}

/// Flags override file entries, which override case defaults.
inline RunConfig parse_config(const ConfigEntries& flags, const std::optional<std::string>& file = std::nullopt) {
  std::vector<ConfigEntries> layers;
  if (file) layers.push_back(read_config_file(*file));
  layers.push_back(flags);
  return resolve_config(layers);
}

/// The resolved configuration as `key = value` lines; parse_config_text reads it back.
inline std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "case = " << c.case_name << '\n';
  os << "scheme = " << to_string(c.scheme) << '\n';
  os << "limiter = " << (c.limiter ? "on" : "off") << '\n';
  os << "nx = " << c.nx << '\n';
  os << "ny = " << c.ny << '\n';
  os << "cfl = " << detail::format_real(c.cfl) << '\n';
  os << "tfinal = " << detail::format_real(c.t_final) << '\n';
  os << "diag_every = " << c.diag_every << '\n';
  os << "snapshot_times = ";
  for (std::size_t k = 0; k < c.snapshot_times.size(); ++k) {
    os << (k ? "," : "") << detail::format_real(c.snapshot_times[k]);
  }
  os << '\n';
  if (!c.output_dir.empty()) os << "output = " << c.output_dir << '\n';
  os << "xmin = " << detail::format_real(c.x_min) << '\n';
  os << "xmax = " << detail::format_real(c.x_max) << '\n';
  os << "ymin = " << detail::format_real(c.y_min) << '\n';
  os << "ymax = " << detail::format_real(c.y_max) << '\n';
  return os.str();
}

inline SchemeConfig scheme_config(const RunConfig& c) {
  SchemeConfig s;
  s.scheme = c.scheme;
  s.limiter = c.limiter;
  s.cfl = c.cfl;
  return s;
}

inline Grid2D run_grid(const RunConfig& c) { return Grid2D(c.x_min, c.x_max, c.y_min, c.y_max, c.nx, c.ny); }

struct RunSummary {
  ScalarField final_state;
  std::size_t steps = 0;
  double final_time = 0.0;
  Bounds bounds;
  std::vector<DiagnosticsRecord> records;
  // Tracked at every accepted step, independent of the diagnostic interval.
  double min_over_run = std::numeric_limits<double>::infinity();
  double max_over_run = -std::numeric_limits<double>::infinity();
  double max_abs_mass_rel = 0.0;
  double theta_min = 1.0;
  std::size_t clamped_node_steps = 0;
  double max_clamp = 0.0;
};

/// Advances the configured case to t_final. With a non-empty output_dir it
/// writes diagnostics.csv, run.meta and the requested snapshots.
inline RunSummary run_case(const RunConfig& cfg) {
  const CaseSpec& spec = find_case(cfg.case_name);
  const Grid2D grid = run_grid(cfg);
  InitialState init = initial_condition(spec, grid);
  Simulation sim(make_model(spec, grid), scheme_config(cfg), init.bounds, std::move(init.field));

  const bool files = !cfg.output_dir.empty();
  std::ofstream csv;
  namespace fs = std::filesystem;
  if (files) {
    fs::create_directories(cfg.output_dir);
    std::ofstream meta(fs::path(cfg.output_dir) / "run.meta");
    meta << format_config(cfg);
    csv.open(fs::path(cfg.output_dir) / "diagnostics.csv");
    if (!csv) throw ConfigError("cannot write diagnostics.csv in '" + cfg.output_dir + "'");
    csv << diagnostics_csv_header << '\n';
  }

  RunSummary summary{.final_state = ScalarField(grid)};
  summary.bounds = sim.bounds();
  DiagnosticsTracker tracker;
  std::size_t next_snapshot = 0;

  auto emit = [&](double dt, std::optional<double> theta) {
    auto rec = tracker.record(sim.steps(), sim.time(), dt, sim.state(), sim.flow().efield, theta);
    if (files) write_csv_row(csv, rec);
    summary.records.push_back(rec);
  };
  auto track = [&]() {
    summary.min_over_run = std::min(summary.min_over_run, sim.state().min());
    summary.max_over_run = std::max(summary.max_over_run, sim.state().max());
    const double m0 = tracker.initial()->mass;
    summary.max_abs_mass_rel = std::max(summary.max_abs_mass_rel, std::abs(relative_deviation(mass(sim.state()), m0)));
  };
  auto snapshots = [&]() {
    while (next_snapshot < cfg.snapshot_times.size() && cfg.snapshot_times[next_snapshot] <= sim.time()) {
      if (files) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%03zu.dat", next_snapshot);
        write_snapshot((fs::path(cfg.output_dir) / name).string(), sim.state(), sim.time());
      }
      ++next_snapshot;
    }
  };

  emit(0.0, std::nullopt);
  track();
  snapshots();
  while (sim.time() < cfg.t_final) {
    const double target =
        next_snapshot < cfg.snapshot_times.size() ? cfg.snapshot_times[next_snapshot] : cfg.t_final;
    StepResult r = sim.advance(target);
    std::optional<double> theta;
    if (r.limiter) {
      theta = r.limiter->theta_min;
      summary.theta_min = std::min(summary.theta_min, r.limiter->theta_min);
      summary.clamped_node_steps += r.limiter->clamped_nodes;
      summary.max_clamp = std::max(summary.max_clamp, r.limiter->max_clamp);
    }
    track();
    snapshots();
    if (sim.steps() % cfg.diag_every == 0 || sim.time() >= cfg.t_final) emit(r.dt, theta);
  }
  summary.steps = sim.steps();
  summary.final_time = sim.time();
  summary.final_state = sim.state();
  return summary;
}

struct ConvergenceRow {
  std::size_t n = 0;
  double l1_error = 0.0;
  std::optional<double> l1_order;
  double linf_error = 0.0;
  std::optional<double> linf_order;
  double min = 0.0, max = 0.0;
};

namespace detail {

inline RunConfig mesh_config(const RunConfig& base, const CaseSpec& spec, std::size_t n) {
  RunConfig c = base;
  c.output_dir.clear();
  c.snapshot_times.clear();
  c.diag_every = std::numeric_limits<std::size_t>::max();
  c.nx = n;
  if (!spec.one_dimensional) {
    if (base.ny % base.nx != 0 && base.nx % base.ny != 0) {
      throw ConfigError("converge: ny/nx must be an integer ratio");
    }
    c.ny = base.ny >= base.nx ? n * (base.ny / base.nx) : n / (base.nx / base.ny);
  }
  return c;
}

}  // namespace detail

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "N,l1_error,l1_order,linf_error,linf_order,min,max\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6e", v);
    os << buf;
  };
  auto ord = [&](const std::optional<double>& v) {
    if (v) {
      std::snprintf(buf, sizeof buf, "%.4f", *v);
      os << buf;
    }
  };
  for (const auto& r : rows) {
    os << r.n << ',';
    num(r.l1_error);
    os << ',';
    ord(r.l1_order);
    os << ',';
    num(r.linf_error);
    os << ',';
    ord(r.linf_order);
    os << ',';
    num(r.min);
    os << ',';
    num(r.max);
    os << '\n';
  }
}

/// Runs the case on each mesh (n = nx; ny follows the configured aspect
/// ratio) and measures errors against the exact solution, or, without one,
/// against the run on the doubled mesh restricted to coincident nodes.
inline std::vector<ConvergenceRow> converge(const RunConfig& cfg, const std::vector<std::size_t>& meshes) {
  if (meshes.size() < 2) throw ConfigError("converge: at least two meshes are required");
  const CaseSpec& spec = find_case(cfg.case_name);

  std::map<std::size_t, ScalarField> cache;
  auto solve = [&](std::size_t n) -> const ScalarField& {
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, run_case(detail::mesh_config(cfg, spec, n)).final_state).first;
    return it->second;
  };

  std::vector<ConvergenceRow> rows;
  std::vector<double> l1, linf;
  for (std::size_t n : meshes) {
    const ScalarField& numeric = solve(n);
    ScalarField reference(numeric.grid());
    if (spec.exact) {
      const auto& exact = *spec.exact;
      const double t = cfg.t_final;
      reference = sample(numeric.grid(), [&](double x, double y) { return exact(t, x, y); });
    } else {
      reference = restrict_to(solve(2 * n), numeric.grid());
    }
    const ErrorNorms e = error_norms(numeric, reference);
    ConvergenceRow row;
    row.n = n;
    row.l1_error = e.l1;
    row.linf_error = e.linf;
    row.min = numeric.min();
    row.max = numeric.max();
    rows.push_back(row);
    l1.push_back(e.l1);
    linf.push_back(e.linf);
  }
  const auto o1 = convergence_orders(l1);
  const auto oinf = convergence_orders(linf);
  for (std::size_t k = 0; k < o1.size(); ++k) {
    rows[k + 1].l1_order = o1[k];
    rows[k + 1].linf_order = oinf[k];
  }

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream os(std::filesystem::path(cfg.output_dir) / "convergence.csv");
    write_convergence_csv(os, rows);
  }
  return rows;
}

}  // namespace mppfd
