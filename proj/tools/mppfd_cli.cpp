// mppfd: run benchmark cases, convergence studies and list the presets.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mppfd/runner.hpp"

namespace {

constexpr int exit_config = 1;
constexpr int exit_numerical = 2;

struct FlagSet {
  std::optional<std::string> case_name, scheme, limiter, snapshot_times, output;
  std::optional<std::size_t> nx, ny, diag_every;
  std::optional<double> cfl, tfinal, xmin, xmax, ymin, ymax;
  std::optional<std::string> config_file;

  void attach(CLI::App* app) {
    app->add_option("--case", case_name, "benchmark case (see list-cases)");
    app->add_option("--scheme", scheme, "hermite_linear | hermite_weno");
    app->add_option("--limiter", limiter, "on | off");
    app->add_option("--nx", nx, "nodes in x");
    app->add_option("--ny", ny, "nodes in y (v for phase-space cases)");
    app->add_option("--cfl", cfl, "CFL number in (0, 2/3]");
    app->add_option("--tfinal", tfinal, "final time");
    app->add_option("--diag-every", diag_every, "steps between diagnostics rows");
    app->add_option("--snapshot-times", snapshot_times, "comma-separated snapshot times");
    app->add_option("--output", output, "output directory");
    app->add_option("--xmin", xmin);
    app->add_option("--xmax", xmax);
    app->add_option("--ymin", ymin);
    app->add_option("--ymax", ymax);
    app->add_option("--config", config_file, "key = value configuration file");
  }

  mppfd::ConfigEntries entries() const {
    mppfd::ConfigEntries e;
    auto put = [&](const char* key, const auto& v) {
      if (!v) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) {
        e.emplace_back(key, *v);
      } else if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, double>) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        e.emplace_back(key, buf);
      } else {
        e.emplace_back(key, std::to_string(*v));
      }
    };
    put("case", case_name);
    put("scheme", scheme);
    put("limiter", limiter);
    put("nx", nx);
    put("ny", ny);
    put("cfl", cfl);
    put("tfinal", tfinal);
    put("diag_every", diag_every);
    put("snapshot_times", snapshot_times);
    put("output", output);
    put("xmin", xmin);
    put("xmax", xmax);
    put("ymin", ymin);
    put("ymax", ymax);
    return e;
  }

  mppfd::RunConfig resolve() const {
    mppfd::RunConfig cfg = mppfd::parse_config(entries(), config_file);
    if (cfg.output_dir.empty()) {
      const char* base = std::getenv("MPPFD_OUTPUT_DIR");
      cfg.output_dir = (std::filesystem::path(base && *base ? base : "mppfd_out") / cfg.case_name).string();
    }
    return cfg;
  }
};

void report_clamps(const mppfd::RunSummary& s) {
  if (s.clamped_node_steps == 0) return;
  std::fprintf(stderr,
               "warning: first-order update left the bounds at %zu node-steps (largest excursion %.3e); "
               "the CFL number exceeds the first-order monotone limit\n",
               s.clamped_node_steps, s.max_clamp);
}

int run_command(const FlagSet& flags) {
  const mppfd::RunConfig cfg = flags.resolve();
  const mppfd::RunSummary s = mppfd::run_case(cfg);
  report_clamps(s);
  std::printf("case %s: %zu steps to t = %.6g, min %.6e, max %.6e, output in %s\n", cfg.case_name.c_str(), s.steps,
              s.final_time, s.min_over_run, s.max_over_run, cfg.output_dir.c_str());
  return 0;
}

int converge_command(const FlagSet& flags, const std::vector<std::size_t>& meshes) {
  const mppfd::RunConfig cfg = flags.resolve();
  const auto rows = mppfd::converge(cfg, meshes);
  mppfd::write_convergence_csv(std::cout, rows);
  return 0;
}

int list_command() {
  for (const auto& c : mppfd::all_cases()) {
    std::printf("%-18s %4zux%-4zu t=%-6g %s%s\n", c.name.c_str(), c.nx, c.ny, c.t_final, c.summary.c_str(),
                c.long_run ? " [long-run]" : "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservative finite-difference transport solver with a maximum-principle-preserving limiter"};
  app.require_subcommand(1);

  FlagSet run_flags, conv_flags;
  std::vector<std::size_t> meshes;
  auto* run = app.add_subcommand("run", "advance one case and write diagnostics.csv, snapshots and run.meta");
  run_flags.attach(run);
  auto* conv = app.add_subcommand("converge", "mesh-refinement study written to convergence.csv");
  conv_flags.attach(conv);
  conv->add_option("--meshes", meshes, "mesh sizes N (nx = N)")->delimiter(',')->required();
  auto* list = app.add_subcommand("list-cases", "print the benchmark presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    if (run->parsed()) return run_command(run_flags);
    if (conv->parsed()) return converge_command(conv_flags, meshes);
    if (list->parsed()) return list_command();
  } catch (const mppfd::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_config;
  } catch (const mppfd::NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return exit_numerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_numerical;
  }
  return 0;
}
