#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ddpc/experiments.hpp"

using namespace ddpc;

int main(int argc, char** argv) {
  CLI::App app{"Data-driven predictive control experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  bool paper_scale = false;
  app.add_option("--config", config_path, "scenario JSON file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed_override, "override the scenario seed")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_flag("--paper-scale", paper_scale,
               "restore the paper-sized sweeps (50 models, full grids)");

  auto* collect = app.add_subcommand("collect", "record nominal-controller trajectories");
  auto* grid = app.add_subcommand("grid-search", "score hyperparameter combinations");
  auto* fit = app.add_subcommand("fit", "fit transition matrices from collected data");
  auto* compare = app.add_subcommand("compare", "closed-loop controller comparison sweep");
  auto* perturb = app.add_subcommand("perturb", "perturbation ramp with online updates");
  auto* report = app.add_subcommand("report", "aggregate runs into a tidy CSV");

  std::string report_path = "report.csv";
  report->add_option("--report-file", report_path, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    Scenario scenario;
    if (!config_path.empty()) {
      scenario = Scenario::load_json(config_path);
    }
    if (have_seed) {
      scenario.seed = seed_override;
    }
    if (paper_scale) {
      scenario.apply_paper_scale();
    }

    if (collect->parsed()) {
      const auto files = run_collect(scenario, out_dir);
      std::printf("collect: wrote %zu trajectories under %s/data\n",
                  files.size(), out_dir.c_str());
    } else if (grid->parsed()) {
      const auto rows = run_grid_search(scenario, out_dir);
      std::size_t ok = 0;
      for (const auto& r : rows) ok += r.status == "ok" ? 1 : 0;
      std::printf("grid-search: %zu combos scored (%zu ok) -> %s/grid.csv\n",
                  rows.size(), ok, out_dir.c_str());
    } else if (fit->parsed()) {
      const auto files = run_fit(scenario, out_dir);
      std::printf("fit: wrote %zu transition matrices under %s\n",
                  files.size(), out_dir.c_str());
    } else if (compare->parsed()) {
      const auto records = run_comparison(scenario, out_dir);
      int failures = 0;
      for (const auto& r : records) failures += r.metrics.success ? 0 : 1;
      std::printf("compare: %zu runs (%d failures) -> %s/runs.csv\n",
                  records.size(), failures, out_dir.c_str());
    } else if (perturb->parsed()) {
      const auto records = run_perturbation(scenario, out_dir);
      int failures = 0;
      for (const auto& r : records) failures += r.metrics.success ? 0 : 1;
      std::printf("perturb: %zu runs (%d failures) -> %s/perturb_runs.csv\n",
                  records.size(), failures, out_dir.c_str());
    } else if (report->parsed()) {
      run_report(out_dir, report_path);
      std::printf("report: wrote %s\n", report_path.c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const MissingRuns& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
