// Command-line front end for the nvrr readout simulator. Links only the C API.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvrr.h"

namespace {

// 0 = success, 1 = I/O or internal, 2 = config, 3 = numerical failure.
int exit_code(nvrr_status status) { return static_cast<int>(status); }

int report(nvrr_status status) {
  if (status != NVRR_OK) std::fprintf(stderr, "error: %s\n", nvrr_last_error());
  return exit_code(status);
}

struct ScenarioHandle {
  nvrr_scenario* ptr = nullptr;
  ~ScenarioHandle() { nvrr_scenario_free(ptr); }
};

std::string preset_list() {
  char* names = nullptr;
  if (nvrr_preset_names(&names) != NVRR_OK) return "";
  std::string out = names;
  nvrr_string_free(names);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nvrr - repetitive and error-corrected spin-readout simulator"};
  app.require_subcommand(1);

  // --- run ---
  std::string run_config, run_preset, run_params, run_out_dir = "out";
  std::string run_backend;
  long long run_seed = -1, run_shots = -1;
  bool run_dump = false;
  auto* run = app.add_subcommand("run", "simulate one scenario and write CSV traces");
  run->add_option("config", run_config, "scenario config file (TOML-style)");
  run->add_option("--preset", run_preset, "built-in scenario (" + preset_list() + ")");
  run->add_option("--params", run_params, "config fragment merged over the scenario");
  run->add_option("--out-dir", run_out_dir, "output directory")->capture_default_str();
  run->add_option("--seed", run_seed, "override simulation.seed");
  run->add_option("--shots", run_shots, "override simulation.n_shots");
  run->add_option("--backend", run_backend, "expectation or montecarlo");
  run->add_flag("--dump-config", run_dump, "print the effective config and exit");

  // --- sweep ---
  std::string sweep_file, sweep_preset, sweep_params, sweep_out_dir = "out";
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write sweep.csv");
  sweep->add_option("file", sweep_file, "sweep spec file ([sweep] axis/values + scenario)");
  sweep->add_option("--preset", sweep_preset, "built-in sweep (" + preset_list() + ")");
  sweep->add_option("--params", sweep_params, "config fragment merged over the base scenario");
  sweep->add_option("--out-dir", sweep_out_dir, "output directory")->capture_default_str();

  // --- calibrate ---
  std::string cal_targets, cal_out = "params.toml";
  auto* calibrate =
      app.add_subcommand("calibrate", "fit kappa/contrast from a [calibrate] targets file");
  calibrate->add_option("targets", cal_targets, "targets file")->required();
  calibrate->add_option("--out", cal_out, "parameter file to write")->capture_default_str();

  // --- plot ---
  std::string plot_csv, plot_kind, plot_out;
  auto* plot = app.add_subcommand("plot", "render a run/sweep CSV as a static SVG");
  plot->add_option("csv", plot_csv, "input CSV")->required();
  plot->add_option("--kind", plot_kind, "fidelity_curve, signal, nr_sweep or field_sweep")
      ->required();
  plot->add_option("--out", plot_out, "output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (run_config.empty() == run_preset.empty()) {
      std::fprintf(stderr, "error: run needs exactly one of a config file or --preset\n");
      return 2;
    }
    ScenarioHandle scenario;
    nvrr_status status = run_preset.empty()
                             ? nvrr_scenario_from_file(run_config.c_str(), &scenario.ptr)
                             : nvrr_scenario_from_preset(run_preset.c_str(), &scenario.ptr);
    if (status != NVRR_OK) return report(status);
    if (!run_params.empty() &&
        (status = nvrr_scenario_merge_file(scenario.ptr, run_params.c_str())) != NVRR_OK)
      return report(status);
    if (run_seed >= 0 &&
        (status = nvrr_scenario_override(scenario.ptr, "simulation.seed",
                                         std::to_string(run_seed).c_str())) != NVRR_OK)
      return report(status);
    if (run_shots >= 0 &&
        (status = nvrr_scenario_override(scenario.ptr, "simulation.n_shots",
                                         std::to_string(run_shots).c_str())) != NVRR_OK)
      return report(status);
    if (!run_backend.empty() &&
        (status = nvrr_scenario_override(scenario.ptr, "simulation.backend",
                                         run_backend.c_str())) != NVRR_OK)
      return report(status);
    if (run_dump) {
      char* text = nullptr;
      if ((status = nvrr_scenario_serialize(scenario.ptr, &text)) != NVRR_OK)
        return report(status);
      std::fputs(text, stdout);
      nvrr_string_free(text);
      return 0;
    }
    nvrr_summary summary{};
    if ((status = nvrr_run(scenario.ptr, run_out_dir.c_str(), &summary)) != NVRR_OK)
      return report(status);
    std::printf("wrote %s/{trace,fidelity,summary}.csv\n", run_out_dir.c_str());
    std::printf("F_max = %.4f at N = %d", summary.f_max, summary.n_opt);
    if (std::isfinite(summary.n_1e))
      std::printf(", N_1e = %.0f%s", summary.n_1e,
                  summary.n_1e_low_confidence ? " (low confidence)" : "");
    std::printf(", duration = %.3f ms\n", summary.duration_ms);
    return 0;
  }

  if (sweep->parsed()) {
    if (sweep_file.empty() == sweep_preset.empty()) {
      std::fprintf(stderr, "error: sweep needs exactly one of a spec file or --preset\n");
      return 2;
    }
    const char* params = sweep_params.empty() ? nullptr : sweep_params.c_str();
    const nvrr_status status =
        sweep_preset.empty()
            ? nvrr_sweep_file(sweep_file.c_str(), params, sweep_out_dir.c_str())
            : nvrr_sweep_preset(sweep_preset.c_str(), params, sweep_out_dir.c_str());
    if (status != NVRR_OK) return report(status);
    std::printf("wrote %s/sweep.csv\n", sweep_out_dir.c_str());
    return 0;
  }

  if (calibrate->parsed()) {
    const nvrr_status status = nvrr_calibrate_file(cal_targets.c_str(), cal_out.c_str());
    if (status != NVRR_OK) return report(status);
    std::printf("wrote %s\n", cal_out.c_str());
    return 0;
  }

  if (plot->parsed()) {
    const nvrr_status status =
        nvrr_plot(plot_csv.c_str(), plot_kind.c_str(), plot_out.c_str());
    if (status != NVRR_OK) return report(status);
    std::printf("wrote %s\n", plot_out.c_str());
    return 0;
  }

  return 0;
}
