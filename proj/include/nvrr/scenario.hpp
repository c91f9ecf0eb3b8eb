#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nvrr/analysis.hpp"
#include "nvrr/protocol.hpp"
#include "nvrr/simulate.hpp"

namespace nvrr {

// Config file problem; `path` names the offending section/key when known.
class config_error : public std::runtime_error {
 public:
  config_error(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ProtocolKind { repetitive, error_corrected };
enum class Backend { expectation, montecarlo };
enum class PrepChoice { both, electron0, electron_minus1 };

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::repetitive;
  int n = 100;
  int n_r = 0;
  PrepChoice prep = PrepChoice::both;
};

struct SimulationConfig {
  Backend backend = Backend::expectation;
  int n_shots = 10000;
  std::uint64_t seed = 1;
};

// Full description of one experiment: physics and pulse parameters, field,
// preparation, protocol and simulation backend.
struct ScenarioConfig {
  PhysicsParams physics;
  double b0_mt = 244.0;
  ReadoutParams readout;
  GateParams gates;
  TimingBudget timing;
  NuclearDistribution init_nuclear{0.0, 0.0, 1.0};
  ProtocolConfig protocol;
  SimulationConfig simulation;
  std::string out_dir = ".";

  MagneticField field() const { return MagneticField{b0_mt / 1000.0}; }
  InitialCondition initial_condition() const {
    return InitialCondition{physics.p_e0, init_nuclear, physics.charge_fidelity};
  }
  void validate() const;
};

// Sectioned key-value text format (a TOML subset: [section], key = value,
// numbers, quoted strings, booleans, flat numeric arrays, # comments).
// Unknown sections or keys are rejected with their path.
ScenarioConfig parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioConfig& config);
// Applies the sections present in `text` on top of an existing config.
void merge_scenario_fragment(const std::string& text, ScenarioConfig& config);

// Named built-in scenario/sweep configs.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);  // throws config_error when unknown

// One protocol run: traces for both preparations plus derived analysis.
struct RunResult {
  ExpectedTrace trace0;  // preparation |0>_e
  ExpectedTrace trace1;  // preparation |-1>_e
  FidelityCurve curve;
  std::vector<double> signal;
  std::optional<SaturationFit> fit;
  std::optional<ShotTraces> shots0;  // Monte Carlo backend only
  std::optional<ShotTraces> shots1;
  double f_max = 0.0;
  int n_opt = 0;
  double duration_us = 0.0;
};

// Simulates the configured protocol for both preparations using the selected
// backend (Monte Carlo traces are per-slot means over shots).
RunResult simulate_scenario(const ScenarioConfig& config);

// simulate_scenario plus CSV outputs (trace.csv, fidelity.csv, summary.csv and
// shots_prep*.csv for the Monte Carlo backend) under out_dir.
RunResult run_scenario(const ScenarioConfig& config, const std::string& out_dir);

struct SweepSpec {
  enum class Axis { b0_mt, n_r, n };
  Axis axis = Axis::b0_mt;
  std::vector<double> values;
  ScenarioConfig base;
};

SweepSpec parse_sweep(const std::string& text);

struct SweepRow {
  double value = 0.0;
  std::string protocol;
  double f_max = 0.0;
  int n_opt = 0;
  double n_1e = 0.0;
  double ratio = 1.0;  // corrected over plain peak fidelity at this axis value
};

// Runs plain and (when configured) corrected variants for every axis value;
// rows are ordered by input value regardless of execution order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);
void write_sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                     const std::string& out_path);

// Calibration targets file: [calibrate] section driving kappa/contrast (and
// optionally the joint field-model fit); other sections override the base
// scenario the calibration simulates.
struct CalibrationRequest {
  ScenarioConfig base;
  std::optional<double> target_n_1e;
  std::optional<double> n_1e_b0_mt;
  std::optional<double> target_f_single;
  std::optional<double> alpha0;
  bool protocol_contrast = false;  // invert through the simulator instead of the closed form
  std::optional<double> target_f_plain;
  std::optional<double> f_plain_b0_mt;
};

CalibrationRequest parse_calibration(const std::string& text);
// Returns a config fragment ([readout] kappa/contrast, [physics] a_es_ghz when
// the joint fit ran) suitable for merge_scenario_fragment / --params.
std::string run_calibration(const CalibrationRequest& request);

}  // namespace nvrr
