// Acceptance suite: one pass/fail line per criterion.
//
//   nvrr_acceptance          runs all criteria
//   nvrr_acceptance 4 7      runs a subset
//
// Exits nonzero when any requested criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nvrr.h"
#include "nvrr/csv.hpp"
#include "nvrr/scenario.hpp"
#include "nvrr/svg.hpp"

using namespace nvrr;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void expect_range(double value, double lo, double hi, const std::string& name) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.6g not in [%g, %g]", name.c_str(), value, lo, hi);
    expect(value >= lo && value <= hi, buf);
  }
};

// ---------------------------------------------------------------------------
// Shared calibrated model used by criteria 4-6.
// ---------------------------------------------------------------------------

struct Calibrated {
  double contrast = 0.0;
  double kappa = 0.0;
  double a_es = 0.0;
};

CalibrationScenario base_scenario() {
  CalibrationScenario sc;
  sc.b0 = MagneticField{0.244};
  sc.physics = PhysicsParams{};  // p_e0 = 0.81, charge = 0.75
  sc.readout = ReadoutParams{};  // alpha0 = 0.02, repump 0.9
  sc.gates = GateParams{};
  sc.init = InitialCondition{};  // nuclear |+1>
  return sc;
}

// Global calibration: contrast from the simulated conventional single readout
// (the closed-form anchor is exercised separately by criterion 3), kappa from
// the high-field saturation scale with the default hyperfine constant. Used
// by criteria 4 and 6.
const Calibrated& global_calibration() {
  static const Calibrated calib = [] {
    Calibrated c;
    CalibrationScenario sc = base_scenario();
    c.contrast = calibrate_contrast_protocol(0.03, sc);
    sc.readout.contrast = c.contrast;
    c.a_es = sc.physics.a_es_ghz;
    c.kappa = calibrate_kappa(1700.0, sc);
    return c;
  }();
  return calib;
}

ScenarioConfig calibrated_config(const Calibrated& c, double b0_mt, ProtocolKind kind, int n,
                                 int n_r) {
  ScenarioConfig config;
  config.b0_mt = b0_mt;
  config.physics.a_es_ghz = c.a_es;
  config.readout.contrast = c.contrast;
  config.readout.kappa = c.kappa;
  config.protocol.kind = kind;
  config.protocol.n = n;
  config.protocol.n_r = n_r;
  return config;
}

double improvement_at(const Calibrated& c, double b0_mt, int n_r, int horizon) {
  const RunResult plain =
      simulate_scenario(calibrated_config(c, b0_mt, ProtocolKind::repetitive, horizon, 0));
  const RunResult ec =
      simulate_scenario(calibrated_config(c, b0_mt, ProtocolKind::error_corrected, horizon, n_r));
  return improvement(plain.curve, ec.curve).ratio;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

Check criterion_1() {
  Check c;
  const PhysicsParams phys{};
  const double b_eslac = eslac_field(phys);

  const auto at_eslac = flip_flop_probabilities(MagneticField{b_eslac}, phys);
  c.expect(std::abs(at_eslac.p_minus - 1.0) <= 1e-12, "p_minus(B_eslac) != 1 within 1e-12");

  const double ratio = at_eslac.p_minus / at_eslac.p_plus;
  c.expect_range(ratio, 1e3, 1e4, "p_minus/p_plus at 50.7 mT");

  for (int i = 0; i <= 100; ++i) {
    const double b = -0.4 + 0.8 * i / 100.0;
    const auto fwd = flip_flop_probabilities(MagneticField{b}, phys);
    const auto rev = flip_flop_probabilities(MagneticField{-b}, phys);
    if (std::abs(fwd.p_plus - rev.p_minus) > 1e-12) {
      c.expect(false, "mirror symmetry broken at B0 = " + std::to_string(b));
      break;
    }
  }
  return c;
}

Check criterion_2() {
  Check c;
  const PhysicsParams phys{};
  const double b_eslac = eslac_field(phys);

  const auto pi = dnp_steady_state(MagneticField{b_eslac}, phys);
  c.expect(pi.pi_plus1 > 0.95, "steady-state pi(+1) <= 0.95 at the anti-crossing");

  const auto flat = dnp_steady_state(MagneticField{0.0}, phys);
  c.expect(std::abs(flat.pi_minus1 - 1.0 / 3.0) <= 1e-12 &&
               std::abs(flat.pi_0 - 1.0 / 3.0) <= 1e-12 &&
               std::abs(flat.pi_plus1 - 1.0 / 3.0) <= 1e-12,
           "zero-field steady state not uniform within 1e-12");

  // Propagate 200 init pulses from an unpolarized bright state.
  PhysicsParams ideal = phys;
  ideal.p_e0 = 1.0;
  ideal.charge_fidelity = 1.0;
  ReadoutParams readout;
  readout.kappa = 1.0;
  const InitialCondition ic{1.0, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 1.0};
  const auto trace = propagate(build_dnp_eslac(200), initial_state(ic), MagneticField{b_eslac},
                               ideal, readout, GateParams{});
  const auto& s = trace.final_state;
  const double tv = 0.5 * (std::abs(s.nuclear_marginal(-1) - pi.pi_minus1) +
                           std::abs(s.nuclear_marginal(0) - pi.pi_0) +
                           std::abs(s.nuclear_marginal(+1) - pi.pi_plus1));
  char buf[96];
  std::snprintf(buf, sizeof buf, "pulse train total variation %.3g > 1e-3", tv);
  c.expect(tv <= 1e-3, buf);
  return c;
}

Check criterion_3() {
  Check c;
  const double contrast = calibrate_contrast(0.03, 0.02);
  const double f = readout_fidelity(0.02, 0.02 * (1.0 - contrast));
  c.expect_range(f, 0.025, 0.035, "single-readout fidelity with calibrated contrast");
  return c;
}

Check criterion_4() {
  Check c;
  const RunResult run = simulate_scenario(
      calibrated_config(global_calibration(), 244.0, ProtocolKind::repetitive, 8000, 0));
  c.expect(run.fit.has_value(), "saturation fit failed");
  if (run.fit) c.expect_range(run.fit->n_1e, 1700.0 * 0.95, 1700.0 * 1.05, "N_1e");
  c.expect_range(run.f_max, 0.32, 0.48, "F_max at 244 mT");
  c.expect_range(run.n_opt, 1500, 3500, "N_opt at 244 mT");
  return c;
}

Check evaluate_criterion_5(const Calibrated& calib) {
  Check c;
  const RunResult plain =
      simulate_scenario(calibrated_config(calib, 82.0, ProtocolKind::repetitive, 1500, 0));
  const RunResult ec =
      simulate_scenario(calibrated_config(calib, 82.0, ProtocolKind::error_corrected, 1500, 5));
  const ImprovementResult result = improvement(plain.curve, ec.curve);

  c.expect_range(result.f_plain_max, 0.06, 0.10, "plain F_max at 82 mT");
  c.expect_range(result.n_plain_opt, 60, 240, "plain N_opt");
  c.expect_range(result.f_ec_max, 0.10, 0.16, "corrected F_max at 82 mT");
  c.expect_range(result.n_ec_opt, 120, 470, "corrected N_opt");
  c.expect_range(result.percent, 40.0, 75.0, "improvement percent");
  c.expect_range(result.brightness_factor, 2.0, 3.0, "brightness-equivalent factor");
  return c;
}

Check criterion_5() {
  // Try the single global kappa first; when any 82 mT target misses, the
  // documented fallback refits (kappa, A_es) jointly against the high-field
  // saturation scale and a mid-band plain fidelity at 82 mT.
  Check with_global = evaluate_criterion_5(global_calibration());
  if (with_global.ok) {
    with_global.detail = "global kappa";
    return with_global;
  }
  CalibrationScenario sc = base_scenario();
  sc.readout.contrast = global_calibration().contrast;
  const FieldModelFit fit =
      calibrate_field_model(1700.0, MagneticField{0.244}, 0.09, MagneticField{0.082}, sc);
  Calibrated joint;
  joint.contrast = global_calibration().contrast;
  joint.kappa = fit.kappa;
  joint.a_es = fit.a_es_ghz;
  Check c = evaluate_criterion_5(joint);
  char buf[128];
  std::snprintf(buf, sizeof buf, "joint fit (kappa = %.4g, A_es = %.4g GHz) after global miss: %s",
                fit.kappa, fit.a_es_ghz, with_global.detail.c_str());
  c.detail = c.detail.empty() ? buf : c.detail + "; " + buf;
  return c;
}

Check criterion_6() {
  Check c;
  const Calibrated& calib = global_calibration();
  const double b_eslac_mt = eslac_field(PhysicsParams{}) * 1000.0;
  const std::vector<double> grid = {20.0, 30.0, 40.0, 45.0, b_eslac_mt, 55.0,
                                    60.0, 70.0, 82.0,  100.0, 120.0,     140.0};

  for (int n_r : {1, 2}) {
    double best = 0.0;
    std::vector<double> ratios;
    for (double b : grid) ratios.push_back(improvement_at(calib, b, n_r, 6000));
    for (size_t i = 0; i < grid.size(); ++i)
      if (grid[i] >= 20.0 && grid[i] <= 140.0) best = std::max(best, ratios[i]);
    char buf[96];
    std::snprintf(buf, sizeof buf, "max improvement %.3f <= 1.5 for N_r = %d", best, n_r);
    c.expect(best > 1.5, buf);

    bool has_local_min = false;
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
      if (std::abs(grid[i] - b_eslac_mt) > 15.0) continue;
      if (ratios[i] <= ratios[i - 1] && ratios[i] <= ratios[i + 1]) has_local_min = true;
    }
    std::snprintf(buf, sizeof buf,
                  "no local improvement minimum within 15 mT of the anti-crossing (N_r = %d)",
                  n_r);
    c.expect(has_local_min, buf);
  }

  c.expect_range(improvement_at(calib, 244.0, 5, 8000), 1.00, 1.15,
                 "improvement at 244 mT, N_r = 5");
  return c;
}

Check criterion_7() {
  Check c;
  const double p_minus = 0.01;
  const double p_plus = 1e-6;
  const double unit = 1e-6;
  const double f_plain = curve_peak(ideal_ec_curve(4000, 0, p_minus, p_plus, unit)).f_max;
  std::vector<double> log_nr, log_gain;
  for (int nr = 1; nr <= 10; ++nr) {
    const int horizon = 120000 / nr + 4000;
    const double f_ec = curve_peak(ideal_ec_curve(horizon, nr, p_minus, p_plus, unit)).f_max;
    log_nr.push_back(std::log(static_cast<double>(nr)));
    log_gain.push_back(std::log(f_ec / f_plain));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(log_nr.size());
  for (int i = 0; i < n; ++i) {
    sx += log_nr[i];
    sy += log_gain[i];
    sxx += log_nr[i] * log_nr[i];
    sxy += log_nr[i] * log_gain[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  c.expect_range(slope, -0.6, -0.4, "log-log slope of improvement vs N_r");
  return c;
}

Check criterion_8() {
  Check c;
  std::mt19937 eng(20240810);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n_shots = 10000;
  int slots_total = 0;
  int slots_outside = 0;

  for (int scenario_id = 0; scenario_id < 10; ++scenario_id) {
    ScenarioConfig config;
    config.b0_mt = 20.0 + 230.0 * unit(eng);
    config.readout.kappa = 0.5 + 4.5 * unit(eng);
    config.readout.contrast = 0.1 + 0.5 * unit(eng);
    config.readout.repump_prob = 0.7 + 0.3 * unit(eng);
    config.physics.p_e0 = 0.7 + 0.3 * unit(eng);
    config.physics.charge_fidelity = 0.6 + 0.4 * unit(eng);
    config.gates.pi_fidelity = 0.9 + 0.1 * unit(eng);
    config.protocol.n = 5 + static_cast<int>(unit(eng) * 45);
    if (scenario_id % 2 == 0) {
      config.protocol.kind = ProtocolKind::error_corrected;
      config.protocol.n_r = 1 + static_cast<int>(unit(eng) * 5);
    }

    for (Prep prep : {Prep::electron0, Prep::electron_minus1}) {
      const PulseSequence seq = config.protocol.kind == ProtocolKind::error_corrected
                                    ? build_error_corrected(prep, config.protocol.n,
                                                            config.protocol.n_r)
                                    : build_repetitive_readout(prep, config.protocol.n);
      const ShotTraces shots = sample(seq, config.initial_condition(), config.field(),
                                      config.physics, config.readout, config.gates, n_shots,
                                      1000 + scenario_id);

      // Per-slot mean and variance (Poisson + branching) from the propagated
      // state, stepping the maps directly.
      PopulationState state = initial_state(config.initial_condition());
      const StochasticMap laser = laser_pulse_map(config.field(), config.physics, config.readout);
      int slot = 0;
      for (const auto& step : seq.steps) {
        const StochasticMap* map = nullptr;
        StochasticMap gate_map;
        if (const auto* gate = std::get_if<GateStep>(&step)) {
          gate_map = gate->label.kind == TransitionLabel::Kind::mw
                         ? mw_pi_map(gate->label, config.gates)
                         : rf_pi_map(gate->label, config.gates);
          map = &gate_map;
        } else {
          map = &laser;
        }
        if (const auto* laser_step = std::get_if<LaserStep>(&step);
            laser_step && laser_step->role == LaserRole::readout) {
          double mean = 0.0, second = 0.0;
          for (int l = 0; l < kNumLevels; ++l) {
            const double y = map->photon_yield[l];
            mean += state.p[l] * y;
            second += state.p[l] * (y + y * y);
          }
          const double var = std::max(second - mean * mean, 0.0);
          const double se = std::sqrt(var / n_shots);
          ++slots_total;
          if (std::abs(shots.slot_mean(slot) - mean) > 3.0 * se + 1e-12) ++slots_outside;
          ++slot;
        }
        map->apply(state);
      }
    }
  }

  char buf[128];
  std::snprintf(buf, sizeof buf, "%d of %d slots outside 3 standard errors", slots_outside,
                slots_total);
  c.expect(slots_outside <= static_cast<int>(0.05 * slots_total), buf);
  return c;
}

Check criterion_9() {
  Check c;
  // Column stochasticity across the parameter grid, including saturated
  // backaction at the anti-crossing.
  std::mt19937 eng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double fid = unit(eng);
    const GateParams gates{fid, unit(eng) * (1.0 - fid)};
    ReadoutParams readout;
    readout.kappa = trial % 3 == 0 ? 40.0 * unit(eng) : unit(eng) * 5.0;
    readout.repump_prob = unit(eng);
    PhysicsParams phys;
    phys.p_e0 = unit(eng);
    const MagneticField b{trial % 5 == 0 ? eslac_field(phys) : -0.5 + unit(eng)};
    for (const auto& m :
         {mw_pi_map(labels::MWB, gates), mw_pi_map(labels::MWC, gates),
          mw_pi_map(labels::MWE, gates), rf_pi_map(labels::RFA, gates),
          rf_pi_map(labels::RFB, gates), cnot_store_map(gates), swap_correct_map(gates),
          laser_pulse_map(b, phys, readout)}) {
      worst = std::max(worst, m.column_sum_error());
      worst = std::max(worst, std::max(0.0, -m.min_entry()));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst column-stochasticity defect %.3g > 1e-12", worst);
  c.expect(worst <= 1e-12, buf);

  // Per-step normalization along a corrected sequence.
  ScenarioConfig config =
      calibrated_config(global_calibration(), 82.0, ProtocolKind::error_corrected, 600, 5);
  PopulationState state = initial_state(config.initial_condition());
  const StochasticMap laser = laser_pulse_map(config.field(), config.physics, config.readout);
  double worst_norm = 0.0;
  for (const auto& step : build_error_corrected(Prep::electron_minus1, 600, 5).steps) {
    if (const auto* gate = std::get_if<GateStep>(&step)) {
      (gate->label.kind == TransitionLabel::Kind::mw ? mw_pi_map(gate->label, config.gates)
                                                     : rf_pi_map(gate->label, config.gates))
          .apply(state);
    } else {
      laser.apply(state);
    }
    worst_norm = std::max(worst_norm, std::abs(state.sum() - 1.0));
  }
  std::snprintf(buf, sizeof buf, "worst propagated normalization defect %.3g > 1e-12", worst_norm);
  c.expect(worst_norm <= 1e-12, buf);

  // Perfect-gate correction step: the exact permutation cycle.
  const auto m = swap_correct_map(GateParams{1.0, 0.0});
  const int l00 = level_index(0, 0), lm1m1 = level_index(-1, -1), lm10 = level_index(-1, 0);
  c.expect(m.matrix[lm1m1][l00] == 1.0, "|0,0> -> |-1,-1> missing");
  c.expect(m.matrix[lm10][lm1m1] == 1.0, "|-1,-1> -> |-1,0> missing");
  c.expect(m.matrix[l00][lm10] == 1.0, "|-1,0> -> |0,0> missing");
  c.expect(m.matrix[level_index(0, -1)][level_index(0, -1)] == 1.0, "|0,-1> not fixed");
  const auto m3 = m.then(m).then(m);
  for (int l : {l00, lm1m1, lm10})
    c.expect(std::abs(m3.matrix[l][l] - 1.0) <= 1e-15, "cube of the correction map not identity on the cycle");
  return c;
}

Check criterion_10() {
  Check c;
  const auto dir =
      std::filesystem::temp_directory_path() / "nvrr_acceptance_repro";
  std::filesystem::remove_all(dir);

  // Two consecutive runs of the same seeded Monte Carlo preset through the
  // shared-library surface must be byte-identical, including the plot.
  for (const char* sub : {"a", "b"}) {
    nvrr_scenario* scenario = nullptr;
    if (nvrr_scenario_from_preset("montecarlo_demo", &scenario) != NVRR_OK) {
      c.expect(false, std::string("preset load failed: ") + nvrr_last_error());
      return c;
    }
    const auto out = (dir / sub).string();
    nvrr_summary summary{};
    if (nvrr_run(scenario, out.c_str(), &summary) != NVRR_OK)
      c.expect(false, std::string("run failed: ") + nvrr_last_error());
    nvrr_scenario_free(scenario);
    if (nvrr_plot((dir / sub / "fidelity.csv").string().c_str(), "fidelity_curve",
                  (dir / sub / "fidelity.svg").string().c_str()) != NVRR_OK)
      c.expect(false, std::string("plot failed: ") + nvrr_last_error());
  }
  if (c.ok) {
    for (const char* name : {"trace.csv", "fidelity.csv", "summary.csv", "shots_prep0.csv",
                             "shots_prep1.csv", "fidelity.svg"}) {
      const auto a = read_text_file((dir / "a" / name).string());
      const auto b = read_text_file((dir / "b" / name).string());
      if (a != b) c.expect(false, std::string(name) + " differs between identical runs");
      if (a.empty()) c.expect(false, std::string(name) + " is empty");
    }
  }
  std::filesystem::remove_all(dir);

  const double ms =
      sequence_duration_us(build_repetitive_readout(Prep::electron0, 2300), TimingBudget{}) /
      1000.0;
  c.expect_range(ms, 3.2 * 0.95, 3.2 * 1.05, "2300-readout duration (ms)");
  return c;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Check()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "flip-flop rate structure (resonance, imbalance, mirror symmetry)", criterion_1},
      {2, "optical nuclear polarization (steady state and pulse-train convergence)", criterion_2},
      {3, "calibrated single-readout fidelity 0.030 +- 0.005", criterion_3},
      {4, "high-field repetitive readout (N_1e 1700 +- 5%, F_max, N_opt)", criterion_4},
      {5, "moderate-field correction gain (plain/corrected peaks, percent, brightness)",
       criterion_5},
      {6, "field dependence of the correction gain (>1.5x band, anti-crossing dip, high-field)",
       criterion_6},
      {7, "ideal-operations model: improvement ~ N_r^(-1/2)", criterion_7},
      {8, "Monte Carlo / expectation backend equivalence", criterion_8},
      {9, "stochasticity contracts (column sums, normalization, correction cycle)", criterion_9},
      {10, "bit-exact reproducibility and timing budget", criterion_10},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& criterion : criteria()) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  criterion %2d: %s  [%.2fs]%s%s\n", result.ok ? "PASS" : "FAIL",
                criterion.id, criterion.name, seconds, result.detail.empty() ? "" : "  -- ",
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
