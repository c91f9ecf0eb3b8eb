#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nvrr/simulate.hpp"

namespace nvrr {

// Numerical failure (fit or calibration could not converge / no solution).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class fit_diverged : public numeric_error {
 public:
  using numeric_error::numeric_error;
};
class no_bracket : public numeric_error {
 public:
  using numeric_error::numeric_error;
};
class unreachable : public numeric_error {
 public:
  using numeric_error::numeric_error;
};
class length_mismatch : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

// Readout fidelity F = (1 + (C0+C1)/(C0-C1)^2)^(-1/2); 0 when C0 = C1.
// Combines shot noise and projection noise; approaches 1 for an ideal
// projective readout.
double readout_fidelity(double c0, double c1);

// Brightness scale s that lifts a readout with fidelity f_base to f_target:
// the s solving F(s*C0, s*C1) = f_target for counts realizing f_base.
double brightness_equivalent(double f_base, double f_target);

// Prefix sums of (c0_k - c1_k).
std::vector<double> cumulative_signal(std::span<const double> trace0,
                                      std::span<const double> trace1);

struct FidelityCurve {
  std::vector<double> n;  // strictly increasing readout numbers
  std::vector<double> f;
  std::vector<double> err;  // optional one-sigma errors (may be empty)
};

struct FidelityPeak {
  int n_opt = 0;
  double f_max = 0.0;
};

// Eq-of-merit applied to the cumulative count totals at every prefix N.
FidelityCurve fidelity_vs_n(std::span<const double> trace0, std::span<const double> trace1);
FidelityPeak curve_peak(const FidelityCurve& curve);

// Least-squares fit of A * (1 - exp(-N / N_1e)) to a cumulative signal.
struct SaturationFit {
  double amplitude = 0.0;
  double n_1e = 0.0;
  double residual_norm = 0.0;
  // Set when the data do not constrain the scale (e.g. still linear); n_1e is
  // then only a lower bound.
  bool low_confidence = false;
};

SaturationFit fit_saturation(std::span<const double> signal);

struct ImprovementResult {
  double f_plain_max = 0.0;
  int n_plain_opt = 0;
  double f_ec_max = 0.0;
  int n_ec_opt = 0;
  double ratio = 0.0;
  double percent = 0.0;
  double brightness_factor = 0.0;
};

// Peak-to-peak comparison of two fidelity curves.
ImprovementResult improvement(const FidelityCurve& plain, const FidelityCurve& ec);

// Idealized three-level model: the nuclear ladder (up-rate p_minus, down-rate
// p_plus) is evolved per readout for both preparations (+1 and -1), a perfect
// |0>_n -> |-1>_n repump fires every ec_period steps (0 = never), and each
// step contributes signal_unit * (1 + polarization)/2 counts per branch.
// Returns the fidelity of the cumulative totals at every prefix.
FidelityCurve ideal_ec_curve(int n_total, int ec_period, double p_minus, double p_plus,
                             double signal_unit);
// Fidelity at N = n_total only.
double ideal_ec_model(int n_total, int ec_period, double p_minus, double p_plus,
                      double signal_unit);

// Everything the plain-readout simulation needs apart from kappa.
struct CalibrationScenario {
  MagneticField b0;
  PhysicsParams physics;
  ReadoutParams readout;
  GateParams gates;
  InitialCondition init;
  int horizon = 0;  // readouts to simulate; 0 picks ~6x the target scale
};

// Root-find (bisection on the monotone map kappa -> fitted N_1e of the
// simulated plain readout) until the fitted scale is within 1% of target.
double calibrate_kappa(double target_n_1e, const CalibrationScenario& scenario);

// Closed-form inversion of the fidelity metric for single-readout counts
// C0 = alpha0, C1 = alpha0 * (1 - c).
double calibrate_contrast(double target_f_single, double alpha0);

// Contrast such that the fully simulated conventional single readout (with
// preparation and charge non-idealities applied) reaches the target fidelity.
// Distinct from calibrate_contrast, which anchors the idealized counts.
double calibrate_contrast_protocol(double target_f_single, const CalibrationScenario& scenario);

struct FieldModelFit {
  double kappa = 0.0;
  double a_es_ghz = 0.0;
};

// Joint fit of (kappa, a_es): kappa is re-calibrated against target_n_1e at
// field b_high for each trial a_es, and a_es is bisected until the simulated
// plain-readout peak fidelity at field b_mid meets target_f_plain. Used when
// a single global kappa cannot reproduce both fields.
FieldModelFit calibrate_field_model(double target_n_1e, MagneticField b_high,
                                    double target_f_plain, MagneticField b_mid,
                                    const CalibrationScenario& base);

// Nonparametric bootstrap standard error of a statistic of two shot tables.
using PairStatistic = std::function<double(const ShotTraces&, const ShotTraces&)>;
double bootstrap_se(const ShotTraces& shots0, const ShotTraces& shots1,
                    const PairStatistic& statistic, int n_resamples = 1000,
                    std::uint64_t seed = 0);

}  // namespace nvrr
