#include "nvrr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mat3_exp.hpp"

namespace nvrr {

namespace {

// Bisection on [lo, hi] for a continuous f with a sign change. Returns the
// midpoint once the interval or |f| is below tolerance.
double bisect(const std::function<double(double)>& f, double lo, double hi, double f_tol,
              int max_iter, const char* what) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw no_bracket(std::string(what) + ": target not bracketed on the search interval");
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < max_iter; ++i) {
    mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (std::abs(f_mid) <= f_tol) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

ExpectedTrace run_plain(const CalibrationScenario& sc, double kappa, double a_es, Prep prep,
                        int horizon) {
  PhysicsParams phys = sc.physics;
  phys.a_es_ghz = a_es;
  ReadoutParams readout = sc.readout;
  readout.kappa = kappa;
  InitialCondition ic = sc.init;
  ic.p_e0 = phys.p_e0;
  ic.charge_fidelity = phys.charge_fidelity;
  return propagate(build_repetitive_readout(prep, horizon), initial_state(ic), sc.b0, phys,
                   readout, sc.gates);
}

double fitted_scale(const CalibrationScenario& sc, double kappa, double a_es, int horizon) {
  const auto trace0 = run_plain(sc, kappa, a_es, Prep::electron0, horizon);
  const auto trace1 = run_plain(sc, kappa, a_es, Prep::electron_minus1, horizon);
  const auto signal = cumulative_signal(trace0.counts, trace1.counts);
  return fit_saturation(signal).n_1e;
}

double plain_peak_fidelity(const CalibrationScenario& sc, double kappa, double a_es,
                           int horizon) {
  const auto trace0 = run_plain(sc, kappa, a_es, Prep::electron0, horizon);
  const auto trace1 = run_plain(sc, kappa, a_es, Prep::electron_minus1, horizon);
  return curve_peak(fidelity_vs_n(trace0.counts, trace1.counts)).f_max;
}

}  // namespace

double readout_fidelity(double c0, double c1) {
  if (!(c0 >= 0.0) || !(c1 >= 0.0))
    throw invalid_argument("readout_fidelity: counts must be >= 0");
  const double diff = c0 - c1;
  if (diff == 0.0) return 0.0;
  return 1.0 / std::sqrt(1.0 + (c0 + c1) / (diff * diff));
}

double brightness_equivalent(double f_base, double f_target) {
  if (!(f_base > 0.0 && f_base < 1.0) || !(f_target > 0.0 && f_target < 1.0))
    throw invalid_argument("brightness_equivalent: fidelities must be in (0, 1)");
  // F(s C0, s C1) = (1 + Q/s)^{-1/2} with Q = (C0+C1)/(C0-C1)^2, so the scale
  // needed is the ratio of the two Q values.
  const double q_base = 1.0 / (f_base * f_base) - 1.0;
  const double q_target = 1.0 / (f_target * f_target) - 1.0;
  return q_base / q_target;
}

std::vector<double> cumulative_signal(std::span<const double> trace0,
                                      std::span<const double> trace1) {
  if (trace0.size() != trace1.size())
    throw length_mismatch("cumulative_signal: traces must have equal length");
  std::vector<double> out(trace0.size());
  double acc = 0.0;
  for (size_t i = 0; i < trace0.size(); ++i) {
    acc += trace0[i] - trace1[i];
    out[i] = acc;
  }
  return out;
}

FidelityCurve fidelity_vs_n(std::span<const double> trace0, std::span<const double> trace1) {
  if (trace0.size() != trace1.size())
    throw length_mismatch("fidelity_vs_n: traces must have equal length");
  FidelityCurve curve;
  curve.n.reserve(trace0.size());
  curve.f.reserve(trace0.size());
  double total0 = 0.0;
  double total1 = 0.0;
  for (size_t i = 0; i < trace0.size(); ++i) {
    total0 += trace0[i];
    total1 += trace1[i];
    curve.n.push_back(static_cast<double>(i + 1));
    curve.f.push_back(readout_fidelity(std::max(0.0, total0), std::max(0.0, total1)));
  }
  return curve;
}

FidelityPeak curve_peak(const FidelityCurve& curve) {
  if (curve.f.empty()) throw invalid_argument("curve_peak: empty curve");
  size_t best = 0;
  for (size_t i = 1; i < curve.f.size(); ++i)
    if (curve.f[i] > curve.f[best]) best = i;
  return FidelityPeak{static_cast<int>(std::lround(curve.n[best])), curve.f[best]};
}

SaturationFit fit_saturation(std::span<const double> signal) {
  if (signal.size() < 3) throw invalid_argument("fit_saturation: need at least 3 points");
  const size_t n = signal.size();
  const double n_max = static_cast<double>(n);
  const double scale_cap = 100.0 * n_max;

  // Deterministic start: amplitude from the final value, scale from where the
  // signal first crosses a third of it.
  double amp = signal.back();
  if (amp == 0.0) amp = 1e-12;
  double scale = n_max / 3.0;
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(signal[i]) >= std::abs(amp) / 3.0) {
      scale = static_cast<double>(i + 1) / std::log(1.5);
      break;
    }
  }
  scale = std::clamp(scale, 1e-3, scale_cap);

  auto residual_norm2 = [&](double a, double s) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r = a * (1.0 - std::exp(-static_cast<double>(i + 1) / s)) - signal[i];
      acc += r * r;
    }
    return acc;
  };

  double best = residual_norm2(amp, scale);
  const double initial = best;
  double lambda = 1e-3;
  bool improved_once = false;
  for (int iter = 0; iter < 200; ++iter) {
    // Gauss-Newton normal equations with Levenberg damping.
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double x = static_cast<double>(i + 1);
      const double e = std::exp(-x / scale);
      const double model = amp * (1.0 - e);
      const double r = model - signal[i];
      const double ja = 1.0 - e;
      const double js = -amp * e * x / (scale * scale);
      jtj00 += ja * ja;
      jtj01 += ja * js;
      jtj11 += js * js;
      jtr0 += ja * r;
      jtr1 += js * r;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
      const double a00 = jtj00 * (1.0 + lambda);
      const double a11 = jtj11 * (1.0 + lambda);
      const double det = a00 * a11 - jtj01 * jtj01;
      if (det == 0.0 || !std::isfinite(det)) break;
      const double da = (-jtr0 * a11 + jtr1 * jtj01) / det;
      const double ds = (-jtr1 * a00 + jtr0 * jtj01) / det;
      const double amp_try = amp + da;
      const double scale_try = std::clamp(scale + ds, 1e-3, scale_cap);
      const double cost = residual_norm2(amp_try, scale_try);
      if (cost < best) {
        amp = amp_try;
        scale = scale_try;
        best = cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        improved_once = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) break;
    if (best <= 1e-24) break;
  }
  if (!improved_once && best > initial)
    throw fit_diverged("fit_saturation: residual failed to decrease");

  SaturationFit fit;
  fit.amplitude = amp;
  fit.n_1e = scale;
  fit.residual_norm = std::sqrt(best);
  fit.low_confidence = scale >= 2.0 * n_max;
  return fit;
}

ImprovementResult improvement(const FidelityCurve& plain, const FidelityCurve& ec) {
  const FidelityPeak p = curve_peak(plain);
  const FidelityPeak e = curve_peak(ec);
  ImprovementResult out;
  out.f_plain_max = p.f_max;
  out.n_plain_opt = p.n_opt;
  out.f_ec_max = e.f_max;
  out.n_ec_opt = e.n_opt;
  out.ratio = p.f_max > 0.0 ? e.f_max / p.f_max : std::numeric_limits<double>::infinity();
  out.percent = (out.ratio - 1.0) * 100.0;
  out.brightness_factor = (p.f_max > 0.0 && p.f_max < 1.0 && e.f_max > 0.0 && e.f_max < 1.0)
                              ? brightness_equivalent(p.f_max, e.f_max)
                              : 0.0;
  return out;
}

FidelityCurve ideal_ec_curve(int n_total, int ec_period, double p_minus, double p_plus,
                             double signal_unit) {
  if (n_total < 1) throw invalid_argument("ideal_ec_curve: n_total must be >= 1");
  if (ec_period < 0) throw invalid_argument("ideal_ec_curve: ec_period must be >= 0");
  for (double p : {p_minus, p_plus})
    if (!(p >= 0.0 && p <= 1.0)) throw invalid_argument("ideal_ec_curve: probabilities in [0, 1]");

  // One readout step evolves the ladder for unit time under the rate
  // generator (up p_minus, down p_plus). The exponential keeps multi-flip
  // events within a single step, so the error accumulated over a correction
  // period depends only on p * ec_period.
  const detail::Mat3 step_map = detail::ladder_step(p_minus, p_plus);

  // pi[b][k] with k = 0,1,2 for m_I = -1, 0, +1; branch 0 prepared in +1,
  // branch 1 prepared in -1.
  double pi[2][3] = {{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}};
  FidelityCurve curve;
  curve.n.reserve(n_total);
  curve.f.reserve(n_total);
  double total0 = 0.0;
  double total1 = 0.0;
  for (int step = 1; step <= n_total; ++step) {
    total0 += signal_unit * (1.0 + pi[0][2] - pi[0][0]) / 2.0;
    total1 += signal_unit * (1.0 + pi[1][2] - pi[1][0]) / 2.0;
    for (auto& b : pi) {
      const double in[3] = {b[0], b[1], b[2]};
      for (int r = 0; r < 3; ++r)
        b[r] = step_map[r][0] * in[0] + step_map[r][1] * in[1] + step_map[r][2] * in[2];
    }
    if (ec_period > 0 && step % ec_period == 0) {
      for (auto& b : pi) {
        b[0] += b[1];
        b[1] = 0.0;
      }
    }
    curve.n.push_back(static_cast<double>(step));
    curve.f.push_back(readout_fidelity(total0, total1));
  }
  return curve;
}

double ideal_ec_model(int n_total, int ec_period, double p_minus, double p_plus,
                      double signal_unit) {
  return ideal_ec_curve(n_total, ec_period, p_minus, p_plus, signal_unit).f.back();
}

double calibrate_kappa(double target_n_1e, const CalibrationScenario& scenario) {
  if (!(target_n_1e > 0.0)) throw invalid_argument("calibrate_kappa: target must be > 0");
  const int horizon = scenario.horizon > 0
                          ? scenario.horizon
                          : static_cast<int>(std::clamp(6.0 * target_n_1e, 300.0, 60000.0));
  // Fitted scale decreases monotonically with kappa; bisect in log space.
  auto f = [&](double log_kappa) {
    return fitted_scale(scenario, std::exp(log_kappa), scenario.physics.a_es_ghz, horizon) -
           target_n_1e;
  };
  const double log_kappa = bisect(f, std::log(1e-3), std::log(1e3), 0.01 * target_n_1e, 60,
                                  "calibrate_kappa");
  return std::exp(log_kappa);
}

double calibrate_contrast(double target_f_single, double alpha0) {
  if (!(target_f_single > 0.0 && target_f_single < 1.0))
    throw invalid_argument("calibrate_contrast: target fidelity must be in (0, 1)");
  if (!(alpha0 > 0.0)) throw invalid_argument("calibrate_contrast: alpha0 must be > 0");
  // With C0 = a, C1 = a(1-c): 1/F^2 - 1 = (2 - c) / (a c^2).
  const double q = 1.0 / (target_f_single * target_f_single) - 1.0;
  const double qa = q * alpha0;
  const double c = (-1.0 + std::sqrt(1.0 + 8.0 * qa)) / (2.0 * qa);
  if (!(c > 0.0 && c <= 1.0))
    throw unreachable("calibrate_contrast: no contrast in (0, 1] reaches the target fidelity");
  return c;
}

double calibrate_contrast_protocol(double target_f_single, const CalibrationScenario& scenario) {
  if (!(target_f_single > 0.0 && target_f_single < 1.0))
    throw invalid_argument("calibrate_contrast_protocol: target fidelity must be in (0, 1)");
  auto fidelity_at = [&](double contrast) {
    ReadoutParams readout = scenario.readout;
    readout.contrast = contrast;
    InitialCondition ic = scenario.init;
    ic.p_e0 = scenario.physics.p_e0;
    ic.charge_fidelity = scenario.physics.charge_fidelity;
    const PopulationState s0 = initial_state(ic);
    const auto t0 = propagate(build_conventional_readout(Prep::electron0), s0, scenario.b0,
                              scenario.physics, readout, scenario.gates);
    const auto t1 = propagate(build_conventional_readout(Prep::electron_minus1), s0, scenario.b0,
                              scenario.physics, readout, scenario.gates);
    return readout_fidelity(t0.counts.at(0), t1.counts.at(0));
  };
  if (fidelity_at(1.0) < target_f_single)
    throw unreachable("calibrate_contrast_protocol: target fidelity above the c = 1 ceiling");
  auto f = [&](double c) { return fidelity_at(c) - target_f_single; };
  return bisect(f, 1e-9, 1.0, 1e-9, 80, "calibrate_contrast_protocol");
}

FieldModelFit calibrate_field_model(double target_n_1e, MagneticField b_high,
                                    double target_f_plain, MagneticField b_mid,
                                    const CalibrationScenario& base) {
  if (!(target_f_plain > 0.0 && target_f_plain < 1.0))
    throw invalid_argument("calibrate_field_model: target fidelity must be in (0, 1)");
  CalibrationScenario high = base;
  high.b0 = b_high;
  CalibrationScenario mid = base;
  mid.b0 = b_mid;
  const int mid_horizon = mid.horizon > 0 ? mid.horizon : 2000;
  mid.horizon = mid_horizon;

  double kappa_for_a = 0.0;
  auto f = [&](double a_es) {
    CalibrationScenario trial = high;
    trial.physics.a_es_ghz = a_es;
    kappa_for_a = calibrate_kappa(target_n_1e, trial);
    return plain_peak_fidelity(mid, kappa_for_a, a_es, mid_horizon) - target_f_plain;
  };
  const double a_es = bisect(f, base.physics.a_es_ghz, 2.0, 2e-3, 24, "calibrate_field_model");
  // kappa_for_a holds the value from the last bisection evaluation; recompute
  // at the returned a_es for a consistent pair.
  CalibrationScenario final_high = high;
  final_high.physics.a_es_ghz = a_es;
  return FieldModelFit{calibrate_kappa(target_n_1e, final_high), a_es};
}

double bootstrap_se(const ShotTraces& shots0, const ShotTraces& shots1,
                    const PairStatistic& statistic, int n_resamples, std::uint64_t seed) {
  if (shots0.n_shots < 100 || shots1.n_shots < 100)
    throw invalid_argument("bootstrap_se: need at least 100 shots");
  if (n_resamples < 2) throw invalid_argument("bootstrap_se: need at least 2 resamples");

  std::mt19937_64 eng(seed ^ 0x6e76727273650000ULL);
  auto resample = [&](const ShotTraces& src) {
    ShotTraces out;
    out.n_shots = src.n_shots;
    out.n_slots = src.n_slots;
    out.seed = src.seed;
    out.counts.resize(src.counts.size());
    for (int s = 0; s < src.n_shots; ++s) {
      const int pick = static_cast<int>(eng() % static_cast<std::uint64_t>(src.n_shots));
      std::copy_n(src.counts.begin() + static_cast<size_t>(pick) * src.n_slots, src.n_slots,
                  out.counts.begin() + static_cast<size_t>(s) * src.n_slots);
    }
    return out;
  };

  std::vector<double> values(n_resamples);
  for (int i = 0; i < n_resamples; ++i) values[i] = statistic(resample(shots0), resample(shots1));
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n_resamples;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (n_resamples - 1);
  return std::sqrt(var);
}

}  // namespace nvrr
