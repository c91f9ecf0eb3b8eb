#include "nvrr/protocol.hpp"

#include <cmath>
#include <cstdio>

namespace nvrr {

namespace {

void check_count(int n, const char* what) {
  if (n < 1) throw invalid_argument(std::string(what) + " must be >= 1");
}

void push_gate(PulseSequence& seq, const TransitionLabel& label) {
  seq.steps.push_back(GateStep{label});
}

void push_prefix(PulseSequence& seq, Prep prep) {
  seq.steps.push_back(LaserStep{LaserRole::init});
  if (prep == Prep::electron_minus1) push_gate(seq, labels::MWB);
  push_gate(seq, labels::RFA);
  push_gate(seq, labels::RFB);
}

}  // namespace

int PulseSequence::count_readout_slots() const {
  int n = 0;
  for (const auto& step : steps)
    if (const auto* laser = std::get_if<LaserStep>(&step); laser && laser->role == LaserRole::readout)
      ++n;
  return n;
}

void TimingBudget::validate() const {
  for (double v : {t_init_ns, t_read_ns, t_mw_ns, t_rf_pulse_ns, t_rf_ringdown_ns, t_readout_dead_ns})
    if (!(v >= 0.0) || !std::isfinite(v)) throw invalid_argument("timing: durations must be finite and >= 0");
}

PulseSequence build_repetitive_readout(Prep prep, int n_readouts) {
  check_count(n_readouts, "n_readouts");
  PulseSequence seq;
  seq.total_readouts = n_readouts;
  seq.prep = prep;
  push_prefix(seq, prep);
  for (int k = 0; k < n_readouts; ++k) {
    push_gate(seq, labels::MWE);
    seq.steps.push_back(LaserStep{LaserRole::readout});
  }
  return seq;
}

PulseSequence build_error_corrected(Prep prep, int n_readouts, int ec_period) {
  check_count(n_readouts, "n_readouts");
  check_count(ec_period, "ec_period");
  PulseSequence seq;
  seq.total_readouts = n_readouts;
  seq.ec_period = ec_period;
  seq.prep = prep;
  push_prefix(seq, prep);
  for (int k = 1; k <= n_readouts; ++k) {
    push_gate(seq, labels::MWE);
    seq.steps.push_back(LaserStep{LaserRole::readout});
    if (k % ec_period == 0 && k < n_readouts) {
      push_gate(seq, labels::MWC);
      push_gate(seq, labels::RFB);
    }
  }
  return seq;
}

PulseSequence build_dnp_eslac(int n_pulses) {
  check_count(n_pulses, "n_pulses");
  PulseSequence seq;
  for (int k = 0; k < n_pulses; ++k) seq.steps.push_back(LaserStep{LaserRole::init});
  return seq;
}

PulseSequence build_swap_polarization(int n_rounds) {
  check_count(n_rounds, "n_rounds");
  PulseSequence seq;
  for (int k = 0; k < n_rounds; ++k) {
    seq.steps.push_back(LaserStep{LaserRole::init});
    if (k % 2 == 0) {
      push_gate(seq, labels::MWB);  // +1 -> 0 stage
      push_gate(seq, labels::RFA);
    } else {
      push_gate(seq, labels::MWE);  // -1 -> 0 stage
      push_gate(seq, labels::RFB);
    }
  }
  return seq;
}

PulseSequence build_conventional_readout(Prep prep) {
  PulseSequence seq;
  seq.total_readouts = 1;
  seq.prep = prep;
  seq.steps.push_back(LaserStep{LaserRole::init});
  if (prep == Prep::electron_minus1) push_gate(seq, labels::MWB);
  seq.steps.push_back(LaserStep{LaserRole::readout});
  return seq;
}

namespace {

double step_duration_ns(const PulseStep& step, const TimingBudget& t) {
  if (const auto* gate = std::get_if<GateStep>(&step))
    return gate->label.kind == TransitionLabel::Kind::mw ? t.t_mw_ns
                                                         : t.t_rf_pulse_ns + t.t_rf_ringdown_ns;
  if (const auto* laser = std::get_if<LaserStep>(&step))
    return laser->role == LaserRole::init ? t.t_init_ns : t.t_read_ns + t.t_readout_dead_ns;
  return std::get<WaitStep>(step).duration_ns;
}

}  // namespace

double sequence_duration_us(const PulseSequence& seq, const TimingBudget& timing) {
  timing.validate();
  double total_ns = 0.0;
  for (const auto& step : seq.steps) total_ns += step_duration_ns(step, timing);
  return total_ns / 1000.0;
}

std::string serialize_sequence(const PulseSequence& seq, const TimingBudget& timing) {
  timing.validate();
  std::string out = "sequence readouts=" + std::to_string(seq.total_readouts) +
                    " ec_period=" + std::to_string(seq.ec_period) +
                    " prep=" + (seq.prep == Prep::electron0 ? std::string("0") : std::string("-1")) + "\n";
  char line[128];
  for (const auto& step : seq.steps) {
    const double ns = step_duration_ns(step, timing);
    if (const auto* gate = std::get_if<GateStep>(&step)) {
      std::snprintf(line, sizeof line, "gate %s %g\n", gate->label.name().c_str(), ns);
    } else if (const auto* laser = std::get_if<LaserStep>(&step)) {
      std::snprintf(line, sizeof line, "laser %s %g\n",
                    laser->role == LaserRole::init ? "init" : "readout", ns);
    } else {
      std::snprintf(line, sizeof line, "wait - %g\n", ns);
    }
    out += line;
  }
  return out;
}

}  // namespace nvrr
