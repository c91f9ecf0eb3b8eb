#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nvrr/pulse.hpp"

namespace nvrr {

enum class LaserRole { init, readout };
enum class Prep { electron0, electron_minus1 };

struct GateStep {
  TransitionLabel label;
};
struct LaserStep {
  LaserRole role = LaserRole::readout;
};
struct WaitStep {
  double duration_ns = 0.0;
};

using PulseStep = std::variant<GateStep, LaserStep, WaitStep>;

// Ordered pulse primitives with protocol metadata. readout-laser steps are the
// readout slots; their count equals total_readouts.
struct PulseSequence {
  std::vector<PulseStep> steps;
  int total_readouts = 0;
  int ec_period = 0;  // readouts between correction blocks, 0 = none
  Prep prep = Prep::electron0;

  int count_readout_slots() const;
};

// Wall-clock costs of the primitives, in nanoseconds. An RF pulse is charged
// its drive time plus the coil ring-down; a readout laser pulse is charged its
// optical time plus the per-readout dead time. The dead-time default is pinned
// so that 2300 plain readouts take 3.2 ms end to end.
struct TimingBudget {
  double t_init_ns = 850.0;
  double t_read_ns = 350.0;
  double t_mw_ns = 399.0;
  double t_rf_pulse_ns = 9601.0;
  double t_rf_ringdown_ns = 20000.0;
  double t_readout_dead_ns = 616.0;

  // Cost of one correction block (MW pi + RF pi + ring-down): 30 us by default.
  double ec_block_ns() const { return t_mw_ns + t_rf_pulse_ns + t_rf_ringdown_ns; }
  void validate() const;
};

// Characterization sequence: init laser, optional MWB pi (prep in |-1>_e),
// CNOT store (RFA, RFB), then n x (MWE pi, readout laser).
PulseSequence build_repetitive_readout(Prep prep, int n_readouts);

// As repetitive readout, with a correction block (MWC pi, RFB pi) after every
// ec_period readouts. No block is emitted after the final readout: correcting
// there cannot change any recorded count.
PulseSequence build_error_corrected(Prep prep, int n_readouts, int ec_period);

// n repeated init-laser pulses, no gates; drives the nuclear ladder toward its
// optical-pumping steady state.
PulseSequence build_dnp_eslac(int n_pulses);

// n rounds of [init laser, selective MW pi, RF pi] alternating the two ladder
// stages (+1 -> 0 via MWB/RFA, -1 -> 0 via MWE/RFB), transferring electron
// polarization onto the nucleus toward |0>_n.
PulseSequence build_swap_polarization(int n_rounds);

// Baseline conventional readout: init laser, optional MWB pi, one readout.
PulseSequence build_conventional_readout(Prep prep);

// Sum of primitive costs in microseconds. Additive under concatenation.
double sequence_duration_us(const PulseSequence& seq, const TimingBudget& timing);

// Line-oriented text form, one primitive per line: kind, label, duration (ns).
std::string serialize_sequence(const PulseSequence& seq, const TimingBudget& timing);

}  // namespace nvrr
