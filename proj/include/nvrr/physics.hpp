#pragma once

#include <stdexcept>
#include <string>

namespace nvrr {

// Argument or parameter outside its documented range.
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Excited-state constants of the center plus preparation fidelities.
// Frequencies are in GHz. The electron g-factor and Bohr magneton are folded
// into a single gyromagnetic constant g_e*mu_B/h in GHz/T so that field terms
// stay in frequency units throughout.
struct PhysicsParams {
  double d_es_ghz = 1.42;          // excited-state zero-field splitting
  double a_es_ghz = 0.040;         // perpendicular excited-state hyperfine
  double gyromag_ghz_per_t = 27.992;  // g_e*mu_B/h with g_e = 2
  double p_e0 = 0.81;              // electron polarization into |0>_e after pumping
  double charge_fidelity = 0.75;   // probability of the bright charge state

  void validate() const;
};

// Static field along the center axis, in tesla. Off-axis components are not
// modeled; the sign selects which flip-flop branch is resonantly enhanced.
struct MagneticField {
  double b0_t = 0.0;

  void validate() const;  // |B0| <= 1 T sanity bound
};

// Electron-nuclear flip-flop probabilities per optical cycle, normalized by
// the optical pumping rate. p_minus increments m_I, p_plus decrements it.
struct FlipFlopProbs {
  double p_plus = 0.0;
  double p_minus = 0.0;
};

// Probabilities over the nuclear m_I = -1, 0, +1 levels.
struct NuclearDistribution {
  double pi_minus1 = 0.0;
  double pi_0 = 0.0;
  double pi_plus1 = 0.0;
  // Set when the down-rate vanishes exactly and the ladder has no proper
  // stationary distribution; all weight is reported on m_I = +1.
  bool degenerate = false;

  double sum() const { return pi_minus1 + pi_0 + pi_plus1; }
};

// Field of the excited-state level anti-crossing, D_es / (g_e mu_B / h), in tesla.
double eslac_field(const PhysicsParams& params);

// Per-optical-cycle flip-flop probabilities, 2A^2 / (2A^2 + (D +- g B0)^2).
FlipFlopProbs flip_flop_probabilities(MagneticField b0, const PhysicsParams& params);

// Per-readout-pulse probabilities min(1, kappa * p) where kappa is the
// effective number of optical cycles in one readout laser pulse.
FlipFlopProbs per_readout_flip_probs(MagneticField b0, const PhysicsParams& params,
                                     double kappa);

// Stationary distribution of the nuclear random walk driven by optical
// cycling: m_I increments at rate ~ p_minus and decrements at rate ~ p_plus,
// giving the geometric ladder pi(+1):pi(0):pi(-1) = r^2 : r : 1 with
// r = p_minus / p_plus.
NuclearDistribution dnp_steady_state(MagneticField b0, const PhysicsParams& params);

// Same ladder stationary state from explicit rates; rate scale drops out.
NuclearDistribution dnp_steady_state_from_probs(const FlipFlopProbs& probs);

}  // namespace nvrr
