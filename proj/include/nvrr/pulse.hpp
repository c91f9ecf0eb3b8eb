#pragma once

#include <array>
#include <string>

#include "nvrr/physics.hpp"

namespace nvrr {

// State space: the 9 bright (m_s, m_I) ground-state levels plus one aggregate
// dark charge level. Bright levels are indexed lexicographically in (m_s, m_I)
// so that index = 3*(m_s+1) + (m_I+1); the dark level is index 9.
inline constexpr int kNumLevels = 10;
inline constexpr int kDarkLevel = 9;

struct Level {
  int m_s = 0;  // in {-1, 0, +1}
  int m_i = 0;  // in {-1, 0, +1}
};

int level_index(int m_s, int m_i);
Level level_from_index(int index);  // bright levels only

// Probability vector over the 10 levels.
struct PopulationState {
  std::array<double, kNumLevels> p{};

  static PopulationState pure(int m_s, int m_i);
  static PopulationState dark();

  double sum() const;
  // P(m_I = m_i) over the bright levels only.
  double nuclear_marginal(int m_i) const;
  // P(m_s = m_s) over the bright levels only.
  double electron_marginal(int m_s) const;
  void validate() const;  // entries >= 0, sum == 1 within 1e-9
};

enum class ElectronBranch { to_minus1, to_plus1 };   // 0 <-> -1, 0 <-> +1
enum class NuclearPair { plus1_zero, zero_minus1 };  // +1 <-> 0, 0 <-> -1

// A selective MW or RF transition between two levels.
struct TransitionLabel {
  enum class Kind { mw, rf };

  Kind kind = Kind::mw;
  // MW: electron branch, fixed m_I.
  ElectronBranch branch = ElectronBranch::to_minus1;
  int m_i = 0;
  // RF: nuclear pair within a fixed m_s manifold.
  int m_s = -1;
  NuclearPair pair = NuclearPair::plus1_zero;

  static TransitionLabel mw(ElectronBranch branch, int m_i);
  static TransitionLabel rf(int m_s, NuclearPair pair);

  // The two bright levels the transition couples.
  std::pair<int, int> level_pair() const;
  std::string name() const;

  bool operator==(const TransitionLabel&) const = default;
};

// Named transitions of the hyperfine spectrum. B, C, E sit on the 0 <-> -1
// branch at m_I = +1, 0, -1; A and D sit on the 0 <-> +1 branch.
namespace labels {
inline const TransitionLabel MWA = TransitionLabel::mw(ElectronBranch::to_plus1, +1);
inline const TransitionLabel MWB = TransitionLabel::mw(ElectronBranch::to_minus1, +1);
inline const TransitionLabel MWC = TransitionLabel::mw(ElectronBranch::to_minus1, 0);
inline const TransitionLabel MWD = TransitionLabel::mw(ElectronBranch::to_plus1, 0);
inline const TransitionLabel MWE = TransitionLabel::mw(ElectronBranch::to_minus1, -1);
inline const TransitionLabel RFA = TransitionLabel::rf(-1, NuclearPair::plus1_zero);
inline const TransitionLabel RFB = TransitionLabel::rf(-1, NuclearPair::zero_minus1);
}  // namespace labels

// Error model of a selective pi pulse.
struct GateParams {
  double pi_fidelity = 1.0;  // probability of the intended population swap
  double crosstalk = 0.0;    // probability of also driving the adjacent-m_I transition

  void validate() const;  // pi_fidelity in [0,1], crosstalk in [0, 1-pi_fidelity]
};

// Photon and repumping model of one laser pulse.
struct ReadoutParams {
  double alpha0 = 0.02;      // mean detected photons per pulse from |0>_e
  double contrast = 0.30;    // relative brightness reduction for m_s = +-1
  double kappa = 1.0;        // effective optical cycles per readout pulse
  double repump_prob = 0.9;  // probability one pulse resets the electron
  double background = 0.0;   // additive mean photons per pulse, all levels
  double t_read_ns = 350.0;
  double t_init_ns = 850.0;

  void validate() const;
};

// Column-stochastic transition matrix over the 10 levels together with the
// mean photon yield conditioned on the input level (zero for pure gates).
struct StochasticMap {
  // matrix[r][c] = P(level r after | level c before)
  std::array<std::array<double, kNumLevels>, kNumLevels> matrix{};
  std::array<double, kNumLevels> photon_yield{};

  static StochasticMap identity();

  void apply(PopulationState& state) const;
  double expected_photons(const PopulationState& state) const;
  // Composition: first this map, then `next`.
  StochasticMap then(const StochasticMap& next) const;
  // Largest |column sum - 1| over all columns.
  double column_sum_error() const;
  // Smallest matrix entry (negative values indicate a defect).
  double min_entry() const;
};

// Selective MW pi pulse: swaps the two addressed (m_s, m_I) levels with
// probability pi_fidelity and applies the same swap on each adjacent-m_I pair
// of the branch with probability crosstalk. Dark level untouched.
StochasticMap mw_pi_map(const TransitionLabel& label, const GateParams& gates);

// Selective RF pi pulse: as mw_pi_map but on nuclear pairs within one m_s
// manifold. The crosstalk pair is the other nuclear pair of the manifold and
// shares a level with the addressed pair; the crosstalk swap is applied after
// the addressed swap.
StochasticMap rf_pi_map(const TransitionLabel& label, const GateParams& gates);

// Electron-to-nucleus store: rf_pi_map(RFB) after rf_pi_map(RFA). With perfect
// gates |0,+1> -> |0,+1> and |-1,+1> -> |-1,-1>.
StochasticMap cnot_store_map(const GateParams& gates);

// Correction step: rf_pi_map(RFB) after mw_pi_map(MWC). With perfect gates the
// cycle |0,0> -> |-1,-1> -> |-1,0> -> |0,0> with |0,-1> fixed; all m_I = +1
// and m_s = +1 levels untouched.
StochasticMap swap_correct_map(const GateParams& gates);

// One laser pulse: electron repumping composed with nuclear backaction, plus
// the spin-dependent photon yield. The repump resets the electron, with
// probability repump_prob, to the polarization split (p_e0 on |0>_e and the
// remainder equally on m_s = +-1), so the long-run |0>_e occupation is capped
// by p_e0. Backaction drives the nuclear ladder for one pulse under the rate
// generator with up-rate kappa*p_minus and down-rate kappa*p_plus (matrix
// exponential, so the map saturates gracefully near the anti-crossing and
// shares the geometric-ratio stationary state). The dark level is an
// absorbing identity with the m_s = +-1 brightness.
StochasticMap laser_pulse_map(MagneticField b0, const PhysicsParams& phys,
                              const ReadoutParams& readout);

}  // namespace nvrr
