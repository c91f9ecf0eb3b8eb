#pragma once

#include <cstdint>
#include <vector>

#include "nvrr/protocol.hpp"

namespace nvrr {

// Preparation mixture: electron polarization split, nuclear distribution, and
// the bright/dark charge mixture.
struct InitialCondition {
  double p_e0 = 0.81;
  NuclearDistribution nuclear{0.0, 0.0, 1.0};
  double charge_fidelity = 0.75;

  void validate() const;
};

// Product-distribution state: charge_fidelity x (electron ⊗ nuclear) on the
// bright levels plus (1 - charge_fidelity) on the dark level. The residual
// electron weight 1 - p_e0 splits equally between m_s = -1 and +1.
PopulationState initial_state(const InitialCondition& ic);

// Expected detected photons per readout slot plus the final state.
struct ExpectedTrace {
  std::vector<double> counts;
  PopulationState final_state;
};

// Applies each primitive's stochastic map in order; at each readout slot the
// expected photon yield is recorded against the incoming state before the
// map acts. Wait steps are identity (no decoherence channels are modeled).
ExpectedTrace propagate(const PulseSequence& seq, const PopulationState& state0,
                        MagneticField b0, const PhysicsParams& phys,
                        const ReadoutParams& readout, const GateParams& gates);

// Integer photon counts for n_shots independent shots, row-major shot x slot.
// Bit-exactly reproducible for a fixed (seed, parameters) regardless of how
// shots are sharded across workers.
struct ShotTraces {
  int n_shots = 0;
  int n_slots = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> counts;

  std::uint32_t at(int shot, int slot) const { return counts[static_cast<size_t>(shot) * n_slots + slot]; }
  double slot_mean(int slot) const;
};

// Stochastic counterpart of propagate: each shot samples a definite level from
// the initial condition, walks it through each map by categorical sampling,
// and draws Poisson photon counts at each readout slot. Each shot derives an
// independent RNG substream from (seed, shot index).
ShotTraces sample(const PulseSequence& seq, const InitialCondition& ic, MagneticField b0,
                  const PhysicsParams& phys, const ReadoutParams& readout,
                  const GateParams& gates, int n_shots, std::uint64_t seed);

}  // namespace nvrr
