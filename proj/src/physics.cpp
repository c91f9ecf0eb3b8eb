#include "nvrr/physics.hpp"

#include <algorithm>
#include <cmath>

namespace nvrr {

void PhysicsParams::validate() const {
  if (!(d_es_ghz >= 0.0) || !std::isfinite(d_es_ghz))
    throw invalid_argument("physics: d_es_ghz must be finite and >= 0");
  if (!(a_es_ghz >= 0.0) || !std::isfinite(a_es_ghz))
    throw invalid_argument("physics: a_es_ghz must be finite and >= 0");
  if (!(gyromag_ghz_per_t > 0.0) || !std::isfinite(gyromag_ghz_per_t))
    throw invalid_argument("physics: gyromag_ghz_per_t must be finite and > 0");
  if (!(p_e0 >= 0.0 && p_e0 <= 1.0))
    throw invalid_argument("physics: p_e0 must be in [0, 1]");
  if (!(charge_fidelity >= 0.0 && charge_fidelity <= 1.0))
    throw invalid_argument("physics: charge_fidelity must be in [0, 1]");
}

void MagneticField::validate() const {
  if (!std::isfinite(b0_t) || std::abs(b0_t) > 1.0)
    throw invalid_argument("field: |b0_t| must be <= 1 T");
}

double eslac_field(const PhysicsParams& params) {
  params.validate();
  return params.d_es_ghz / params.gyromag_ghz_per_t;
}

FlipFlopProbs flip_flop_probabilities(MagneticField b0, const PhysicsParams& params) {
  params.validate();
  b0.validate();
  const double two_a2 = 2.0 * params.a_es_ghz * params.a_es_ghz;
  const double zeeman = params.gyromag_ghz_per_t * b0.b0_t;
  const double det_plus = params.d_es_ghz + zeeman;
  const double det_minus = params.d_es_ghz - zeeman;
  FlipFlopProbs out;
  if (two_a2 == 0.0) {
    out.p_plus = 0.0;
    out.p_minus = 0.0;
    return out;
  }
  out.p_plus = two_a2 / (two_a2 + det_plus * det_plus);
  out.p_minus = two_a2 / (two_a2 + det_minus * det_minus);
  return out;
}

FlipFlopProbs per_readout_flip_probs(MagneticField b0, const PhysicsParams& params,
                                     double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw invalid_argument("readout: kappa must be finite and >= 0");
  const FlipFlopProbs per_cycle = flip_flop_probabilities(b0, params);
  return FlipFlopProbs{std::min(1.0, kappa * per_cycle.p_plus),
                       std::min(1.0, kappa * per_cycle.p_minus)};
}

NuclearDistribution dnp_steady_state_from_probs(const FlipFlopProbs& probs) {
  NuclearDistribution out;
  if (probs.p_plus <= 0.0) {
    out.pi_plus1 = 1.0;
    out.degenerate = true;
    return out;
  }
  const double r = probs.p_minus / probs.p_plus;
  const double norm = 1.0 + r + r * r;
  out.pi_minus1 = 1.0 / norm;
  out.pi_0 = r / norm;
  out.pi_plus1 = r * r / norm;
  return out;
}

NuclearDistribution dnp_steady_state(MagneticField b0, const PhysicsParams& params) {
  return dnp_steady_state_from_probs(flip_flop_probabilities(b0, params));
}

}  // namespace nvrr
