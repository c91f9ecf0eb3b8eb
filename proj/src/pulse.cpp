#include "nvrr/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mat3_exp.hpp"

namespace nvrr {

namespace {

void check_spin(int value, const char* what) {
  if (value < -1 || value > 1) throw invalid_argument(std::string(what) + " must be in {-1, 0, +1}");
}

// Left-multiplies `m` by a partial swap of levels (i, j) with weight q.
void apply_partial_swap(std::array<std::array<double, kNumLevels>, kNumLevels>& m,
                        int i, int j, double q) {
  if (q == 0.0) return;
  for (int c = 0; c < kNumLevels; ++c) {
    const double a = m[i][c];
    const double b = m[j][c];
    m[i][c] = (1.0 - q) * a + q * b;
    m[j][c] = q * a + (1.0 - q) * b;
  }
}

}  // namespace

int level_index(int m_s, int m_i) {
  check_spin(m_s, "m_s");
  check_spin(m_i, "m_I");
  return 3 * (m_s + 1) + (m_i + 1);
}

Level level_from_index(int index) {
  if (index < 0 || index >= kDarkLevel) throw invalid_argument("bright level index must be in [0, 8]");
  return Level{index / 3 - 1, index % 3 - 1};
}

PopulationState PopulationState::pure(int m_s, int m_i) {
  PopulationState s;
  s.p[level_index(m_s, m_i)] = 1.0;
  return s;
}

PopulationState PopulationState::dark() {
  PopulationState s;
  s.p[kDarkLevel] = 1.0;
  return s;
}

double PopulationState::sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

double PopulationState::nuclear_marginal(int m_i) const {
  check_spin(m_i, "m_I");
  double total = 0.0;
  for (int m_s = -1; m_s <= 1; ++m_s) total += p[level_index(m_s, m_i)];
  return total;
}

double PopulationState::electron_marginal(int m_s) const {
  check_spin(m_s, "m_s");
  double total = 0.0;
  for (int m_i = -1; m_i <= 1; ++m_i) total += p[level_index(m_s, m_i)];
  return total;
}

void PopulationState::validate() const {
  for (double v : p)
    if (!(v >= 0.0) || !std::isfinite(v)) throw invalid_argument("state: entries must be finite and >= 0");
  if (std::abs(sum() - 1.0) > 1e-9) throw invalid_argument("state: populations must sum to 1");
}

TransitionLabel TransitionLabel::mw(ElectronBranch branch, int m_i) {
  check_spin(m_i, "m_I");
  TransitionLabel l;
  l.kind = Kind::mw;
  l.branch = branch;
  l.m_i = m_i;
  return l;
}

TransitionLabel TransitionLabel::rf(int m_s, NuclearPair pair) {
  check_spin(m_s, "m_s");
  if (m_s == 0) throw invalid_argument("rf label: m_s manifold must be -1 or +1");
  TransitionLabel l;
  l.kind = Kind::rf;
  l.m_s = m_s;
  l.pair = pair;
  return l;
}

std::pair<int, int> TransitionLabel::level_pair() const {
  if (kind == Kind::mw) {
    const int other = branch == ElectronBranch::to_minus1 ? -1 : +1;
    return {level_index(0, m_i), level_index(other, m_i)};
  }
  const int hi = pair == NuclearPair::plus1_zero ? +1 : 0;
  const int lo = pair == NuclearPair::plus1_zero ? 0 : -1;
  return {level_index(m_s, hi), level_index(m_s, lo)};
}

std::string TransitionLabel::name() const {
  if (*this == labels::MWA) return "MWA";
  if (*this == labels::MWB) return "MWB";
  if (*this == labels::MWC) return "MWC";
  if (*this == labels::MWD) return "MWD";
  if (*this == labels::MWE) return "MWE";
  if (*this == labels::RFA) return "RFA";
  if (*this == labels::RFB) return "RFB";
  if (kind == Kind::mw) {
    const char* b = branch == ElectronBranch::to_minus1 ? "0<->-1" : "0<->+1";
    return "MW[" + std::string(b) + ",mI=" + std::to_string(m_i) + "]";
  }
  const char* pr = pair == NuclearPair::plus1_zero ? "+1<->0" : "0<->-1";
  return "RF[ms=" + std::to_string(m_s) + "," + pr + "]";
}

void GateParams::validate() const {
  if (!(pi_fidelity >= 0.0 && pi_fidelity <= 1.0))
    throw invalid_argument("gates: pi_fidelity must be in [0, 1]");
  if (!(crosstalk >= 0.0 && crosstalk <= 1.0 - pi_fidelity))
    throw invalid_argument("gates: crosstalk must be in [0, 1 - pi_fidelity]");
}

void ReadoutParams::validate() const {
  if (!(alpha0 >= 0.0) || !std::isfinite(alpha0))
    throw invalid_argument("readout: alpha0 must be finite and >= 0");
  if (!(contrast >= 0.0 && contrast <= 1.0))
    throw invalid_argument("readout: contrast must be in [0, 1]");
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw invalid_argument("readout: kappa must be finite and >= 0");
  if (!(repump_prob >= 0.0 && repump_prob <= 1.0))
    throw invalid_argument("readout: repump_prob must be in [0, 1]");
  if (!(background >= 0.0)) throw invalid_argument("readout: background must be >= 0");
  if (!(t_read_ns >= 0.0) || !(t_init_ns >= 0.0))
    throw invalid_argument("readout: pulse durations must be >= 0");
}

StochasticMap StochasticMap::identity() {
  StochasticMap m;
  for (int i = 0; i < kNumLevels; ++i) m.matrix[i][i] = 1.0;
  return m;
}

void StochasticMap::apply(PopulationState& state) const {
  std::array<double, kNumLevels> out{};
  for (int c = 0; c < kNumLevels; ++c) {
    const double v = state.p[c];
    if (v == 0.0) continue;
    for (int r = 0; r < kNumLevels; ++r) out[r] += matrix[r][c] * v;
  }
  state.p = out;
}

double StochasticMap::expected_photons(const PopulationState& state) const {
  double total = 0.0;
  for (int i = 0; i < kNumLevels; ++i) total += photon_yield[i] * state.p[i];
  return total;
}

StochasticMap StochasticMap::then(const StochasticMap& next) const {
  StochasticMap out;
  for (int r = 0; r < kNumLevels; ++r)
    for (int c = 0; c < kNumLevels; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kNumLevels; ++k) acc += next.matrix[r][k] * matrix[k][c];
      out.matrix[r][c] = acc;
    }
  // Composition of pure gates; yields do not compose meaningfully, so the
  // result inherits the first map's yield only if the second has none.
  out.photon_yield = photon_yield;
  return out;
}

double StochasticMap::column_sum_error() const {
  double worst = 0.0;
  for (int c = 0; c < kNumLevels; ++c) {
    double s = 0.0;
    for (int r = 0; r < kNumLevels; ++r) s += matrix[r][c];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double StochasticMap::min_entry() const {
  double lo = matrix[0][0];
  for (int r = 0; r < kNumLevels; ++r)
    for (int c = 0; c < kNumLevels; ++c) lo = std::min(lo, matrix[r][c]);
  return lo;
}

StochasticMap mw_pi_map(const TransitionLabel& label, const GateParams& gates) {
  if (label.kind != TransitionLabel::Kind::mw) throw invalid_argument("mw_pi_map: label must be MW");
  gates.validate();
  StochasticMap m = StochasticMap::identity();
  const auto [a, b] = label.level_pair();
  apply_partial_swap(m.matrix, a, b, gates.pi_fidelity);
  for (int adj : {label.m_i - 1, label.m_i + 1}) {
    if (adj < -1 || adj > 1) continue;
    const auto [ca, cb] = TransitionLabel::mw(label.branch, adj).level_pair();
    apply_partial_swap(m.matrix, ca, cb, gates.crosstalk);
  }
  return m;
}

StochasticMap rf_pi_map(const TransitionLabel& label, const GateParams& gates) {
  if (label.kind != TransitionLabel::Kind::rf) throw invalid_argument("rf_pi_map: label must be RF");
  gates.validate();
  StochasticMap m = StochasticMap::identity();
  const auto [a, b] = label.level_pair();
  apply_partial_swap(m.matrix, a, b, gates.pi_fidelity);
  const NuclearPair other = label.pair == NuclearPair::plus1_zero ? NuclearPair::zero_minus1
                                                                  : NuclearPair::plus1_zero;
  const auto [ca, cb] = TransitionLabel::rf(label.m_s, other).level_pair();
  apply_partial_swap(m.matrix, ca, cb, gates.crosstalk);
  return m;
}

StochasticMap cnot_store_map(const GateParams& gates) {
  return rf_pi_map(labels::RFA, gates).then(rf_pi_map(labels::RFB, gates));
}

StochasticMap swap_correct_map(const GateParams& gates) {
  return mw_pi_map(labels::MWC, gates).then(rf_pi_map(labels::RFB, gates));
}

StochasticMap laser_pulse_map(MagneticField b0, const PhysicsParams& phys,
                              const ReadoutParams& readout) {
  phys.validate();
  readout.validate();

  const FlipFlopProbs per_cycle = flip_flop_probabilities(b0, phys);
  const double up = readout.kappa * per_cycle.p_minus;
  const double down = readout.kappa * per_cycle.p_plus;

  // Electron factor: reset to the polarization split with probability
  // repump_prob, otherwise keep m_s. Rows/cols ordered m_s = -1, 0, +1.
  const double reset[3] = {(1.0 - phys.p_e0) / 2.0, phys.p_e0, (1.0 - phys.p_e0) / 2.0};
  double elec[3][3];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      elec[r][c] = readout.repump_prob * reset[r] + (r == c ? 1.0 - readout.repump_prob : 0.0);

  // Nuclear factor: the ladder rate generator driven for one pulse. The
  // exponential keeps multi-flip events within a single pulse (the pulse
  // spans many optical cycles), stays exactly stochastic even at the
  // anti-crossing where kappa * p_minus >> 1, and shares the geometric-ratio
  // stationary state of the per-cycle rates.
  const detail::Mat3 nuc = detail::ladder_step(up, down);

  StochasticMap m;
  for (int ms_c = -1; ms_c <= 1; ++ms_c)
    for (int mi_c = -1; mi_c <= 1; ++mi_c)
      for (int ms_r = -1; ms_r <= 1; ++ms_r)
        for (int mi_r = -1; mi_r <= 1; ++mi_r)
          m.matrix[level_index(ms_r, mi_r)][level_index(ms_c, mi_c)] =
              elec[ms_r + 1][ms_c + 1] * nuc[mi_r + 1][mi_c + 1];
  m.matrix[kDarkLevel][kDarkLevel] = 1.0;

  const double bright = readout.alpha0 + readout.background;
  const double dim = readout.alpha0 * (1.0 - readout.contrast) + readout.background;
  for (int ms = -1; ms <= 1; ++ms)
    for (int mi = -1; mi <= 1; ++mi)
      m.photon_yield[level_index(ms, mi)] = ms == 0 ? bright : dim;
  m.photon_yield[kDarkLevel] = dim;
  return m;
}

}  // namespace nvrr
