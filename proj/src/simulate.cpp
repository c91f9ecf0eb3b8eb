#include "nvrr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <random>
#include <stdexcept>
#include <thread>

namespace nvrr {

namespace {

// Maps for the distinct primitives of a sequence, built once.
struct MapSet {
  StochasticMap laser;
  std::map<std::pair<int, int>, StochasticMap> gates;  // keyed by level pair

  const StochasticMap& for_step(const PulseStep& step) const {
    if (const auto* gate = std::get_if<GateStep>(&step)) return gates.at(gate->label.level_pair());
    return laser;
  }
};

MapSet build_maps(const PulseSequence& seq, MagneticField b0, const PhysicsParams& phys,
                  const ReadoutParams& readout, const GateParams& gate_params) {
  MapSet maps;
  maps.laser = laser_pulse_map(b0, phys, readout);
  for (const auto& step : seq.steps) {
    if (const auto* gate = std::get_if<GateStep>(&step)) {
      const auto key = gate->label.level_pair();
      if (maps.gates.count(key)) continue;
      maps.gates.emplace(key, gate->label.kind == TransitionLabel::Kind::mw
                                  ? mw_pi_map(gate->label, gate_params)
                                  : rf_pi_map(gate->label, gate_params));
    }
  }
  return maps;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Knuth's method; yields here are << 1 so the expected loop length is ~1.
std::uint32_t poisson_draw(std::mt19937_64& eng, double mean) {
  if (mean <= 0.0) return 0;
  const double limit = std::exp(-mean);
  std::uint32_t k = 0;
  double prod = uniform01(eng);
  while (prod > limit) {
    ++k;
    prod *= uniform01(eng);
  }
  return k;
}

int categorical(std::mt19937_64& eng, const std::array<double, kNumLevels>& column) {
  const double u = uniform01(eng);
  double acc = 0.0;
  for (int i = 0; i < kNumLevels; ++i) {
    acc += column[i];
    if (u < acc) return i;
  }
  return kNumLevels - 1;
}

std::array<double, kNumLevels> matrix_column(const StochasticMap& m, int c) {
  std::array<double, kNumLevels> col;
  for (int r = 0; r < kNumLevels; ++r) col[r] = m.matrix[r][c];
  return col;
}

}  // namespace

void InitialCondition::validate() const {
  if (!(p_e0 >= 0.0 && p_e0 <= 1.0)) throw invalid_argument("init: p_e0 must be in [0, 1]");
  if (!(charge_fidelity >= 0.0 && charge_fidelity <= 1.0))
    throw invalid_argument("init: charge_fidelity must be in [0, 1]");
  for (double v : {nuclear.pi_minus1, nuclear.pi_0, nuclear.pi_plus1})
    if (!(v >= 0.0)) throw invalid_argument("init: nuclear populations must be >= 0");
  if (std::abs(nuclear.sum() - 1.0) > 1e-9)
    throw invalid_argument("init: nuclear populations must sum to 1");
}

PopulationState initial_state(const InitialCondition& ic) {
  ic.validate();
  const double elec[3] = {(1.0 - ic.p_e0) / 2.0, ic.p_e0, (1.0 - ic.p_e0) / 2.0};
  const double nuc[3] = {ic.nuclear.pi_minus1, ic.nuclear.pi_0, ic.nuclear.pi_plus1};
  PopulationState s;
  for (int ms = -1; ms <= 1; ++ms)
    for (int mi = -1; mi <= 1; ++mi)
      s.p[level_index(ms, mi)] = ic.charge_fidelity * elec[ms + 1] * nuc[mi + 1];
  s.p[kDarkLevel] = 1.0 - ic.charge_fidelity;
  return s;
}

ExpectedTrace propagate(const PulseSequence& seq, const PopulationState& state0,
                        MagneticField b0, const PhysicsParams& phys,
                        const ReadoutParams& readout, const GateParams& gates) {
  state0.validate();
  const MapSet maps = build_maps(seq, b0, phys, readout, gates);

  ExpectedTrace trace;
  trace.counts.reserve(seq.total_readouts);
  PopulationState state = state0;
  for (const auto& step : seq.steps) {
    if (std::holds_alternative<WaitStep>(step)) continue;
    const StochasticMap& map = maps.for_step(step);
    if (const auto* laser = std::get_if<LaserStep>(&step); laser && laser->role == LaserRole::readout)
      trace.counts.push_back(map.expected_photons(state));
    map.apply(state);
    if (std::abs(state.sum() - 1.0) > 1e-9)
      throw std::logic_error("propagate: state normalization lost");
  }
  trace.final_state = state;
  return trace;
}

double ShotTraces::slot_mean(int slot) const {
  double total = 0.0;
  for (int s = 0; s < n_shots; ++s) total += at(s, slot);
  return n_shots > 0 ? total / n_shots : 0.0;
}

ShotTraces sample(const PulseSequence& seq, const InitialCondition& ic, MagneticField b0,
                  const PhysicsParams& phys, const ReadoutParams& readout,
                  const GateParams& gates, int n_shots, std::uint64_t seed) {
  if (n_shots < 1) throw invalid_argument("sample: n_shots must be >= 1");
  const PopulationState state0 = initial_state(ic);
  const MapSet maps = build_maps(seq, b0, phys, readout, gates);
  const std::array<double, kNumLevels> init_column = state0.p;

  ShotTraces out;
  out.n_shots = n_shots;
  out.n_slots = seq.count_readout_slots();
  out.seed = seed;
  out.counts.assign(static_cast<size_t>(n_shots) * out.n_slots, 0);

  const std::uint64_t stream_base = splitmix64(seed);
  auto run_range = [&](int lo, int hi) {
    for (int shot = lo; shot < hi; ++shot) {
      std::mt19937_64 eng(splitmix64(stream_base ^ static_cast<std::uint64_t>(shot)));
      int level = categorical(eng, init_column);
      size_t slot = static_cast<size_t>(shot) * out.n_slots;
      for (const auto& step : seq.steps) {
        if (std::holds_alternative<WaitStep>(step)) continue;
        const StochasticMap& map = maps.for_step(step);
        if (const auto* laser = std::get_if<LaserStep>(&step);
            laser && laser->role == LaserRole::readout)
          out.counts[slot++] = poisson_draw(eng, map.photon_yield[level]);
        level = categorical(eng, matrix_column(map, level));
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<std::uint64_t>({hw, 8, (n_shots + 499ull) / 500ull}));
  if (workers <= 1) {
    run_range(0, n_shots);
  } else {
    std::vector<std::future<void>> futures;
    const int chunk = (n_shots + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(n_shots, lo + chunk);
      if (lo >= hi) break;
      futures.push_back(std::async(std::launch::async, run_range, lo, hi));
    }
    for (auto& f : futures) f.get();
  }
  return out;
}

}  // namespace nvrr
