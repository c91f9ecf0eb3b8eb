#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nvrr/physics.hpp"

using namespace nvrr;

namespace {
const PhysicsParams kDefaults{};
MagneticField tesla(double t) { return MagneticField{t}; }
}  // namespace

TEST_CASE("eslac field is D_es over the gyromagnetic constant") {
  // 1.42 / 27.992 = 0.05072878 T, consistent with the ~51 mT anti-crossing.
  CHECK(eslac_field(kDefaults) == doctest::Approx(0.0507288).epsilon(1e-5));

  PhysicsParams zero = kDefaults;
  zero.d_es_ghz = 0.0;
  CHECK(eslac_field(zero) == 0.0);

  PhysicsParams doubled = kDefaults;
  doubled.d_es_ghz = 2.84;
  CHECK(eslac_field(doubled) == doctest::Approx(2.0 * eslac_field(kDefaults)).epsilon(1e-12));
}

TEST_CASE("flip-flop probabilities follow the resonance form") {
  SUBCASE("p_minus saturates to 1 at the anti-crossing") {
    const double b = eslac_field(kDefaults);
    const auto probs = flip_flop_probabilities(tesla(b), kDefaults);
    CHECK(std::abs(probs.p_minus - 1.0) < 1e-12);
  }

  SUBCASE("zero field gives equal branches") {
    // 2A^2 / (2A^2 + D^2) = 0.0032 / 2.0196 = 1.58447e-3
    const auto probs = flip_flop_probabilities(tesla(0.0), kDefaults);
    CHECK(probs.p_plus == doctest::Approx(1.58447e-3).epsilon(1e-4));
    CHECK(probs.p_minus == probs.p_plus);
  }

  SUBCASE("branch imbalance at the anti-crossing is ~2.5e3") {
    const auto probs = flip_flop_probabilities(tesla(eslac_field(kDefaults)), kDefaults);
    CHECK(probs.p_minus / probs.p_plus == doctest::Approx(2521.5).epsilon(1e-3));
  }

  SUBCASE("mirror symmetry p_plus(B) = p_minus(-B)") {
    for (int i = 0; i <= 100; ++i) {
      const double b = -0.3 + 0.6 * i / 100.0;
      const auto fwd = flip_flop_probabilities(tesla(b), kDefaults);
      const auto rev = flip_flop_probabilities(tesla(-b), kDefaults);
      CHECK(std::abs(fwd.p_plus - rev.p_minus) < 1e-15);
    }
  }

  SUBCASE("p_minus is increasing below the anti-crossing, decreasing above") {
    const double b_eslac = eslac_field(kDefaults);
    double prev = flip_flop_probabilities(tesla(0.0), kDefaults).p_minus;
    for (int i = 1; i <= 50; ++i) {
      const double cur =
          flip_flop_probabilities(tesla(b_eslac * i / 50.0), kDefaults).p_minus;
      CHECK(cur > prev);
      prev = cur;
    }
    prev = flip_flop_probabilities(tesla(b_eslac), kDefaults).p_minus;
    for (int i = 1; i <= 50; ++i) {
      const double cur =
          flip_flop_probabilities(tesla(b_eslac + (1.0 - b_eslac) * i / 50.0), kDefaults).p_minus;
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("per-readout probabilities scale with kappa and cap at 1") {
  const MagneticField b244 = tesla(0.244);

  const auto zero = per_readout_flip_probs(b244, kDefaults, 0.0);
  CHECK(zero.p_plus == 0.0);
  CHECK(zero.p_minus == 0.0);

  const auto unit = per_readout_flip_probs(b244, kDefaults, 1.0);
  const auto cycle = flip_flop_probabilities(b244, kDefaults);
  CHECK(unit.p_plus == cycle.p_plus);
  CHECK(unit.p_minus == cycle.p_minus);

  // kappa * 2A^2 / (2A^2 + (D - g B)^2) at 244 mT, kappa = 3.8: 4.1542e-4.
  const auto scaled = per_readout_flip_probs(b244, kDefaults, 3.8);
  CHECK(scaled.p_minus == doctest::Approx(4.1542e-4).epsilon(1e-4));

  const auto capped = per_readout_flip_probs(tesla(eslac_field(kDefaults)), kDefaults, 50.0);
  CHECK(capped.p_minus == 1.0);
}

TEST_CASE("polarization steady state is the geometric ladder") {
  SUBCASE("near the anti-crossing the +1 level dominates") {
    const auto pi = dnp_steady_state(tesla(eslac_field(kDefaults)), kDefaults);
    CHECK(pi.pi_plus1 > 0.95);
    CHECK(pi.pi_plus1 == doctest::Approx(0.9996036).epsilon(1e-5));
    CHECK(std::abs(pi.sum() - 1.0) < 1e-12);
  }

  SUBCASE("zero field gives the uniform distribution") {
    const auto pi = dnp_steady_state(tesla(0.0), kDefaults);
    CHECK(std::abs(pi.pi_minus1 - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(pi.pi_0 - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(pi.pi_plus1 - 1.0 / 3.0) < 1e-12);
  }

  SUBCASE("rate ratio 2 gives (4/7, 2/7, 1/7) on (+1, 0, -1)") {
    const auto pi = dnp_steady_state_from_probs(FlipFlopProbs{0.1, 0.2});
    CHECK(pi.pi_plus1 == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(pi.pi_0 == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
    CHECK(pi.pi_minus1 == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  }

  SUBCASE("invariant under joint rate scaling") {
    const auto a = dnp_steady_state_from_probs(FlipFlopProbs{1e-4, 3e-3});
    const auto b = dnp_steady_state_from_probs(FlipFlopProbs{1e-2, 3e-1});
    CHECK(a.pi_plus1 == doctest::Approx(b.pi_plus1).epsilon(1e-12));
    CHECK(a.pi_0 == doctest::Approx(b.pi_0).epsilon(1e-12));
  }

  SUBCASE("vanishing down-rate is flagged") {
    const auto pi = dnp_steady_state_from_probs(FlipFlopProbs{0.0, 0.1});
    CHECK(pi.degenerate);
    CHECK(pi.pi_plus1 == 1.0);
  }

  SUBCASE("sums to one across a field grid") {
    for (int i = 0; i <= 40; ++i) {
      const auto pi = dnp_steady_state(tesla(-0.5 + i * 0.025), kDefaults);
      CHECK(std::abs(pi.sum() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("parameter validation") {
  PhysicsParams bad = kDefaults;
  bad.gyromag_ghz_per_t = 0.0;
  CHECK_THROWS_AS(eslac_field(bad), invalid_argument);

  PhysicsParams bad_p = kDefaults;
  bad_p.p_e0 = 1.5;
  CHECK_THROWS_AS(bad_p.validate(), invalid_argument);

  CHECK_THROWS_AS(flip_flop_probabilities(MagneticField{1.5}, kDefaults), invalid_argument);
  CHECK_THROWS_AS(per_readout_flip_probs(MagneticField{0.1}, kDefaults, -1.0), invalid_argument);
}
