#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gralab/error.hpp"
#include "gralab/fock.hpp"

using namespace gralab;
using namespace gralab::fock;

namespace {
const BeamSplitter kHalf = BeamSplitter::symmetric();
}

TEST_CASE("beam splitter construction") {
    const auto bs = BeamSplitter::from_transmittance(0.7);
    CHECK(bs.transmittance() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(bs.reflectance() == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(BeamSplitter(0.8, 0.8), InvalidArgument);
    CHECK_THROWS_AS(BeamSplitter::from_transmittance(1.5), InvalidArgument);
    CHECK_THROWS_AS(BeamSplitter::from_transmittance(0.5, NAN), InvalidArgument);
}

TEST_CASE("state validation") {
    CHECK_THROWS_AS(ChaoticState(0.0), InvalidArgument);
    CHECK_THROWS_AS(ChaoticState(1.0), InvalidArgument);
    CHECK_THROWS_AS(CoherentState({INFINITY, 0.0}), InvalidArgument);
    CHECK(ChaoticState::from_energy_ratio(std::log(2.0)).u() == doctest::Approx(0.5));
}

TEST_CASE("transmitted-arm expectation") {
    CHECK(expect_transmitted(NumberState{1}, kHalf) == doctest::Approx(0.5));
    CHECK(expect_transmitted(NumberState{0}, kHalf) == 0.0);
    CHECK(expect_transmitted(ChaoticState(0.5), kHalf) == doctest::Approx(0.5));
}

TEST_CASE("reflected-arm expectation") {
    CHECK(expect_reflected(NumberState{2}, BeamSplitter::from_transmittance(0.7)) ==
          doctest::Approx(0.6));
    CHECK(expect_reflected(CoherentState({2.0, 0.0}), kHalf) == doctest::Approx(2.0));
    CHECK(expect_reflected(NumberState{0}, kHalf) == 0.0);
}

TEST_CASE("coincidence expectation") {
    for (double tr : {0.1, 0.5, 0.9}) {
        CHECK(expect_coincidence(NumberState{1}, BeamSplitter::from_transmittance(tr)) == 0.0);
    }
    CHECK(expect_coincidence(NumberState{2}, kHalf) == doctest::Approx(0.5));
    CHECK(expect_coincidence(ChaoticState(0.5), kHalf) == doctest::Approx(0.5));
}

TEST_CASE("closed-form g2") {
    CHECK(g2(NumberState{1}, kHalf) == 0.0);
    CHECK(g2(NumberState{10}, kHalf) == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(g2(CoherentState({0.3, -1.1}), kHalf) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g2(ChaoticState(0.42), kHalf) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(g2(NumberState{0}, kHalf), DegenerateState);
    CHECK_THROWS_AS(g2(NumberState{3}, BeamSplitter::from_transmittance(1.0)), DegenerateState);
}

TEST_CASE("g2 does not depend on the splitting ratio or phase") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> tr(0.01, 0.99);
    std::uniform_real_distribution<double> ph(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const auto bs = BeamSplitter::from_transmittance(tr(rng), ph(rng));
        CHECK(g2(NumberState{4}, bs) == doctest::Approx(0.75).epsilon(1e-13));
        CHECK(g2(ChaoticState(0.3), bs) == doctest::Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("number-state output amplitudes") {
    const auto zero_phase = BeamSplitter::symmetric(0.0);
    const auto one = oracle_output_state(NumberState{1}, zero_phase, 1);
    CHECK(std::abs(one.amplitude(1, 0) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(one.amplitude(0, 1) - 1.0 / std::sqrt(2.0)) < 1e-14);

    const auto two = oracle_output_state(NumberState{2}, zero_phase, 2);
    CHECK(std::abs(two.amplitude(2, 0) - 0.5) < 1e-14);
    CHECK(std::abs(two.amplitude(1, 1) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(two.amplitude(0, 2) - 0.5) < 1e-14);

    const auto vac = oracle_output_state(NumberState{0}, zero_phase, 0);
    CHECK(std::abs(vac.amplitude(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("output state is normalized") {
    const auto space = oracle_output_state(NumberState{6}, BeamSplitter::from_transmittance(0.3, 1.0), 6);
    CHECK(space.components().front().amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("oracle agrees with closed forms") {
    CHECK(oracle_g2(NumberState{5}, BeamSplitter::from_transmittance(0.7), 5) ==
          doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::abs(oracle_g2(CoherentState({1.3, 0.0}), kHalf, 30) - 1.0) < 1e-8);
    CHECK(std::abs(oracle_g2(ChaoticState(0.3), kHalf, 40) - 2.0) < 1e-8);
}

TEST_CASE("oracle truncation") {
    CHECK_THROWS_AS(oracle_output_state(NumberState{4}, kHalf, 3), TruncationError);
    CHECK_THROWS_AS(oracle_output_state(CoherentState({3.0, 0.0}), kHalf, 5), TruncationError);
    CHECK_THROWS_AS(oracle_g2(NumberState{0}, kHalf, 2), DegenerateState);

    const QuantumState chaotic = ChaoticState(0.7);
    const auto n = default_oracle_n_max(chaotic);
    CHECK(n > 60);
    const auto e = oracle_expectations(oracle_output_state(chaotic, kHalf, n));
    CHECK(e.leakage <= kDefaultTailTolerance);
}

TEST_CASE("oracle expectations match each closed-form moment") {
    const QuantumState s = CoherentState({1.0, 1.0});
    const auto bs = BeamSplitter::from_transmittance(0.35, 0.4);
    const auto e = oracle_expectations(oracle_output_state(s, bs, default_oracle_n_max(s)));
    CHECK(e.transmitted == doctest::Approx(expect_transmitted(s, bs)).epsilon(1e-10));
    CHECK(e.reflected == doctest::Approx(expect_reflected(s, bs)).epsilon(1e-10));
    CHECK(e.coincidence == doctest::Approx(expect_coincidence(s, bs)).epsilon(1e-10));
}
