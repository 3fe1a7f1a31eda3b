#include "doctest.h"

#include <random>
#include <vector>

#include "gralab/classical.hpp"
#include "gralab/error.hpp"

using namespace gralab;
using namespace gralab::classical;

TEST_CASE("singles probabilities") {
    const GateIntensityEnsemble constant(std::vector<double>(100, 1.0), 1.0, 0.1, 0.1);
    CHECK(singles_probabilities(constant).transmitted == doctest::Approx(0.1));

    const GateIntensityEnsemble two_point({0.0, 2.0, 0.0, 2.0}, 1.0, 0.1, 0.2);
    const auto p = singles_probabilities(two_point);
    CHECK(p.transmitted == doctest::Approx(0.1));
    CHECK(p.reflected == doctest::Approx(0.2));
}

TEST_CASE("coincidence probability") {
    CHECK(coincidence_probability(GateIntensityEnsemble({1.0, 1.0}, 1.0, 0.1, 0.1)) ==
          doctest::Approx(0.01));
    CHECK(coincidence_probability(GateIntensityEnsemble({0.0, 2.0}, 1.0, 0.1, 0.1)) ==
          doctest::Approx(0.02));
    const GateIntensityEnsemble hot({3.0}, 1.0, 1.0, 1.0);
    CHECK(coincidence_probability(hot) == doctest::Approx(9.0));
    CHECK_FALSE(hot.admissible());
}

TEST_CASE("classical alpha") {
    CHECK(classical_alpha(GateIntensityEnsemble(std::vector<double>(17, 2.5), 1.0, 0.1, 0.1)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(classical_alpha(GateIntensityEnsemble({0.0, 2.0}, 1.0, 0.1, 0.1)) == doctest::Approx(2.0));

    std::mt19937_64 rng(3);
    std::exponential_distribution<double> exp_law(1.0);
    std::vector<double> v(400000);
    for (auto& x : v) x = exp_law(rng);
    CHECK(classical_alpha(GateIntensityEnsemble(v, 1.0, 0.1, 0.1)) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("alpha is independent of gate and efficiencies") {
    const std::vector<double> v{0.3, 1.7, 0.0, 4.2, 0.9};
    const double ref = classical_alpha(GateIntensityEnsemble(v, 1.0, 0.1, 0.1));
    CHECK(classical_alpha(GateIntensityEnsemble(v, 3.0, 0.02, 0.07)) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("alpha never drops below one") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> size(1, 50);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    std::bernoulli_distribution zero(0.3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (auto& x : v) x = zero(rng) ? 0.0 : value(rng);
        v.front() = 1.0 + value(rng);
        CHECK(classical_alpha(GateIntensityEnsemble(v, 1.0, 0.01, 0.01)) >= 1.0 - 1e-12);
    }
}

TEST_CASE("invalid ensembles") {
    CHECK_THROWS_AS(GateIntensityEnsemble({}, 1.0, 0.1, 0.1), InvalidArgument);
    CHECK_THROWS_AS(GateIntensityEnsemble({0.0, 0.0}, 1.0, 0.1, 0.1), ZeroMeanIntensity);
    CHECK_THROWS_AS(GateIntensityEnsemble({1.0, -1.0}, 1.0, 0.1, 0.1), InvalidArgument);
    CHECK_THROWS_AS(GateIntensityEnsemble({1.0}, 0.0, 0.1, 0.1), InvalidArgument);
    CHECK_THROWS_AS(GateIntensityEnsemble({1.0}, 1.0, 1.5, 0.1), InvalidArgument);
}

TEST_CASE("large magnitudes keep a stable variance") {
    std::vector<double> v(1000, 1e8);
    CHECK(classical_alpha(GateIntensityEnsemble(v, 1e-9, 0.1, 0.1)) == doctest::Approx(1.0).epsilon(1e-12));
}
