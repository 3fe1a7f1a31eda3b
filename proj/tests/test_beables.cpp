#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "gralab/beables.hpp"
#include "gralab/error.hpp"

using namespace gralab;
using namespace gralab::beables;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I(0.0, 1.0);

ModePair off_manifold_pair() {
    ModePair p;
    p.phase_a = 0.0;
    p.phase_b = 0.0;
    return p;
}

} // namespace

TEST_CASE("mode pair validation") {
    CHECK_NOTHROW(ModePair{}.validate());
    ModePair p;
    p.amp_a = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = ModePair{};
    p.k_b = 2.0 * Vec3::UnitY();
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = ModePair{};
    p.pol_a = Vec3::UnitX();
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = ModePair{};
    p.pol_b = 2.0 * Vec3::UnitZ();
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("nonclassical frequency") {
    CHECK(nonclassical_frequency(1.0, Units::natural()) == doctest::Approx(0.25));
    CHECK(nonclassical_frequency(0.5, Units::natural()) == doctest::Approx(1.0));
    const Units si = Units::si();
    CHECK(nonclassical_frequency(1e-10, si) ==
          doctest::Approx(si.hbar * si.c * si.c / 4e-20).epsilon(1e-14));
    CHECK_THROWS_AS(nonclassical_frequency(0.0, si), InvalidArgument);
}

TEST_CASE("region-I equations of motion") {
    const auto [da, db] = region1_equations_of_motion(1.0, 0.0);
    CHECK(std::abs(da - 0.5 * I) < 1e-15);
    CHECK(std::abs(db - 0.5) < 1e-15);
    CHECK_THROWS_AS(region1_equations_of_motion(1.0, -I), SingularDenominator);
}

TEST_CASE("constant-modulus solution satisfies the equations of motion") {
    const ModePair p;
    const double w = nonclassical_frequency(p.amp_a, Units::natural());
    for (double t : {0.0, 0.7, 3.1, 20.0}) {
        const Complex qa = constant_modulus_q_a(p, t);
        const Complex qb = p.amp_b * std::exp(-I * (w * t + p.phase_b));
        const auto [da, db] = region1_equations_of_motion(qa, qb);
        // d/dt of q_a* = amp exp(i(w t + sigma0)) and of q_b*.
        const Complex da_exact = I * w * std::conj(qa);
        const Complex db_exact = I * w * std::conj(qb);
        CHECK(std::abs(da - da_exact) < 1e-12);
        CHECK(std::abs(db - db_exact) < 1e-12);
    }
}

TEST_CASE("exact solution") {
    const ModePair p;
    CHECK(on_constant_modulus_manifold(p));
    CHECK_FALSE(on_constant_modulus_manifold(off_manifold_pair()));
    const ExactRegion1 exact(p);
    CHECK(exact.rotation_rate() == doctest::Approx(0.25));
    for (double t : {0.0, 1.0, 5.0}) {
        CHECK(std::abs(exact.q_a(t) - constant_modulus_q_a(p, t)) < 1e-13);
        CHECK(std::abs(exact.q_a(t)) == doctest::Approx(1.0));
    }

    // Off the manifold the solution still satisfies the equations.
    const ExactRegion1 general(off_manifold_pair());
    const double h = 1e-4;
    for (double t : {0.3, 2.0}) {
        const auto [da, db] = region1_equations_of_motion(general.q_a(t), general.q_b(t));
        const Complex fd_a = (std::conj(general.q_a(t + h)) - std::conj(general.q_a(t - h))) / (2.0 * h);
        const Complex fd_b = (std::conj(general.q_b(t + h)) - std::conj(general.q_b(t - h))) / (2.0 * h);
        CHECK(std::abs(fd_a - da) < 1e-7);
        CHECK(std::abs(fd_b - db) < 1e-7);
    }
}

TEST_CASE("integration matches the exact solution") {
    for (const ModePair& p : {ModePair{}, off_manifold_pair()}) {
        const ExactRegion1 exact(p);
        const double period = 2.0 * kPi / exact.rotation_rate();
        const auto traj = integrate_region1(p, period, default_step(p));
        double err = 0.0;
        for (std::size_t i = 0; i < traj.t.size(); ++i) {
            err = std::max(err, std::abs(traj.q_a[i] - exact.q_a(traj.t[i])));
            err = std::max(err, std::abs(traj.q_b[i] - exact.q_b(traj.t[i])));
        }
        CHECK(err < 1e-6);
        CHECK(traj.t.back() == doctest::Approx(period).epsilon(1e-14));
    }
}

TEST_CASE("integration edge cases") {
    const ModePair p;
    const auto zero = integrate_region1(p, 0.0, 0.1);
    REQUIRE(zero.t.size() == 1);
    CHECK(std::abs(zero.q_a[0] - constant_modulus_q_a(p, 0.0)) < 1e-15);

    CHECK_THROWS_AS(integrate_region1(p, 10.0, 2.0 * max_step(p)), StepTooLarge);
    CHECK_THROWS_AS(integrate_region1(p, -1.0, 0.1), InvalidArgument);

    ModePair singular;
    singular.phase_b = kPi / 2;
    CHECK_THROWS_AS(integrate_region1(singular, 1.0, 0.01), SingularDenominator);

    std::vector<VacuumMode> vac{{Vec3(0, 0, 2), Vec3(1, 0, 0), Complex(0.1, -0.2)}};
    const auto traj = integrate_region1(p, 5.0, 0.01, Units::natural(), vac);
    REQUIRE(traj.vacuum.size() == 1);
    CHECK(traj.vacuum[0].q == Complex(0.1, -0.2));
}

TEST_CASE("fitted frequency") {
    const ModePair p;
    const auto traj = integrate_region1(p, 2.0 * kPi / 0.25, default_step(p));
    CHECK(std::abs(fitted_frequency(traj) - 0.25) < 1e-9 * 0.25);
}

TEST_CASE("region-I beables") {
    const FieldSettings s;
    const auto f = beables_region1(off_manifold_pair(), Vec3::Zero(), 0.0, s);
    CHECK(f.E.norm() < 1e-15);
    CHECK(f.A.norm() == doctest::Approx(4.0));

    // Cycle average of I at a fixed point.
    const ModePair p;
    const int n = 512;
    Vec3 avg = Vec3::Zero();
    for (int j = 0; j < n; ++j) avg += beables_region1(p, Vec3(0.3, -0.2, 0.1), 8.0 * kPi * j / n, s).I;
    avg /= n;
    const Vec3 expected = 0.5 * (p.k_a + p.k_b);
    CHECK((avg - expected).norm() < 1e-12);

    // With equal amplitudes the two arms carry fields of equal size.
    const Vec3 xa(0.4, 0.0, 0.0);
    const Vec3 xb(0.0, 0.4, 0.0);
    const auto fa = beables_region1(off_manifold_pair(), xa, 1.3, s);
    const auto fb = beables_region1(off_manifold_pair(), xb, 1.3, s);
    CHECK(fa.E.norm() == doctest::Approx(fb.E.norm()));
}

TEST_CASE("region-II beam intensities") {
    const ModePair p;
    const Vec3 x = Vec3::Zero();
    const auto at0 = time_averaged_beam_intensities(p, 0.0, x);
    const double peak = at0.c + at0.d;
    CHECK(std::abs(at0.d) < 1e-12 * peak);
    const auto atpi = time_averaged_beam_intensities(p, kPi, x);
    CHECK(std::abs(atpi.c) < 1e-12 * peak);
    const auto half = time_averaged_beam_intensities(p, kPi / 2, x);
    CHECK(half.c == doctest::Approx(half.d).epsilon(1e-12));

    ModePair unequal = p;
    unequal.amp_b = 2.0;
    const auto u = time_averaged_beam_intensities(unequal, 0.0, x);
    CHECK(std::abs(u.d) < 1e-12 * (u.c + u.d));
}

TEST_CASE("visibility") {
    std::vector<double> curve;
    for (int i = 0; i < 64; ++i) curve.push_back((1.0 + std::cos(2.0 * kPi * i / 64)) / 2.0);
    CHECK(visibility(curve) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(visibility(std::vector<double>(10, 3.0)) == 0.0);
    CHECK(visibility(std::vector<double>(3, 0.0)) == 0.0);
    CHECK_THROWS_AS(visibility(std::vector<double>{}), EmptyCurve);

    const auto sweep = visibility_sweep(ModePair{}, Vec3(0.1, 0.2, 0.3), 36);
    CHECK(std::abs(sweep.visibility_c - 1.0) <= 1e-9);
    CHECK(std::abs(sweep.visibility_d - 1.0) <= 1e-9);
    const double total0 = sweep.beam_c[0] + sweep.beam_d[0];
    for (std::size_t i = 0; i < sweep.phi.size(); ++i) {
        CHECK(std::abs(sweep.beam_c[i] + sweep.beam_d[i] - total0) <= 1e-10 * total0);
    }
    CHECK_THROWS_AS(visibility_sweep(ModePair{}, Vec3::Zero(), 0), EmptyCurve);
}

TEST_CASE("quantum potential of the single-mode ground state") {
    const Units u;
    const double k0 = 1.5;
    const double kappa = u.c * k0;
    const ModulusFunction gauss = [&](std::span<const Complex> q) {
        return std::exp(-(kappa / (u.hbar * u.c)) * std::norm(q[0]));
    };
    const std::vector<Complex> origin{0.0};
    CHECK(quantum_potential(gauss, origin, u, 1e-3, 0.5) ==
          doctest::Approx(u.hbar * kappa * u.c / 2.0).epsilon(1e-8));
    const std::vector<Complex> off{Complex(0.3, -0.1)};
    CHECK(quantum_potential(gauss, off, u, 1e-3, 0.5) ==
          doctest::Approx((u.hbar * u.c * kappa - kappa * kappa * 0.1) / 2.0).epsilon(1e-8));

    const ModulusFunction node = [](std::span<const Complex> q) { return std::abs(q[0]); };
    CHECK_THROWS_AS(quantum_potential(node, origin, u, 1e-3), NodeError);
    CHECK_THROWS_AS(quantum_potential(gauss, origin, u, 0.0), InvalidArgument);
}

TEST_CASE("quantum potential scales as hbar squared for a fixed modulus") {
    const ModulusFunction r = [](std::span<const Complex> q) {
        return std::exp(-std::norm(q[0])) * (1.0 + 0.2 * q[0].real());
    };
    const std::vector<Complex> q{Complex(0.2, 0.4)};
    const double q1 = quantum_potential(r, q, Units{1.0, 1.0}, 1e-3);
    const double qs = quantum_potential(r, q, Units{1e-3, 1.0}, 1e-3);
    CHECK(qs == doctest::Approx(1e-6 * q1).epsilon(1e-9));
}

TEST_CASE("region-I quantum potential along the trajectory") {
    const ModePair p;
    const double k0 = p.k0();
    const ExactRegion1 exact(p);
    const double q0 = region1_quantum_potential(exact.q_a(0.0), exact.q_b(0.0), k0);
    for (double t : {1.0, 4.0, 11.0}) {
        CHECK(region1_quantum_potential(exact.q_a(t), exact.q_b(t), k0) ==
              doctest::Approx(q0).epsilon(1e-7));
    }
    CHECK_THROWS_AS(region1_quantum_potential(1.0, -I, k0), NodeError);
}

TEST_CASE("Hamilton-Jacobi energy of the region-I state") {
    const Units u;
    const double k0 = 1.0;
    const double expected = 3.0 * u.hbar * u.c * u.c * k0;
    for (auto [qa, qb] : {std::pair<Complex, Complex>{1.0, I},
                          std::pair<Complex, Complex>{Complex(0.4, 0.2), Complex(-0.3, 0.5)},
                          std::pair<Complex, Complex>{Complex(1.2, -0.7), Complex(0.1, 0.1)}}) {
        CHECK(region1_total_energy(qa, qb, k0, u) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("wave equation") {
    const ModePair p;
    for (double t : {0.0, 2.0, 9.0}) CHECK(wave_equation_residual(p, t) < 1e-4);
    CHECK(wave_equation_residual(off_manifold_pair(), 1.0) < 1e-4);
    CHECK(free_wave_residual(Complex(0.3, 0.8), 2.0, 1.7) < 1e-12);
}

TEST_CASE("quantum force is the Wirtinger derivative of the potential") {
    const double k0 = 1.0;
    const Complex qa(0.7, 0.2);
    const Complex qb(-0.1, 0.4);
    const double h = 1e-4;
    const double dx = (region1_quantum_potential(qa + h, qb, k0) - region1_quantum_potential(qa - h, qb, k0)) /
                      (2.0 * h);
    const double dy = (region1_quantum_potential(qa + I * h, qb, k0) -
                       region1_quantum_potential(qa - I * h, qb, k0)) /
                      (2.0 * h);
    const Complex expected = 0.5 * (dx - I * dy);
    CHECK(std::abs(region1_quantum_force_a(qa, qb, k0) - expected) < 1e-5 * std::abs(expected));
}

TEST_CASE("vacuum sampling") {
    const Units u;
    std::vector<std::pair<Vec3, Vec3>> grid;
    for (int i = 0; i < 20000; ++i) grid.emplace_back(Vec3(2.0, 0.0, 0.0), Vec3::UnitZ());
    const auto a = sample_vacuum_modes(grid, u, 42);
    const auto b = sample_vacuum_modes(grid, u, 42);
    REQUIRE(a.size() == grid.size());
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].q == b[i].q);
        var += a[i].q.real() * a[i].q.real();
    }
    var /= static_cast<double>(a.size());
    CHECK(var == doctest::Approx(u.hbar / (4.0 * 2.0)).epsilon(0.05));

    std::vector<std::pair<Vec3, Vec3>> bad{{Vec3(1, 0, 0), Vec3(1, 0, 0)}};
    CHECK_THROWS_AS(sample_vacuum_modes(bad, u, 1), InvalidArgument);
}

TEST_CASE("vacuum modes add to the fields") {
    FieldSettings s;
    const ModePair p;
    const auto bare = beables_region1(p, Vec3(0.2, 0.1, 0.0), 0.5, s);
    s.vacuum.push_back({Vec3(0.0, 0.0, 1.0), Vec3::UnitX(), Complex(0.3, 0.1)});
    const auto dressed = beables_region1(p, Vec3(0.2, 0.1, 0.0), 0.5, s);
    CHECK((dressed.A - bare.A).norm() > 0.1);
    CHECK((dressed.E - bare.E).norm() < 1e-15);
}
