#include "gralab/photodetect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gralab/error.hpp"
#include "gralab/fock.hpp"

namespace gralab::photodetect {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

} // namespace

void DetectorAtomConfig::validate() const {
    for (double v : {hbar, c, reduced_mass, bohr_radius, k0, volume}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidArgument("hbar, c, mu, a, k0 and V must be positive and finite");
        }
    }
    if (!std::isfinite(charge) || !std::isfinite(initial_electron_energy) || !std::isfinite(phi)) {
        throw InvalidArgument("charge, binding energy and phase must be finite");
    }
}

double bohr_radius(double hbar, double reduced_mass, double charge) {
    if (!(reduced_mass > 0.0) || charge == 0.0) {
        throw InvalidArgument("Bohr radius needs a positive mass and nonzero charge");
    }
    return 4.0 * std::numbers::pi * hbar * hbar / (reduced_mass * charge * charge);
}

double electron_energy(const DetectorAtomConfig& cfg, double k_en) {
    return cfg.hbar * cfg.hbar * k_en * k_en / (2.0 * cfg.reduced_mass);
}

double energy_mismatch(const DetectorAtomConfig& cfg, double k_en) {
    return electron_energy(cfg, k_en) - cfg.hbar * cfg.c * cfg.k0 - cfg.initial_electron_energy;
}

double resonant_wavenumber(const DetectorAtomConfig& cfg) {
    cfg.validate();
    const double kinetic = cfg.hbar * cfg.c * cfg.k0 + cfg.initial_electron_energy;
    if (!(kinetic > 0.0)) throw InvalidArgument("photon energy below the ionization threshold");
    return std::sqrt(2.0 * cfg.reduced_mass * kinetic) / cfg.hbar;
}

Complex time_factor(double energy, double t, double hbar) {
    if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
    const double half = energy * t / (2.0 * hbar);
    return Complex(0.0, -t / hbar) * sinc(half) * std::polar(1.0, half);
}

Complex absorption_amplitude(double phi, double k0) {
    return (Complex(0.0, 1.0) - std::polar(1.0, phi)) / std::sqrt(2.0 * k0);
}

namespace {

// Everything in eta except the time factor.
Complex eta_prefactor(const DetectorAtomConfig& cfg, double k_en) {
    const double a = cfg.bohr_radius;
    const double a3 = a * a * a;
    const double pi = std::numbers::pi;
    const double coupling = cfg.charge / (cfg.reduced_mass * cfg.c) *
                            std::sqrt(cfg.hbar * cfg.c / (2.0 * cfg.volume));
    const double s = 1.0 + a * a * k_en * k_en;
    const double form = cfg.hbar / std::sqrt(cfg.volume * pi * a3) * (8.0 * pi * a3 / (s * s));
    return coupling * absorption_amplitude(cfg.phi, cfg.k0) * form;
}

} // namespace

Complex eta(const DetectorAtomConfig& cfg, double k_en, double t) {
    cfg.validate();
    return eta_prefactor(cfg, k_en) * time_factor(energy_mismatch(cfg, k_en), t, cfg.hbar);
}

double eta_squared_at_mismatch(const DetectorAtomConfig& cfg, double k_en, double energy,
                               double t) {
    cfg.validate();
    return std::norm(eta_prefactor(cfg, k_en) * time_factor(energy, t, cfg.hbar));
}

std::pair<Complex, Complex> region1_coefficients(double phi) {
    const double s = 1.0 / std::numbers::sqrt2;
    return {-std::polar(s, phi), Complex(0.0, s)};
}

AbsorptionReport absorption_matrix_element_check(Complex c_a, Complex c_b, double k0,
                                                 std::size_t n_max, Complex c_11,
                                                 double threshold) {
    if (n_max < 1) throw TruncationError("the single-photon state needs n_max >= 1");
    if (c_11 != 0.0 && n_max < 2) {
        throw TruncationError("a two-photon component needs n_max >= 2");
    }
    if (!(k0 > 0.0)) throw InvalidArgument("k0 must be positive");

    const fock::TwoModeFockSpace space(n_max);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space.dimension()));
    psi(static_cast<Eigen::Index>(space.index(1, 0))) = c_a;
    psi(static_cast<Eigen::Index>(space.index(0, 1))) = c_b;
    if (c_11 != 0.0) psi(static_cast<Eigen::Index>(space.index(1, 1))) = c_11;

    const fock::TwoModeFockSpace::SparseOp lower = space.annihilate_a() + space.annihilate_b();
    const Eigen::VectorXcd image = (lower * psi) / std::sqrt(k0);

    AbsorptionReport report;
    report.n_max = n_max;
    report.basis_size = space.dimension();
    report.expected_vacuum_overlap = (c_a + c_b) / std::sqrt(k0);
    for (std::size_t na = 0; na <= n_max; ++na) {
        for (std::size_t nb = 0; nb <= n_max; ++nb) {
            // Basis states are unit vectors, so the overlap is one component.
            const Complex overlap = image(static_cast<Eigen::Index>(space.index(na, nb)));
            if (na == 0 && nb == 0) {
                report.vacuum_overlap = overlap;
            } else {
                report.max_other = std::max(report.max_other, std::abs(overlap));
            }
            if (std::abs(overlap) > threshold) report.nonzero.push_back({na, nb, overlap});
        }
    }
    report.amplitude_vanishes = std::abs(report.vacuum_overlap) <= threshold;
    report.whole_quantum = report.max_other <= threshold;
    return report;
}

} // namespace gralab::photodetect
