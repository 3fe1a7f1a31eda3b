#pragma once

// First-order photodetection by a hydrogen-like atom sitting in one beam of
// the split single-photon field: the ionization amplitude eta(t) into a
// box-normalized continuum state, and the field-sector selection rule showing
// that only the whole quantum is ever absorbed.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace gralab::photodetect {

using Complex = std::complex<double>;

struct DetectorAtomConfig {
    double hbar = 1.0;
    double c = 137.035999084;
    double reduced_mass = 1.0;                   ///< mu
    double charge = 3.5449077018110318;          ///< e, Heaviside-Lorentz (sqrt(4 pi))
    double bohr_radius = 1.0;                    ///< a = 4 pi hbar^2 / (mu e^2)
    double initial_electron_energy = -0.5;       ///< E_ei, bound-state energy
    double k0 = 1.0 / 137.035999084;             ///< photon wavenumber
    double phi = 0.0;                            ///< interferometer phase
    double volume = 1000.0;                      ///< quantization volume V

    /// Hydrogen in atomic units (hbar = mu = 1, a = 1, E_ei = -1/2) with a
    /// one-hartree photon.
    static DetectorAtomConfig hydrogen_atomic_units() { return {}; }

    /// Throws InvalidArgument unless a, k0, V, hbar, c, mu are positive.
    void validate() const;
};

/// 4 pi hbar^2 / (mu e^2)
double bohr_radius(double hbar, double reduced_mass, double charge);

/// hbar^2 k_en^2 / (2 mu)
double electron_energy(const DetectorAtomConfig& cfg, double k_en);

/// E = E0 + E_en - E_I - E_ei with E_I - E0 = hbar c k0.
double energy_mismatch(const DetectorAtomConfig& cfg, double k_en);

/// Continuum wavenumber at which the energy mismatch vanishes.
/// Throws InvalidArgument when the photon cannot ionize.
double resonant_wavenumber(const DetectorAtomConfig& cfg);

/// (1 - exp(i E t / hbar)) / E written as -i (t/hbar) sinc(E t / 2 hbar)
/// exp(i E t / 2 hbar), which is smooth through E = 0.
Complex time_factor(double energy, double t, double hbar);

/// (i - exp(i phi)) / sqrt(2 k0)
Complex absorption_amplitude(double phi, double k0);

/// Ionization amplitude eta_0n(t) into the continuum state of wavenumber k_en.
Complex eta(const DetectorAtomConfig& cfg, double k_en, double t);

/// |eta|^2 with the energy mismatch E supplied directly and the k_en-dependent
/// form factor taken at k_en.
double eta_squared_at_mismatch(const DetectorAtomConfig& cfg, double k_en, double energy,
                               double t);

struct FieldOverlap {
    std::size_t n_a;
    std::size_t n_b;
    Complex value;
};

struct AbsorptionReport {
    std::size_t n_max = 0;
    std::size_t basis_size = 0;
    std::vector<FieldOverlap> nonzero;  ///< overlaps with |value| above threshold
    Complex vacuum_overlap;
    Complex expected_vacuum_overlap;    ///< (c_a + c_b) / sqrt(k0)
    double max_other = 0.0;             ///< largest |overlap| with a non-vacuum state
    bool whole_quantum = false;         ///< only the vacuum overlap survives
    bool amplitude_vanishes = false;    ///< the vacuum overlap itself is zero
};

/// Region-I single-photon coefficients on |1,0> and |0,1> for phase phi:
/// (-exp(i phi), i) / sqrt(2).
std::pair<Complex, Complex> region1_coefficients(double phi);

/// Applies (a_a + a_b) / sqrt(k0) to c_a |1,0> + c_b |0,1> (plus optional extra
/// two-photon weight on |1,1>) in a truncated two-mode Fock space and reports
/// every nonvanishing overlap with the basis states. Throws TruncationError
/// when n_max < 1 (or < 2 for a two-photon component).
AbsorptionReport absorption_matrix_element_check(Complex c_a, Complex c_b, double k0,
                                                 std::size_t n_max, Complex c_11 = 0.0,
                                                 double threshold = 1e-12);

} // namespace gralab::photodetect
