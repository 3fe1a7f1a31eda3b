#pragma once

// Photon statistics behind a single-input beam splitter.
//
// The input mode a is split into a transmitted output b_a and a reflected
// output b_b with a^dagger = t b_a^dagger + r e^{i theta} b_b^dagger. Closed-form
// expectations of the arm number operators are provided for number, coherent
// and chaotic input states, together with a brute-force oracle that builds the
// output state in a truncated two-mode Fock space and evaluates the same
// observables with sparse ladder-operator matrices.

#include <complex>
#include <cstddef>
#include <numbers>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace gralab::fock {

using Complex = std::complex<double>;

/// Lossless beam splitter with real amplitudes t, r (t^2 + r^2 = 1) and a
/// phase applied to the reflected amplitude.
class BeamSplitter {
public:
    static constexpr double kNormTolerance = 1e-12;

    BeamSplitter(double t, double r, double reflection_phase = std::numbers::pi / 2);

    /// Builds the splitter from the transmittance t^2.
    static BeamSplitter from_transmittance(double transmittance,
                                           double reflection_phase = std::numbers::pi / 2);
    static BeamSplitter symmetric(double reflection_phase = std::numbers::pi / 2);

    double t() const noexcept { return t_; }
    double r() const noexcept { return r_; }
    double reflection_phase() const noexcept { return phase_; }
    double transmittance() const noexcept { return t_ * t_; }
    double reflectance() const noexcept { return r_ * r_; }
    Complex reflected_amplitude() const noexcept { return std::polar(r_, phase_); }

private:
    double t_;
    double r_;
    double phase_;
};

struct NumberState {
    unsigned n = 0;
};

class CoherentState {
public:
    explicit CoherentState(Complex alpha);
    Complex alpha() const noexcept { return alpha_; }
    double mean_photons() const noexcept { return std::norm(alpha_); }

private:
    Complex alpha_;
};

/// Thermal mixture with P_n = (1 - U) U^n, U = exp(-hbar omega / kT).
class ChaoticState {
public:
    explicit ChaoticState(double u);
    /// U from the ratio hbar*omega/(k*T).
    static ChaoticState from_energy_ratio(double hbar_omega_over_kT);
    double u() const noexcept { return u_; }

private:
    double u_;
};

using QuantumState = std::variant<NumberState, CoherentState, ChaoticState>;

double mean_photon_number(const QuantumState& state);

/// <b_a^dagger b_a>
double expect_transmitted(const QuantumState& state, const BeamSplitter& bs);
/// <b_b^dagger b_b>
double expect_reflected(const QuantumState& state, const BeamSplitter& bs);
/// <b_a^dagger b_a b_b^dagger b_b>
double expect_coincidence(const QuantumState& state, const BeamSplitter& bs);

/// Degree of second-order coherence between the two output arms.
/// Throws DegenerateState when either arm has zero mean occupation.
double g2(const QuantumState& state, const BeamSplitter& bs);

/// Output modes of the splitter truncated at n_max total photons, holding an
/// ensemble of pure states. Basis index of |n_a, n_b> is n_a*(n_max+1) + n_b.
class TwoModeFockSpace {
public:
    using SparseOp = Eigen::SparseMatrix<Complex>;

    struct Component {
        double weight;
        Eigen::VectorXcd amplitudes;
    };

    explicit TwoModeFockSpace(std::size_t n_max);

    std::size_t n_max() const noexcept { return n_max_; }
    std::size_t dimension() const noexcept { return (n_max_ + 1) * (n_max_ + 1); }
    std::size_t index(std::size_t n_a, std::size_t n_b) const;

    const SparseOp& annihilate_a() const noexcept { return lower_a_; }
    const SparseOp& annihilate_b() const noexcept { return lower_b_; }
    SparseOp create_a() const { return lower_a_.adjoint(); }
    SparseOp create_b() const { return lower_b_.adjoint(); }
    SparseOp number_a() const { return create_a() * lower_a_; }
    SparseOp number_b() const { return create_b() * lower_b_; }

    Eigen::VectorXcd vacuum() const;

    void add_component(double weight, Eigen::VectorXcd amplitudes);
    const std::vector<Component>& components() const noexcept { return components_; }

    /// Probability weight of the input distribution that lies above n_max.
    double leakage() const noexcept { return leakage_; }
    void set_leakage(double leakage) noexcept { leakage_ = leakage; }

    /// Amplitude of |n_a, n_b> in the given ensemble component.
    Complex amplitude(std::size_t n_a, std::size_t n_b, std::size_t component = 0) const;

    /// Ensemble average sum_k w_k <psi_k| op |psi_k>.
    Complex expectation(const SparseOp& op) const;

private:
    std::size_t n_max_;
    SparseOp lower_a_;
    SparseOp lower_b_;
    std::vector<Component> components_;
    double leakage_ = 0.0;
};

inline constexpr double kDefaultTailTolerance = 1e-12;

/// Smallest truncation that keeps the input photon-number tail (including its
/// second moment) below the tolerance.
std::size_t default_oracle_n_max(const QuantumState& state,
                                 double tail_tolerance = kDefaultTailTolerance);

/// Builds (t b_a^dagger + r e^{i theta} b_b^dagger)^n / sqrt(n!) |0,0> for each
/// occupied input number n, weighted by the input photon-number distribution.
/// Throws TruncationError when the discarded tail exceeds the tolerance.
TwoModeFockSpace oracle_output_state(const QuantumState& state, const BeamSplitter& bs,
                                     std::size_t n_max,
                                     double tail_tolerance = kDefaultTailTolerance);

struct OracleExpectations {
    double transmitted;
    double reflected;
    double coincidence;
    double leakage;
};

OracleExpectations oracle_expectations(const TwoModeFockSpace& space);

/// g2 from explicit matrix products on the truncated output state.
double oracle_g2(const QuantumState& state, const BeamSplitter& bs, std::size_t n_max,
                 double tail_tolerance = kDefaultTailTolerance);

} // namespace gralab::fock
