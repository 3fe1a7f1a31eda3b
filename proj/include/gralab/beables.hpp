#pragma once

// Causal-interpretation field model for a single photon split into two beams.
//
// The excited normal-mode coordinates q_a (alpha) and q_b (beta) obey
//   d q_a*/dt = (hbar c^2 / 2) i / (q_a - i q_b)
//   d q_b*/dt = (hbar c^2 / 2)   / (q_a - i q_b)
// whose general solution keeps v = q_a* - i q_b* fixed and rotates
// w = q_a* + i q_b* at the rate hbar c^2 / |w|^2. On the manifold
// amp_b = amp_a, tau0 = sigma0 - pi/2 this reduces to the constant-modulus
// solution q_a* = amp_a exp(i(omega_a t + sigma0)), omega_a = hbar c^2 / (4 amp_a^2).
//
// Unexcited (vacuum) modes have constant coordinates. Each stored VacuumMode
// stands for the +k/-k pair, so its field contribution is 2 Re(...).

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gralab::beables {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;

struct Units {
    double hbar = 1.0;
    double c = 1.0;

    static Units natural() { return {}; }
    static Units si() { return {1.054571817e-34, 299792458.0}; }
};

/// Two excited modes. For region II the same record holds (c0, d0, chi0, xi0).
struct ModePair {
    double amp_a = 1.0;
    double amp_b = 1.0;
    double phase_a = 0.0;                    ///< sigma0
    double phase_b = -1.5707963267948966;    ///< tau0
    Vec3 k_a = Vec3::UnitX();
    Vec3 k_b = Vec3::UnitY();
    Vec3 pol_a = Vec3::UnitZ();
    Vec3 pol_b = Vec3::UnitZ();

    /// Throws InvalidArgument on nonpositive amplitudes, unequal |k|,
    /// non-unit or non-transverse polarizations.
    void validate() const;
    double k0() const { return k_a.norm(); }
};

struct VacuumMode {
    Vec3 k;
    Vec3 pol;
    Complex q;
};

/// hbar c^2 / (4 amp^2)
double nonclassical_frequency(double amp, const Units& units);

/// True when the initial data lie on the constant-modulus manifold.
bool on_constant_modulus_manifold(const ModePair& pair, double tol = 1e-12);

/// Right-hand sides (d q_a*/dt, d q_b*/dt). Throws SingularDenominator when
/// |q_a - i q_b| is below the threshold.
std::pair<Complex, Complex> region1_equations_of_motion(Complex q_a, Complex q_b,
                                                        const Units& units = {},
                                                        double threshold = 1e-12);

/// Closed-form solution of the region-I equations for arbitrary initial data.
class ExactRegion1 {
public:
    ExactRegion1(const ModePair& pair, const Units& units = {});

    Complex q_a(double t) const;
    Complex q_b(double t) const;
    /// d^2 q_a* / dt^2
    Complex conj_a_second_derivative(double t) const;
    /// Rotation rate of w = q_a* + i q_b*.
    double rotation_rate() const noexcept { return rate_; }

private:
    Complex w0_;
    Complex v_;
    double rate_;
};

/// amp_a exp(-i(omega_a t + sigma0)): the constant-modulus solution for q_a.
Complex constant_modulus_q_a(const ModePair& pair, double t, const Units& units = {});

/// Largest admissible integration step, 2 pi / (32 * fastest frequency).
double max_step(const ModePair& pair, const Units& units = {});
/// One two-thousandth of the fastest period.
double default_step(const ModePair& pair, const Units& units = {});

struct Trajectory {
    std::vector<double> t;
    std::vector<Complex> q_a;
    std::vector<Complex> q_b;
    std::vector<VacuumMode> vacuum;  ///< unchanged by the dynamics
    double omega_a = 0.0;
    double omega_b = 0.0;
};

/// Classical RK4 on (q_a*, q_b*) with a uniform step no larger than dt.
/// Throws StepTooLarge, SingularDenominator, InvalidArgument.
Trajectory integrate_region1(const ModePair& pair, double t_end, double dt,
                             const Units& units = {}, std::vector<VacuumMode> vacuum = {});

/// Least-squares slope of the unwrapped phase of q_a*.
double fitted_frequency(const Trajectory& traj);

struct FieldSettings {
    double volume = 1.0;
    Units units;
    std::vector<VacuumMode> vacuum;
};

struct BeableFrame {
    Vec3 x;
    double t = 0.0;
    Vec3 A;
    Vec3 E;
    Vec3 B;
    Vec3 I;
};

BeableFrame beables_region1(const ModePair& pair, const Vec3& x, double t,
                            const FieldSettings& settings = {});

/// Region-II beables behind the second beam splitter with interferometer phase
/// phi. The pair holds (c0, d0, chi0, xi0, k_c, k_d, pol_c, pol_d).
BeableFrame beables_region2(const ModePair& pair, double phi, const Vec3& x, double t,
                            const FieldSettings& settings = {});

/// Time-averaged intensity carried along each output direction, obtained by
/// decomposing the averaged I onto (k_c, k_d) and scaling by |k|.
struct BeamIntensities {
    double c = 0.0;
    double d = 0.0;
};

/// Averages region-II I over one period with uniform samples when the two
/// frequencies coincide, otherwise uses the cycle average of the printed form.
BeamIntensities time_averaged_beam_intensities(const ModePair& pair, double phi, const Vec3& x,
                                               const FieldSettings& settings = {},
                                               int samples = 256);

/// (max - min) / (max + min). Throws EmptyCurve; an all-zero curve gives 0.
double visibility(std::span<const double> curve);

struct VisibilityCurve {
    std::vector<double> phi;
    std::vector<double> beam_c;
    std::vector<double> beam_d;
    double visibility_c = 0.0;
    double visibility_d = 0.0;
};

/// Sweeps phi over [0, 2 pi) with the given number of points (even counts
/// include phi = pi exactly).
VisibilityCurve visibility_sweep(const ModePair& pair, const Vec3& x, int points,
                                 const FieldSettings& settings = {});

/// Modulus of a wavefunction as a function of the complex mode coordinates.
using ModulusFunction = std::function<double(std::span<const Complex>)>;

/// Q = -mode_weight * (hbar^2 c^2 / R) sum_i d^2 R / dq_i* dq_i, using
/// d^2/dq* dq = (d_x^2 + d_y^2) / 4 with fourth-order central differences of
/// the given step. mode_weight = 1 counts each stored coordinate together with
/// its -k partner; 0.5 gives a single term of the mode sum.
/// Throws NodeError when R is below node_threshold.
double quantum_potential(const ModulusFunction& modulus, std::span<const Complex> q,
                         const Units& units, double step, double mode_weight = 1.0,
                         double node_threshold = 1e-12);

/// |q_a* + i q_b*| exp(-(kappa / hbar c)(|q_a|^2 + |q_b|^2)), kappa = c k0,
/// up to normalization.
double region1_modulus(Complex q_a, Complex q_b, double k0, const Units& units = {});

/// Characteristic coordinate scale min(sqrt(hbar c / kappa), |q_a - i q_b|).
double region1_length_scale(Complex q_a, Complex q_b, double k0, const Units& units = {});

/// Finite-difference quantum potential of the region-I state.
double region1_quantum_potential(Complex q_a, Complex q_b, double k0, const Units& units = {});

/// dQ/dq_a (Wirtinger derivative) by finite differences of the region-I potential.
Complex region1_quantum_force_a(Complex q_a, Complex q_b, double k0, const Units& units = {});

/// Kinetic + classical potential + quantum potential along the Hamilton-Jacobi
/// equation; equals 3 hbar c kappa for the region-I state.
double region1_total_energy(Complex q_a, Complex q_b, double k0, const Units& units = {});

/// Relative residual |(1/c^2) q_a*'' + kappa^2 q_a* + dQ/dq_a| on the exact
/// trajectory at time t, normalized by the largest of the three terms.
double wave_equation_residual(const ModePair& pair, double t, const Units& units = {});

/// Residual of the free wave equation for the plane wave q* = q0 exp(i kappa c t)
/// with the quantum potential switched off.
double free_wave_residual(Complex q0, double kappa, double t, const Units& units = {});

/// Draws each vacuum coordinate from the ground-state density |Phi_0|^2:
/// Re q and Im q are independent normals of variance hbar c / (4 kappa).
std::vector<VacuumMode> sample_vacuum_modes(std::span<const std::pair<Vec3, Vec3>> modes,
                                            const Units& units, std::uint64_t seed);

} // namespace gralab::beables
