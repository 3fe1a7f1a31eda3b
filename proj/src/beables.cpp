#include "gralab/beables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "gralab/error.hpp"

namespace gralab::beables {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double x) { return std::remainder(x, 2.0 * kPi); }

// 2 Re(v z) for a real vector v and complex scalar z.
Vec3 twice_real(const Vec3& v, Complex z) { return 2.0 * z.real() * v; }

Complex plane_wave(const Vec3& k, const Vec3& x) { return std::polar(1.0, k.dot(x)); }

struct VacuumTerms {
    Vec3 u = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 f = Vec3::Zero();
};

// u, curl u and the intensity cross term, with f built on the given reference
// polarization.
VacuumTerms vacuum_terms(const std::vector<VacuumMode>& modes, const Vec3& x,
                         const Vec3& reference_pol, const Units& units) {
    VacuumTerms out;
    const Complex i(0.0, 1.0);
    for (const auto& m : modes) {
        const Complex z = m.q * plane_wave(m.k, x);
        const Vec3 kxe = m.k.cross(m.pol);
        out.u += twice_real(m.pol, z);
        out.v += twice_real(kxe, i * z);
        out.f += twice_real(reference_pol.cross(kxe), i * units.hbar * units.c * units.c * z);
    }
    return out;
}

double second_difference(const auto& f, double h) {
    return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) /
           (12.0 * h * h);
}

double first_difference(const auto& f, double h) {
    return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

void require_units(const Units& u) {
    if (!(u.hbar > 0.0) || !(u.c > 0.0) || !std::isfinite(u.hbar) || !std::isfinite(u.c)) {
        throw InvalidArgument("hbar and c must be positive");
    }
}

Vec3 intensity_frame_decomposition(const ModePair& pair, const Vec3& avg) {
    Eigen::Matrix<double, 3, 2> m;
    m.col(0) = pair.k_a;
    m.col(1) = pair.k_b;
    if (pair.k_a.cross(pair.k_b).norm() <= 1e-12 * pair.k_a.squaredNorm()) {
        throw InvalidArgument("output beams must have non-parallel wave vectors");
    }
    const Eigen::Vector2d coeff = m.colPivHouseholderQr().solve(avg);
    return {coeff(0), coeff(1), 0.0};
}

} // namespace

void ModePair::validate() const {
    if (!(amp_a > 0.0) || !(amp_b > 0.0) || !std::isfinite(amp_a) || !std::isfinite(amp_b)) {
        throw InvalidArgument("mode amplitudes must be positive and finite");
    }
    if (!std::isfinite(phase_a) || !std::isfinite(phase_b)) {
        throw InvalidArgument("mode phases must be finite");
    }
    const double ka = k_a.norm();
    const double kb = k_b.norm();
    if (!(ka > 0.0) || !std::isfinite(ka)) throw InvalidArgument("wave vectors must be nonzero");
    if (std::abs(ka - kb) > 1e-12 * ka) {
        throw InvalidArgument("wave vectors must have equal magnitude");
    }
    for (const auto& [k, pol] : {std::pair{k_a, pol_a}, std::pair{k_b, pol_b}}) {
        if (std::abs(pol.norm() - 1.0) > 1e-12) {
            throw InvalidArgument("polarization vectors must be unit vectors");
        }
        if (std::abs(pol.dot(k)) > 1e-12 * k.norm()) {
            throw InvalidArgument("polarization must be orthogonal to its wave vector");
        }
    }
}

double nonclassical_frequency(double amp, const Units& units) {
    if (!(amp > 0.0)) throw InvalidArgument("amplitude must be positive");
    return units.hbar * units.c * units.c / (4.0 * amp * amp);
}

bool on_constant_modulus_manifold(const ModePair& pair, double tol) {
    return std::abs(pair.amp_a - pair.amp_b) <= tol * pair.amp_a &&
           std::abs(wrap_angle(pair.phase_b - pair.phase_a + kPi / 2.0)) <= tol;
}

std::pair<Complex, Complex> region1_equations_of_motion(Complex q_a, Complex q_b,
                                                        const Units& units, double threshold) {
    const Complex denom = q_a - Complex(0.0, 1.0) * q_b;
    if (std::abs(denom) < threshold) {
        throw SingularDenominator("q_a - i q_b vanishes: trajectory on the singular manifold");
    }
    const double s = 0.5 * units.hbar * units.c * units.c;
    return {Complex(0.0, s) / denom, s / denom};
}

ExactRegion1::ExactRegion1(const ModePair& pair, const Units& units) {
    pair.validate();
    require_units(units);
    const Complex i(0.0, 1.0);
    const Complex ca = std::polar(pair.amp_a, pair.phase_a);
    const Complex cb = std::polar(pair.amp_b, pair.phase_b);
    w0_ = ca + i * cb;
    v_ = ca - i * cb;
    if (std::abs(w0_) < 1e-12) {
        throw SingularDenominator("initial data lie on the singular manifold");
    }
    rate_ = units.hbar * units.c * units.c / std::norm(w0_);
}

Complex ExactRegion1::q_a(double t) const {
    return std::conj(0.5 * (w0_ * std::polar(1.0, rate_ * t) + v_));
}

Complex ExactRegion1::q_b(double t) const {
    return std::conj((w0_ * std::polar(1.0, rate_ * t) - v_) / Complex(0.0, 2.0));
}

Complex ExactRegion1::conj_a_second_derivative(double t) const {
    return -0.5 * rate_ * rate_ * w0_ * std::polar(1.0, rate_ * t);
}

Complex constant_modulus_q_a(const ModePair& pair, double t, const Units& units) {
    const double w = nonclassical_frequency(pair.amp_a, units);
    return std::polar(pair.amp_a, -(w * t + pair.phase_a));
}

double max_step(const ModePair& pair, const Units& units) {
    const ExactRegion1 exact(pair, units);
    const double fastest = std::max({exact.rotation_rate(), nonclassical_frequency(pair.amp_a, units),
                                     nonclassical_frequency(pair.amp_b, units)});
    return 2.0 * kPi / (32.0 * fastest);
}

double default_step(const ModePair& pair, const Units& units) {
    return max_step(pair, units) * 32.0 / 2000.0;
}

Trajectory integrate_region1(const ModePair& pair, double t_end, double dt, const Units& units,
                             std::vector<VacuumMode> vacuum) {
    pair.validate();
    require_units(units);
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
    if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (dt > max_step(pair, units)) {
        throw StepTooLarge("dt does not resolve the fastest nonclassical oscillation");
    }

    Trajectory traj;
    traj.vacuum = std::move(vacuum);
    traj.omega_a = nonclassical_frequency(pair.amp_a, units);
    traj.omega_b = nonclassical_frequency(pair.amp_b, units);

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    traj.t.reserve(steps + 1);
    traj.q_a.reserve(steps + 1);
    traj.q_b.reserve(steps + 1);

    // State is (q_a*, q_b*), the quantities the equations of motion evolve.
    using State = std::array<Complex, 2>;
    auto rhs = [&](const State& y) {
        const auto [da, db] = region1_equations_of_motion(std::conj(y[0]), std::conj(y[1]), units);
        return State{da, db};
    };
    auto axpy = [](const State& y, double a, const State& k) {
        return State{y[0] + a * k[0], y[1] + a * k[1]};
    };

    State y{std::polar(pair.amp_a, pair.phase_a), std::polar(pair.amp_b, pair.phase_b)};
    auto record = [&](double t) {
        traj.t.push_back(t);
        traj.q_a.push_back(std::conj(y[0]));
        traj.q_b.push_back(std::conj(y[1]));
    };
    record(0.0);
    for (std::size_t n = 0; n < steps; ++n) {
        const State k1 = rhs(y);
        const State k2 = rhs(axpy(y, 0.5 * h, k1));
        const State k3 = rhs(axpy(y, 0.5 * h, k2));
        const State k4 = rhs(axpy(y, h, k3));
        for (int j = 0; j < 2; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        record(static_cast<double>(n + 1) * h);
    }
    return traj;
}

double fitted_frequency(const Trajectory& traj) {
    const std::size_t n = traj.t.size();
    if (n < 2) throw InvalidArgument("frequency fit needs at least two samples");
    std::vector<double> phase(n);
    phase[0] = std::arg(std::conj(traj.q_a[0]));
    for (std::size_t i = 1; i < n; ++i) {
        const double raw = std::arg(std::conj(traj.q_a[i]));
        phase[i] = phase[i - 1] + wrap_angle(raw - phase[i - 1]);
    }
    double tm = 0.0;
    double pm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm += traj.t[i];
        pm += phase[i];
    }
    tm /= static_cast<double>(n);
    pm /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (traj.t[i] - tm) * (phase[i] - pm);
        sxx += (traj.t[i] - tm) * (traj.t[i] - tm);
    }
    return sxy / sxx;
}

BeableFrame beables_region1(const ModePair& pair, const Vec3& x, double t,
                            const FieldSettings& settings) {
    pair.validate();
    const Units& u = settings.units;
    require_units(u);
    const double V = settings.volume;
    if (!(V > 0.0)) throw InvalidArgument("volume must be positive");
    const double sv = std::sqrt(V);

    const double ta = pair.k_a.dot(x) - nonclassical_frequency(pair.amp_a, u) * t - pair.phase_a;
    const double tb = pair.k_b.dot(x) - nonclassical_frequency(pair.amp_b, u) * t - pair.phase_b;
    const VacuumTerms vac = vacuum_terms(settings.vacuum, x, pair.pol_a, u);

    BeableFrame f;
    f.x = x;
    f.t = t;
    f.A = (2.0 / sv) * (pair.pol_a * pair.amp_a * std::cos(ta) + pair.pol_b * pair.amp_b * std::cos(tb)) +
          vac.u / sv;
    f.E = -(u.hbar * u.c / (2.0 * sv)) *
          (pair.pol_a / pair.amp_a * std::sin(ta) + pair.pol_b / pair.amp_b * std::sin(tb));
    f.B = -(2.0 / sv) * (pair.k_a.cross(pair.pol_a) * pair.amp_a * std::sin(ta) +
                         pair.k_b.cross(pair.pol_b) * pair.amp_b * std::sin(tb)) +
          vac.v / sv;
    f.I = (u.hbar * u.c * u.c / (2.0 * V)) *
              (pair.k_a + pair.k_b - pair.k_a * std::cos(2.0 * ta) - pair.k_b * std::cos(2.0 * tb)) -
          vac.f * (std::sin(ta) + std::sin(tb)) / V;
    return f;
}

BeableFrame beables_region2(const ModePair& pair, double phi, const Vec3& x, double t,
                            const FieldSettings& settings) {
    pair.validate();
    const Units& u = settings.units;
    require_units(u);
    const double V = settings.volume;
    if (!(V > 0.0)) throw InvalidArgument("volume must be positive");
    if (!std::isfinite(phi)) throw InvalidArgument("phi must be finite");
    const double sv = std::sqrt(V);
    const double mc = 1.0 + std::cos(phi);
    const double md = 1.0 - std::cos(phi);

    const double tc = pair.k_a.dot(x) - nonclassical_frequency(pair.amp_a, u) * t - pair.phase_a;
    const double td = pair.k_b.dot(x) - nonclassical_frequency(pair.amp_b, u) * t - pair.phase_b;
    const VacuumTerms vac = vacuum_terms(settings.vacuum, x, pair.pol_a, u);

    BeableFrame f;
    f.x = x;
    f.t = t;
    f.A = (2.0 / sv) * (pair.pol_a * pair.amp_a * std::cos(tc) + pair.pol_b * pair.amp_b * std::cos(td)) +
          vac.u / sv;
    f.E = -(u.hbar * u.c / (2.0 * sv)) *
          (pair.pol_a / pair.amp_a * mc * std::sin(tc) + pair.pol_b / pair.amp_b * md * std::sin(td));
    f.B = -(2.0 / sv) * (pair.k_a.cross(pair.pol_a) * pair.amp_a * std::sin(tc) +
                         pair.k_b.cross(pair.pol_b) * pair.amp_b * std::sin(td)) +
          vac.v / sv;
    f.I = (u.hbar * u.c * u.c / (2.0 * V)) *
              (pair.k_a * mc + pair.k_b * md - pair.k_a * mc * std::cos(2.0 * tc) -
               pair.k_b * md * std::cos(2.0 * td)) -
          vac.f * (mc * std::sin(tc) + md * std::sin(td)) / V;
    return f;
}

BeamIntensities time_averaged_beam_intensities(const ModePair& pair, double phi, const Vec3& x,
                                               const FieldSettings& settings, int samples) {
    pair.validate();
    if (samples < 1) throw InvalidArgument("need at least one time sample");
    const Units& u = settings.units;
    const double wc = nonclassical_frequency(pair.amp_a, u);
    const double wd = nonclassical_frequency(pair.amp_b, u);

    Vec3 avg = Vec3::Zero();
    if (std::abs(wc - wd) <= 1e-12 * wc) {
        const double period = 2.0 * kPi / wc;
        for (int j = 0; j < samples; ++j) {
            avg += beables_region2(pair, phi, x, period * j / samples, settings).I;
        }
        avg /= samples;
    } else {
        // Incommensurate beams: the oscillating terms average out exactly.
        avg = (u.hbar * u.c * u.c / (2.0 * settings.volume)) *
              (pair.k_a * (1.0 + std::cos(phi)) + pair.k_b * (1.0 - std::cos(phi)));
    }
    const Vec3 coeff = intensity_frame_decomposition(pair, avg);
    return {coeff(0) * pair.k_a.norm(), coeff(1) * pair.k_b.norm()};
}

double visibility(std::span<const double> curve) {
    if (curve.empty()) throw EmptyCurve("visibility of an empty curve");
    const auto [lo, hi] = std::minmax_element(curve.begin(), curve.end());
    const double sum = *hi + *lo;
    if (sum == 0.0) return 0.0;
    return (*hi - *lo) / sum;
}

VisibilityCurve visibility_sweep(const ModePair& pair, const Vec3& x, int points,
                                 const FieldSettings& settings) {
    if (points < 1) throw EmptyCurve("visibility sweep needs at least one point");
    VisibilityCurve out;
    for (int i = 0; i < points; ++i) {
        const double phi = kPi * (2.0 * i / points);
        const BeamIntensities b = time_averaged_beam_intensities(pair, phi, x, settings);
        out.phi.push_back(phi);
        out.beam_c.push_back(b.c);
        out.beam_d.push_back(b.d);
    }
    out.visibility_c = visibility(out.beam_c);
    out.visibility_d = visibility(out.beam_d);
    return out;
}

double quantum_potential(const ModulusFunction& modulus, std::span<const Complex> q,
                         const Units& units, double step, double mode_weight,
                         double node_threshold) {
    require_units(units);
    if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be positive");
    std::vector<Complex> p(q.begin(), q.end());
    const double r0 = modulus(p);
    if (!(r0 >= node_threshold)) throw NodeError("wavefunction modulus vanishes at this point");

    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Complex centre = p[i];
        for (const Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
            auto f = [&](double s) {
                p[i] = centre + s * dir;
                return modulus(p);
            };
            sum += 0.25 * second_difference(f, step);
        }
        p[i] = centre;
    }
    const double hc = units.hbar * units.c;
    return -mode_weight * hc * hc * sum / r0;
}

double region1_modulus(Complex q_a, Complex q_b, double k0, const Units& units) {
    const double gamma = k0 / units.hbar;  // kappa / (hbar c) with kappa = c k0
    const Complex w = std::conj(q_a) + Complex(0.0, 1.0) * std::conj(q_b);
    return std::abs(w) * std::exp(-gamma * (std::norm(q_a) + std::norm(q_b)));
}

double region1_length_scale(Complex q_a, Complex q_b, double k0, const Units& units) {
    return std::min(std::sqrt(units.hbar / k0), std::abs(q_a - Complex(0.0, 1.0) * q_b));
}

double region1_quantum_potential(Complex q_a, Complex q_b, double k0, const Units& units) {
    const double scale = region1_length_scale(q_a, q_b, k0, units);
    if (!(scale > 0.0)) throw NodeError("region-I wavefunction vanishes at q_a = i q_b");
    const double h = 1e-3 * scale;
    const std::array<Complex, 2> q{q_a, q_b};
    return quantum_potential(
        [&](std::span<const Complex> p) { return region1_modulus(p[0], p[1], k0, units); }, q,
        units, h);
}

Complex region1_quantum_force_a(Complex q_a, Complex q_b, double k0, const Units& units) {
    const double scale = region1_length_scale(q_a, q_b, k0, units);
    if (!(scale > 0.0)) throw NodeError("region-I wavefunction vanishes at q_a = i q_b");
    const double h = 1e-2 * scale;
    auto along = [&](Complex dir) {
        return first_difference(
            [&](double s) { return region1_quantum_potential(q_a + s * dir, q_b, k0, units); }, h);
    };
    const double dx = along({1.0, 0.0});
    const double dy = along({0.0, 1.0});
    return 0.5 * Complex(dx, -dy);
}

double region1_total_energy(Complex q_a, Complex q_b, double k0, const Units& units) {
    const double kappa = units.c * k0;
    const double hc = units.hbar * units.c;
    // |dS/dq_a|^2 = |dS/dq_b|^2 = hbar^2 / (4 |q_a - i q_b|^2); each mode is
    // counted together with its -k partner.
    const double w2 = std::norm(q_a - Complex(0.0, 1.0) * q_b);
    const double kinetic = hc * hc / (2.0 * w2);
    const double potential = kappa * kappa * (std::norm(q_a) + std::norm(q_b));
    return kinetic + potential + region1_quantum_potential(q_a, q_b, k0, units);
}

double wave_equation_residual(const ModePair& pair, double t, const Units& units) {
    const ExactRegion1 exact(pair, units);
    const Complex a = exact.q_a(t);
    const Complex b = exact.q_b(t);
    const double kappa = units.c * pair.k0();
    const Complex inertia = exact.conj_a_second_derivative(t) / (units.c * units.c);
    const Complex restoring = kappa * kappa * std::conj(a);
    const Complex force = region1_quantum_force_a(a, b, pair.k0(), units);
    const double scale = std::max({std::abs(inertia), std::abs(restoring), std::abs(force)});
    return std::abs(inertia + restoring + force) / scale;
}

double free_wave_residual(Complex q0, double kappa, double t, const Units& units) {
    const Complex qs = q0 * std::polar(1.0, kappa * units.c * t);
    const Complex second = -(kappa * units.c) * (kappa * units.c) * qs;
    return std::abs(second / (units.c * units.c) + kappa * kappa * qs);
}

std::vector<VacuumMode> sample_vacuum_modes(std::span<const std::pair<Vec3, Vec3>> modes,
                                            const Units& units, std::uint64_t seed) {
    require_units(units);
    std::mt19937_64 engine(seed);
    auto uniform = [&] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53; };
    std::vector<VacuumMode> out;
    out.reserve(modes.size());
    for (const auto& [k, pol] : modes) {
        const double kn = k.norm();
        if (!(kn > 0.0)) throw InvalidArgument("vacuum mode needs a nonzero wave vector");
        if (std::abs(pol.norm() - 1.0) > 1e-12 || std::abs(pol.dot(k)) > 1e-12 * kn) {
            throw InvalidArgument("vacuum polarization must be a unit vector orthogonal to k");
        }
        const double sigma = std::sqrt(units.hbar / (4.0 * kn));  // hbar c / (4 kappa)
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * kPi * uniform();
        out.push_back({k, pol, Complex(sigma * r * std::cos(theta), sigma * r * std::sin(theta))});
    }
    return out;
}

} // namespace gralab::beables
