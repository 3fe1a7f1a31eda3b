#include "gralab/fock.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gralab/error.hpp"

namespace gralab::fock {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Photon-number distribution of the input state.
double number_probability(const QuantumState& state, std::size_t n) {
    return std::visit(
        overloaded{
            [n](const NumberState& s) { return s.n == n ? 1.0 : 0.0; },
            [n](const CoherentState& s) {
                const double m = s.mean_photons();
                if (m == 0.0) return n == 0 ? 1.0 : 0.0;
                const double dn = static_cast<double>(n);
                return std::exp(-m + dn * std::log(m) - std::lgamma(dn + 1.0));
            },
            [n](const ChaoticState& s) {
                return (1.0 - s.u()) * std::pow(s.u(), static_cast<double>(n));
            },
        },
        state);
}

// sum_{n > n_max} n^power P(n), summed until the terms are negligible.
double tail_moment(const QuantumState& state, std::size_t n_max, int power) {
    if (const auto* s = std::get_if<NumberState>(&state)) {
        return s->n > n_max ? std::pow(static_cast<double>(s->n), power) : 0.0;
    }
    const double mean = mean_photon_number(state);
    double sum = 0.0;
    for (std::size_t n = n_max + 1;; ++n) {
        const double term = std::pow(static_cast<double>(n), power) * number_probability(state, n);
        sum += term;
        if (static_cast<double>(n) > mean + 1.0 && term <= 1e-18 * sum + 1e-300) break;
        if (n > n_max + 100000) break;
    }
    return sum;
}

} // namespace

BeamSplitter::BeamSplitter(double t, double r, double reflection_phase)
    : t_(t), r_(r), phase_(reflection_phase) {
    if (!(t >= 0.0 && t <= 1.0 && r >= 0.0 && r <= 1.0)) {
        throw InvalidArgument("beam splitter amplitudes must lie in [0, 1]");
    }
    if (std::abs(t * t + r * r - 1.0) > kNormTolerance) {
        throw InvalidArgument("beam splitter violates t^2 + r^2 = 1");
    }
    if (!std::isfinite(reflection_phase)) {
        throw InvalidArgument("reflection phase must be finite");
    }
}

BeamSplitter BeamSplitter::from_transmittance(double transmittance, double reflection_phase) {
    if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
        throw InvalidArgument("transmittance must lie in [0, 1]");
    }
    return BeamSplitter(std::sqrt(transmittance), std::sqrt(1.0 - transmittance), reflection_phase);
}

BeamSplitter BeamSplitter::symmetric(double reflection_phase) {
    return from_transmittance(0.5, reflection_phase);
}

CoherentState::CoherentState(Complex alpha) : alpha_(alpha) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw InvalidArgument("coherent amplitude must be finite");
    }
}

ChaoticState::ChaoticState(double u) : u_(u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw InvalidArgument("chaotic state requires 0 < U < 1");
    }
}

ChaoticState ChaoticState::from_energy_ratio(double hbar_omega_over_kT) {
    if (!(hbar_omega_over_kT > 0.0) || !std::isfinite(hbar_omega_over_kT)) {
        throw InvalidArgument("hbar*omega/kT must be positive and finite");
    }
    return ChaoticState(std::exp(-hbar_omega_over_kT));
}

double mean_photon_number(const QuantumState& state) {
    return std::visit(overloaded{
                          [](const NumberState& s) { return static_cast<double>(s.n); },
                          [](const CoherentState& s) { return s.mean_photons(); },
                          [](const ChaoticState& s) { return s.u() / (1.0 - s.u()); },
                      },
                      state);
}

double expect_transmitted(const QuantumState& state, const BeamSplitter& bs) {
    return bs.transmittance() * mean_photon_number(state);
}

double expect_reflected(const QuantumState& state, const BeamSplitter& bs) {
    return bs.reflectance() * mean_photon_number(state);
}

double expect_coincidence(const QuantumState& state, const BeamSplitter& bs) {
    // Second factorial moment <n(n-1)> of the input distribution.
    const double factorial_moment = std::visit(
        overloaded{
            [](const NumberState& s) {
                const double n = s.n;
                return n * (n - 1.0);
            },
            [](const CoherentState& s) { return s.mean_photons() * s.mean_photons(); },
            [](const ChaoticState& s) {
                const double u = s.u();
                return 2.0 * u * u / ((1.0 - u) * (1.0 - u));
            },
        },
        state);
    return bs.transmittance() * bs.reflectance() * factorial_moment;
}

double g2(const QuantumState& state, const BeamSplitter& bs) {
    const double nt = expect_transmitted(state, bs);
    const double nr = expect_reflected(state, bs);
    if (nt == 0.0 || nr == 0.0) {
        throw DegenerateState("g2 undefined: an output arm has zero mean photon number");
    }
    return expect_coincidence(state, bs) / (nt * nr);
}

TwoModeFockSpace::TwoModeFockSpace(std::size_t n_max)
    : n_max_(n_max), lower_a_(dimension(), dimension()), lower_b_(dimension(), dimension()) {
    std::vector<Eigen::Triplet<Complex>> ta;
    std::vector<Eigen::Triplet<Complex>> tb;
    for (std::size_t na = 0; na <= n_max_; ++na) {
        for (std::size_t nb = 0; nb <= n_max_; ++nb) {
            const auto col = static_cast<Eigen::Index>(index(na, nb));
            if (na > 0) {
                ta.emplace_back(static_cast<Eigen::Index>(index(na - 1, nb)), col,
                                std::sqrt(static_cast<double>(na)));
            }
            if (nb > 0) {
                tb.emplace_back(static_cast<Eigen::Index>(index(na, nb - 1)), col,
                                std::sqrt(static_cast<double>(nb)));
            }
        }
    }
    lower_a_.setFromTriplets(ta.begin(), ta.end());
    lower_b_.setFromTriplets(tb.begin(), tb.end());
}

std::size_t TwoModeFockSpace::index(std::size_t n_a, std::size_t n_b) const {
    if (n_a > n_max_ || n_b > n_max_) {
        throw TruncationError("Fock index outside the truncated space");
    }
    return n_a * (n_max_ + 1) + n_b;
}

Eigen::VectorXcd TwoModeFockSpace::vacuum() const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension()));
    v(0) = 1.0;
    return v;
}

void TwoModeFockSpace::add_component(double weight, Eigen::VectorXcd amplitudes) {
    if (amplitudes.size() != static_cast<Eigen::Index>(dimension())) {
        throw InvalidArgument("component dimension does not match the Fock space");
    }
    components_.push_back({weight, std::move(amplitudes)});
}

Complex TwoModeFockSpace::amplitude(std::size_t n_a, std::size_t n_b, std::size_t component) const {
    return components_.at(component).amplitudes(static_cast<Eigen::Index>(index(n_a, n_b)));
}

Complex TwoModeFockSpace::expectation(const SparseOp& op) const {
    Complex sum = 0.0;
    for (const auto& c : components_) {
        const Eigen::VectorXcd image = op * c.amplitudes;
        sum += c.weight * c.amplitudes.dot(image);
    }
    return sum;
}

std::size_t default_oracle_n_max(const QuantumState& state, double tail_tolerance) {
    if (const auto* s = std::get_if<NumberState>(&state)) return s->n;

    std::size_t n_max = 0;
    if (const auto* s = std::get_if<CoherentState>(&state)) {
        const double m = s->mean_photons();
        n_max = static_cast<std::size_t>(std::ceil(m + 10.0 * std::sqrt(m) + 10.0));
    }
    // The oracle's coincidence expectation carries an n^2 weight, so the
    // second moment of the discarded tail must be small too.
    while (tail_moment(state, n_max, 0) > tail_tolerance ||
           tail_moment(state, n_max, 2) > tail_tolerance) {
        ++n_max;
    }
    return n_max;
}

TwoModeFockSpace oracle_output_state(const QuantumState& state, const BeamSplitter& bs,
                                     std::size_t n_max, double tail_tolerance) {
    const double leakage = tail_moment(state, n_max, 0);
    if (leakage > tail_tolerance) {
        throw TruncationError("truncation at n_max=" + std::to_string(n_max) +
                              " discards probability " + std::to_string(leakage));
    }

    TwoModeFockSpace space(n_max);
    space.set_leakage(leakage);
    const TwoModeFockSpace::SparseOp raise =
        Complex(bs.t()) * space.create_a() + bs.reflected_amplitude() * space.create_b();

    std::size_t last = n_max;
    if (const auto* s = std::get_if<NumberState>(&state)) last = s->n;

    Eigen::VectorXcd psi = space.vacuum();
    for (std::size_t n = 0; n <= last; ++n) {
        if (n > 0) psi = (raise * psi) / std::sqrt(static_cast<double>(n));
        const double w = number_probability(state, n);
        if (w > 0.0) space.add_component(w, psi);
    }
    return space;
}

OracleExpectations oracle_expectations(const TwoModeFockSpace& space) {
    const auto na = space.number_a();
    const auto nb = space.number_b();
    const TwoModeFockSpace::SparseOp nab = na * nb;
    return {space.expectation(na).real(), space.expectation(nb).real(),
            space.expectation(nab).real(), space.leakage()};
}

double oracle_g2(const QuantumState& state, const BeamSplitter& bs, std::size_t n_max,
                 double tail_tolerance) {
    const auto e = oracle_expectations(oracle_output_state(state, bs, n_max, tail_tolerance));
    if (e.transmitted == 0.0 || e.reflected == 0.0) {
        throw DegenerateState("oracle g2 undefined: an output arm is empty");
    }
    return e.coincidence / (e.transmitted * e.reflected);
}

} // namespace gralab::fock
