#pragma once

// Gated two-photon cascade source feeding a beam splitter, and the
// coincidence-counting statistics it produces.
//
// Decays arrive as a Poisson process of rate N. A detected first photon opens a
// non-retriggerable gate of duration omega; second photons entering the beam
// splitter during the gate are routed whole to one arm and detected with the
// arm efficiency. A gate with at least one detection in each arm is a
// coincidence.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gralab/fock.hpp"

namespace gralab::cascade {

enum class ArrivalMode {
    analytic,  ///< trigger partner enters the gate with probability f(omega)
    physical,  ///< trigger partner delay sampled from the exponential decay law
};

std::string_view to_string(ArrivalMode mode);
ArrivalMode arrival_mode_from_string(std::string_view name);

inline constexpr std::string_view kRngAlgorithm = "mt19937_64 (per-worker seeds via splitmix64)";

struct CascadeConfig {
    double decay_rate = 1.0e7;         ///< N, decays per second
    double lifetime = 4.7e-9;          ///< tau, seconds
    double gate = 9.4e-9;              ///< omega, seconds
    double correlation_factor = 1.0;   ///< a >= 1
    double efficiency_trigger = 1.0;   ///< epsilon_1
    double efficiency_t = 1.0;         ///< detector efficiency behind the transmitted port
    double efficiency_r = 1.0;         ///< detector efficiency behind the reflected port
    double accidental_collection = 1.0;
    fock::BeamSplitter beam_splitter = fock::BeamSplitter::symmetric();
    ArrivalMode mode = ArrivalMode::analytic;
    double run_time = 0.0;             ///< seconds; used when gate_target == 0
    std::uint64_t gate_target = 0;     ///< stop after this many gates when nonzero
    unsigned workers = 4;
    std::uint64_t seed = 1;

    /// Throws ConfigError on any invariant violation.
    void validate() const;

    /// Mean number of accidental second photons entering the splitter per gate.
    double accidental_mean() const noexcept {
        return accidental_collection * decay_rate * gate;
    }
    /// Composite efficiencies t^2 eps_t and r^2 eps_r.
    double effective_efficiency_t() const noexcept {
        return beam_splitter.transmittance() * efficiency_t;
    }
    double effective_efficiency_r() const noexcept {
        return beam_splitter.reflectance() * efficiency_r;
    }

    /// Chooses the correlation factor a so that f(omega) equals the target.
    void set_f_omega(double f);
};

struct CountRecord {
    std::uint64_t n1_counts = 0;   ///< gates opened (= detected first photons)
    std::uint64_t nt_counts = 0;   ///< gates with a transmitted-arm detection
    std::uint64_t nr_counts = 0;   ///< gates with a reflected-arm detection
    std::uint64_t nc_counts = 0;   ///< gates with detections in both arms
    std::uint64_t total_gates = 0;
    std::uint64_t trigger_arrivals = 0;     ///< trigger partners that entered their gate
    std::uint64_t accidental_arrivals = 0;  ///< other second photons inside a gate
    std::uint64_t detections_t = 0;         ///< individual photon detections, transmitted arm
    std::uint64_t detections_r = 0;
    double elapsed_sim_time = 0.0;

    CountRecord& operator+=(const CountRecord& other) noexcept;
    friend CountRecord operator+(CountRecord a, const CountRecord& b) noexcept { return a += b; }
    friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// a [1 - exp(-omega / tau)]
double f_omega(const CascadeConfig& cfg);

/// Quantum prediction for alpha with N omega accidentals per gate and
/// trigger-partner probability f.
double g2_analytic(double n_omega, double f);

/// Runs the event-driven simulation. Deterministic for a fixed seed and
/// worker count.
CountRecord simulate(const CascadeConfig& cfg);

/// alpha = N1 Nc / (Nt Nr). Throws InsufficientCounts when a singles count is 0.
double measured_alpha(const CountRecord& rec);

/// Delta-method standard error of measured_alpha for per-gate indicator
/// counts. With no coincidences one pseudo-count sets the scale.
double alpha_standard_error(const CountRecord& rec);

struct SweepPoint {
    double n_omega;
    double alpha_mc;
    double alpha_analytic;
    double std_error;
    std::uint64_t gates;
};

/// Simulates each N omega value with the template's gate target and returns
/// the Monte Carlo vs analytic comparison. N omega = 0 is realised as the
/// isolated-gate limit (no accidental collection).
std::vector<SweepPoint> sweep_curve(const CascadeConfig& cfg_template,
                                    std::span<const double> n_omega_values);

} // namespace gralab::cascade
