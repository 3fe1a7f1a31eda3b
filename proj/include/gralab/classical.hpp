#pragma once

// Semiclassical gated-intensity model: the field is classical, detection
// probabilities are linear in the gate-averaged intensity.

#include <span>
#include <vector>

namespace gralab::classical {

struct SinglesProbabilities {
    double transmitted;
    double reflected;
};

class GateIntensityEnsemble {
public:
    /// Intensities i_n per gate (arbitrary flux units), gate duration omega in
    /// seconds, global detection efficiencies of the two arms.
    GateIntensityEnsemble(std::vector<double> intensities, double gate_duration,
                          double efficiency_t, double efficiency_r);

    std::span<const double> intensities() const noexcept { return intensities_; }
    double gate_duration() const noexcept { return gate_; }
    double efficiency_t() const noexcept { return eff_t_; }
    double efficiency_r() const noexcept { return eff_r_; }

    double mean_intensity() const noexcept { return mean_; }
    double mean_square_intensity() const noexcept { return mean_sq_; }

    /// False when a detection probability exceeds 1, i.e. the linear
    /// detection model is outside its range of validity.
    bool admissible() const noexcept { return admissible_; }

private:
    std::vector<double> intensities_;
    double gate_;
    double eff_t_;
    double eff_r_;
    double mean_ = 0.0;
    double mean_sq_ = 0.0;
    bool admissible_ = true;
};

SinglesProbabilities singles_probabilities(const GateIntensityEnsemble& ens);

double coincidence_probability(const GateIntensityEnsemble& ens);

/// <i^2>/<i>^2, bounded below by 1 for any classical intensity ensemble.
double classical_alpha(const GateIntensityEnsemble& ens);

} // namespace gralab::classical
