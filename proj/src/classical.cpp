#include "gralab/classical.hpp"

#include <cmath>
#include <utility>

#include "gralab/error.hpp"

namespace gralab::classical {

GateIntensityEnsemble::GateIntensityEnsemble(std::vector<double> intensities,
                                             double gate_duration, double efficiency_t,
                                             double efficiency_r)
    : intensities_(std::move(intensities)),
      gate_(gate_duration),
      eff_t_(efficiency_t),
      eff_r_(efficiency_r) {
    if (intensities_.empty()) throw InvalidArgument("intensity ensemble is empty");
    if (!(gate_ > 0.0) || !std::isfinite(gate_)) {
        throw InvalidArgument("gate duration must be positive");
    }
    for (double e : {eff_t_, eff_r_}) {
        if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("efficiencies must lie in [0, 1]");
    }

    double sum = 0.0;
    bool any_positive = false;
    for (double i : intensities_) {
        if (!(i >= 0.0) || !std::isfinite(i)) {
            throw InvalidArgument("gate intensities must be finite and nonnegative");
        }
        any_positive = any_positive || i > 0.0;
        sum += i;
    }
    if (!any_positive) throw ZeroMeanIntensity("every gate intensity is zero");

    const auto n = static_cast<double>(intensities_.size());
    mean_ = sum / n;
    // <i^2> = <i>^2 + var, with the variance accumulated as a sum of squares so
    // that <i^2> >= <i>^2 holds in floating point as well.
    double var = 0.0;
    for (double i : intensities_) var += (i - mean_) * (i - mean_);
    mean_sq_ = mean_ * mean_ + var / n;

    const double pt = eff_t_ * gate_ * mean_;
    const double pr = eff_r_ * gate_ * mean_;
    const double pc = eff_t_ * eff_r_ * gate_ * gate_ * mean_sq_;
    admissible_ = pt <= 1.0 && pr <= 1.0 && pc <= 1.0;
}

SinglesProbabilities singles_probabilities(const GateIntensityEnsemble& ens) {
    const double scale = ens.gate_duration() * ens.mean_intensity();
    return {ens.efficiency_t() * scale, ens.efficiency_r() * scale};
}

double coincidence_probability(const GateIntensityEnsemble& ens) {
    const double w = ens.gate_duration();
    return ens.efficiency_t() * ens.efficiency_r() * w * w * ens.mean_square_intensity();
}

double classical_alpha(const GateIntensityEnsemble& ens) {
    const double m = ens.mean_intensity();
    if (m == 0.0) throw ZeroMeanIntensity("classical alpha needs a nonzero mean intensity");
    return ens.mean_square_intensity() / (m * m);
}

} // namespace gralab::classical
