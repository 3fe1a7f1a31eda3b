#include "gralab/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "gralab/error.hpp"

namespace gralab::cascade {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Distribution code is written out so results do not depend on the standard
// library's implementation of std::uniform_real_distribution and friends.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 engine_;
};

struct WorkerPlan {
    std::uint64_t gate_target = 0;
    double run_time = 0.0;
    std::uint64_t seed = 0;
};

// Largest trigger-partner delay accepted in physical mode. With a = 1 this is
// the gate itself; a > 1 stretches it so that the acceptance probability
// equals f(omega).
double physical_window(const CascadeConfig& cfg) {
    const double f = f_omega(cfg);
    if (f >= 1.0) return std::numeric_limits<double>::infinity();
    return -cfg.lifetime * std::log1p(-f);
}

CountRecord run_worker(const CascadeConfig& cfg, const WorkerPlan& plan) {
    CountRecord rec;
    if (plan.gate_target == 0 && !(plan.run_time > 0.0)) return rec;

    Rng rng(plan.seed);
    const bool physical = cfg.mode == ArrivalMode::physical;
    const double f = f_omega(cfg);
    const double window = physical ? physical_window(cfg) : 0.0;
    const double rate = cfg.decay_rate;
    const double p_t = cfg.beam_splitter.transmittance();

    std::vector<double> pending;  // arrival times of non-trigger second photons
    bool open = false;
    bool trigger_in_gate = false;
    double gate_start = 0.0;
    double gate_end = 0.0;
    double now = 0.0;

    auto route = [&](bool& hit_t, bool& hit_r) {
        if (rng.bernoulli(p_t)) {
            if (rng.bernoulli(cfg.efficiency_t)) {
                hit_t = true;
                ++rec.detections_t;
            }
        } else if (rng.bernoulli(cfg.efficiency_r)) {
            hit_r = true;
            ++rec.detections_r;
        }
    };

    auto prune_before = [&](double t) {
        std::erase_if(pending, [t](double a) { return a < t; });
    };

    auto finalize = [&] {
        bool hit_t = false;
        bool hit_r = false;
        if (trigger_in_gate) {
            ++rec.trigger_arrivals;
            route(hit_t, hit_r);
        }
        for (double a : pending) {
            if (a >= gate_start && a < gate_end) {
                ++rec.accidental_arrivals;
                route(hit_t, hit_r);
            }
        }
        ++rec.total_gates;
        ++rec.n1_counts;
        rec.nt_counts += hit_t;
        rec.nr_counts += hit_r;
        rec.nc_counts += hit_t && hit_r;
        prune_before(gate_end);
        open = false;
    };

    for (;;) {
        const double td = now + rng.exponential(rate);
        if (open && td >= gate_end) {
            finalize();
            if (plan.gate_target > 0 && rec.total_gates >= plan.gate_target) {
                rec.elapsed_sim_time = gate_end;
                break;
            }
        }
        if (plan.gate_target == 0 && !open && td >= plan.run_time) {
            rec.elapsed_sim_time = plan.run_time;
            break;
        }
        now = td;

        if (!open && rng.bernoulli(cfg.efficiency_trigger)) {
            open = true;
            gate_start = td;
            gate_end = td + cfg.gate;
            if (physical) {
                const double delay = rng.exponential(1.0 / cfg.lifetime);
                trigger_in_gate = delay < window;
                // A late partner is just another photon for later gates.
                if (!trigger_in_gate && rng.bernoulli(cfg.accidental_collection)) {
                    pending.push_back(td + delay);
                }
            } else {
                trigger_in_gate = rng.bernoulli(f);
            }
            continue;
        }

        if (!rng.bernoulli(cfg.accidental_collection)) continue;
        if (physical) {
            pending.push_back(td + rng.exponential(1.0 / cfg.lifetime));
        } else if (open) {
            pending.push_back(td);
        }
        if (pending.size() > 256) prune_before(open ? gate_start : now);
    }
    return rec;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

} // namespace

std::string_view to_string(ArrivalMode mode) {
    return mode == ArrivalMode::physical ? "physical" : "analytic";
}

ArrivalMode arrival_mode_from_string(std::string_view name) {
    if (name == "analytic") return ArrivalMode::analytic;
    if (name == "physical") return ArrivalMode::physical;
    throw ConfigError("unknown arrival mode '" + std::string(name) + "'");
}

void CascadeConfig::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    require(finite(decay_rate) && decay_rate > 0.0, "decay_rate must be positive");
    require(finite(lifetime) && lifetime > 0.0, "lifetime must be positive");
    require(finite(gate) && gate > 0.0, "gate must be positive");
    require(finite(correlation_factor) && correlation_factor >= 1.0,
            "correlation_factor must be >= 1");
    for (double e : {efficiency_trigger, efficiency_t, efficiency_r, accidental_collection}) {
        require(e >= 0.0 && e <= 1.0, "efficiencies and collection must lie in [0, 1]");
    }
    require(efficiency_trigger > 0.0, "efficiency_trigger must be positive");
    require(f_omega(*this) <= 1.0 + 1e-12, "a (1 - exp(-omega/tau)) exceeds 1");
    require(gate_target > 0 || (finite(run_time) && run_time > 0.0),
            "either gate_target or a positive run_time is required");
    require(workers >= 1, "workers must be at least 1");
}

void CascadeConfig::set_f_omega(double f) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("f(omega) must lie in (0, 1]");
    correlation_factor = f / -std::expm1(-gate / lifetime);
}

CountRecord& CountRecord::operator+=(const CountRecord& o) noexcept {
    n1_counts += o.n1_counts;
    nt_counts += o.nt_counts;
    nr_counts += o.nr_counts;
    nc_counts += o.nc_counts;
    total_gates += o.total_gates;
    trigger_arrivals += o.trigger_arrivals;
    accidental_arrivals += o.accidental_arrivals;
    detections_t += o.detections_t;
    detections_r += o.detections_r;
    elapsed_sim_time += o.elapsed_sim_time;
    return *this;
}

double f_omega(const CascadeConfig& cfg) {
    return cfg.correlation_factor * -std::expm1(-cfg.gate / cfg.lifetime);
}

double g2_analytic(double n_omega, double f) {
    if (!(n_omega >= 0.0) || !std::isfinite(n_omega)) {
        throw InvalidArgument("N omega must be finite and nonnegative");
    }
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("f must lie in [0, 1]");
    const double denom = (f + n_omega) * (f + n_omega);
    if (denom == 0.0) throw DegenerateState("g2 undefined for N omega = f = 0");
    return (2.0 * f * n_omega + n_omega * n_omega) / denom;
}

CountRecord simulate(const CascadeConfig& cfg) {
    cfg.validate();
    const unsigned w = cfg.workers;
    std::vector<WorkerPlan> plans(w);
    for (unsigned i = 0; i < w; ++i) {
        plans[i].seed = splitmix64(cfg.seed ^ splitmix64(i + 1));
        if (cfg.gate_target > 0) {
            plans[i].gate_target = cfg.gate_target / w + (i < cfg.gate_target % w ? 1 : 0);
        } else {
            plans[i].run_time = cfg.run_time / w;
        }
    }

    std::vector<CountRecord> results(w);
    if (w == 1) {
        results[0] = run_worker(cfg, plans[0]);
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(w);
        for (unsigned i = 0; i < w; ++i) {
            threads.emplace_back([&, i] { results[i] = run_worker(cfg, plans[i]); });
        }
    }

    CountRecord total;
    for (const auto& r : results) total += r;
    return total;
}

double measured_alpha(const CountRecord& rec) {
    if (rec.nt_counts == 0 || rec.nr_counts == 0) {
        throw InsufficientCounts("alpha needs nonzero singles counts in both arms");
    }
    return static_cast<double>(rec.n1_counts) * static_cast<double>(rec.nc_counts) /
           (static_cast<double>(rec.nt_counts) * static_cast<double>(rec.nr_counts));
}

double alpha_standard_error(const CountRecord& rec) {
    if (rec.nt_counts == 0 || rec.nr_counts == 0 || rec.n1_counts == 0) {
        throw InsufficientCounts("standard error needs nonzero singles counts");
    }
    const double g = static_cast<double>(rec.n1_counts);
    const double nc = std::max<double>(static_cast<double>(rec.nc_counts), 1.0);
    const double pc = nc / g;
    const double pt = static_cast<double>(rec.nt_counts) / g;
    const double pr = static_cast<double>(rec.nr_counts) / g;
    // Per-gate indicators are multinomial, so the three proportions are
    // correlated: cov(pc, pt) = pc (1 - pt) / G and cov(pt, pr) = (pc - pt pr) / G.
    const double rel_var = ((1.0 - pc) / pc + (1.0 - pt) / pt + (1.0 - pr) / pr -
                            2.0 * (1.0 - pt) - 2.0 * (1.0 - pr) +
                            2.0 * (pc - pt * pr) / (pt * pr)) /
                           g;
    const double alpha = g * nc / (static_cast<double>(rec.nt_counts) *
                                   static_cast<double>(rec.nr_counts));
    return alpha * std::sqrt(std::max(rel_var, 0.0));
}

std::vector<SweepPoint> sweep_curve(const CascadeConfig& cfg_template,
                                    std::span<const double> n_omega_values) {
    if (cfg_template.gate_target == 0) throw ConfigError("sweep requires a gate_target");
    std::vector<SweepPoint> out;
    out.reserve(n_omega_values.size());
    std::uint64_t index = 0;
    for (double x : n_omega_values) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("N omega must be nonnegative");
        CascadeConfig cfg = cfg_template;
        cfg.seed = cfg_template.seed + index++;
        if (x == 0.0) {
            cfg.accidental_collection = 0.0;
        } else {
            if (!(cfg.accidental_collection > 0.0)) {
                throw ConfigError("positive N omega needs accidental_collection > 0");
            }
            cfg.decay_rate = x / (cfg.gate * cfg.accidental_collection);
        }
        const CountRecord rec = simulate(cfg);
        SweepPoint p{x, 0.0, g2_analytic(x, f_omega(cfg)), 0.0, rec.total_gates};
        p.alpha_mc = measured_alpha(rec);
        p.std_error = alpha_standard_error(rec);
        out.push_back(p);
    }
    return out;
}

} // namespace gralab::cascade
