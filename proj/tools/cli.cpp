#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "gralab/classical.hpp"
#include "gralab/error.hpp"
#include "gralab/io/csv.hpp"
#include "gralab/io/svg_plot.hpp"

namespace gralab::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Shared plumbing

struct Globals {
    std::uint64_t seed = 1;
    bool seed_given = false;
    std::string out_dir = ".";
    std::string format = "csv";
};

class Session {
public:
    Session(std::string subcommand, const Globals& g, std::ostream& out, std::ostream& err)
        : name_(std::move(subcommand)), g_(g), out_(out), err_(err),
          start_(std::chrono::steady_clock::now()) {}

    std::ostream& out() { return out_; }
    std::ostream& err() { return err_; }
    const Globals& globals() const { return g_; }
    bool json_output() const { return g_.format == "json"; }

    std::string write(const std::string& file, const std::string& content) {
        std::filesystem::create_directories(g_.out_dir);
        const auto path = (std::filesystem::path(g_.out_dir) / file).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + path);
        f << content;
        if (!f) throw ConfigError("failed writing " + path);
        outputs_.push_back(path);
        return path;
    }

    void check(bool ok, const std::string& what) {
        checks_[what] = ok;
        if (!ok) {
            failed_ = true;
            err_ << "check failed: " << what << '\n';
        }
    }

    int finish(const ordered_json& config, ordered_json results = ordered_json::object()) {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        ordered_json m;
        m["subcommand"] = name_;
        m["engine"] = "gralab " + std::string(kVersion);
        m["rng_seed"] = g_.seed;
        m["rng_algorithm"] = std::string(cascade::kRngAlgorithm);
        m["config"] = config;
        m["results"] = std::move(results);
        m["checks"] = checks_;
        m["outputs"] = outputs_;
        m["wall_clock_seconds"] = wall;
        std::filesystem::create_directories(g_.out_dir);
        const auto path = (std::filesystem::path(g_.out_dir) / (name_ + "_manifest.json")).string();
        std::ofstream f(path);
        if (!f) throw ConfigError("cannot write " + path);
        f << m.dump(2) << '\n';
        return failed_ ? kCheckFailed : kOk;
    }

private:
    std::string name_;
    Globals g_;
    std::ostream& out_;
    std::ostream& err_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
    ordered_json checks_ = ordered_json::object();
    bool failed_ = false;
};

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

beables::Vec3 as_vec3(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 3) throw ConfigError("config key '" + key + "' must be [x, y, z]");
    return {as_number(v[0], key), as_number(v[1], key), as_number(v[2], key)};
}

using Setter = std::function<void(const json&)>;

void apply_keys(const json& j, const std::map<std::string, Setter>& setters, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown key '" + key + "' in " + where);
        it->second(value);
    }
}

std::string csv_of(const std::function<void(io::CsvWriter&)>& fill) {
    std::ostringstream s;
    io::CsvWriter w(s);
    fill(w);
    return s.str();
}

std::string fmt(double v) { return io::format_number(v); }

// Prints a two-column report either as CSV or as a JSON object.
void print_report(Session& s, const ordered_json& report) {
    if (s.json_output()) {
        s.out() << report.dump(2) << '\n';
        return;
    }
    s.out() << "quantity,value\n";
    for (const auto& [k, v] : report.items()) {
        if (v.is_number_float()) {
            s.out() << k << ',' << fmt(v.get<double>()) << '\n';
        } else if (v.is_string()) {
            s.out() << k << ',' << v.get<std::string>() << '\n';
        } else {
            s.out() << k << ',' << v.dump() << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// g2

struct G2Options {
    std::string state;
    double transmittance = 0.5;
    double phase = kPi / 2;
    bool oracle = false;
    std::size_t n_max = 0;
    bool write_csv = false;
};

int cmd_g2(const G2Options& o, Session& s) {
    const auto state = parse_state_spec(o.state);
    const auto bs = fock::BeamSplitter::from_transmittance(o.transmittance, o.phase);

    ordered_json report;
    report["state"] = o.state;
    report["transmittance"] = o.transmittance;
    report["transmitted"] = fock::expect_transmitted(state, bs);
    report["reflected"] = fock::expect_reflected(state, bs);
    report["coincidence"] = fock::expect_coincidence(state, bs);
    const double g2 = fock::g2(state, bs);
    report["g2"] = g2;
    if (o.oracle) {
        const std::size_t n_max = o.n_max ? o.n_max : fock::default_oracle_n_max(state);
        const auto space = fock::oracle_output_state(state, bs, n_max);
        const auto e = fock::oracle_expectations(space);
        const double og2 = e.coincidence / (e.transmitted * e.reflected);
        report["n_max"] = n_max;
        report["leakage"] = e.leakage;
        report["oracle_g2"] = og2;
        report["discrepancy"] = std::abs(og2 - g2);
        s.check(std::abs(og2 - g2) <= 1e-8, "oracle agrees with closed form to 1e-8");
    }
    print_report(s, report);

    if (o.write_csv) {
        s.write("g2.csv", csv_of([&](io::CsvWriter& w) {
                    w.meta("state", o.state);
                    w.meta("reflection_phase", o.phase);
                    std::vector<std::string> cols{"transmittance", "transmitted", "reflected",
                                                  "coincidence", "g2"};
                    std::vector<double> row{o.transmittance, report["transmitted"].get<double>(),
                                            report["reflected"].get<double>(),
                                            report["coincidence"].get<double>(), g2};
                    if (o.oracle) {
                        cols.insert(cols.end(), {"oracle_g2", "discrepancy"});
                        row.push_back(report["oracle_g2"].get<double>());
                        row.push_back(report["discrepancy"].get<double>());
                    }
                    w.header(cols);
                    w.row(row);
                }));
    }
    ordered_json cfg;
    cfg["state"] = o.state;
    cfg["transmittance"] = o.transmittance;
    cfg["reflection_phase"] = o.phase;
    cfg["oracle"] = o.oracle;
    return s.finish(cfg, report);
}

// ---------------------------------------------------------------------------
// cascade

struct CascadeOptions {
    std::string config_path;
    bool sweep = false;
    std::uint64_t gates = 0;
    std::vector<double> points;
    std::string mode;
    unsigned workers = 0;
    bool check = false;
};

const std::vector<double> kDefaultSweep = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.9, 1.0, 2.0, 3.0};

bool within_tolerance(double mc, double analytic, double stderr_) {
    return std::abs(mc - analytic) <= std::max(0.05 * analytic, 3.0 * stderr_);
}

int cmd_cascade(const CascadeOptions& o, Session& s) {
    cascade::CascadeConfig cfg = figure_sweep_config();
    std::vector<double> points = kDefaultSweep;
    if (!o.config_path.empty()) {
        const json j = read_json_file(o.config_path);
        cfg = cascade_config_from_json(j, cfg);
        if (j.contains("n_omega")) {
            points.clear();
            for (const auto& v : j.at("n_omega")) points.push_back(as_number(v, "n_omega"));
        }
    }
    if (!o.points.empty()) points = o.points;
    if (o.gates) cfg.gate_target = o.gates;
    if (!o.mode.empty()) cfg.mode = cascade::arrival_mode_from_string(o.mode);
    if (o.workers) cfg.workers = o.workers;
    if (s.globals().seed_given) cfg.seed = s.globals().seed;
    cfg.validate();

    const double f = cascade::f_omega(cfg);
    ordered_json results;
    auto metadata = [&](io::CsvWriter& w) {
        w.meta("seed", std::to_string(cfg.seed));
        w.meta("mode", cascade::to_string(cfg.mode));
        w.meta("rng", cascade::kRngAlgorithm);
        w.meta("workers", std::to_string(cfg.workers));
        w.meta("f_omega", f);
        w.meta("gates_per_point", std::to_string(cfg.gate_target));
    };

    if (o.sweep) {
        const auto table = cascade::sweep_curve(cfg, points);
        const std::string csv = csv_of([&](io::CsvWriter& w) {
            metadata(w);
            w.header({"n_omega", "alpha_mc", "alpha_analytic", "stderr", "gates"});
            for (const auto& p : table) {
                w.row({p.n_omega, p.alpha_mc, p.alpha_analytic, p.std_error,
                       static_cast<double>(p.gates)});
            }
        });
        s.write("cascade_sweep.csv", csv);

        io::PlotSeries analytic{"analytic", {}, {}, false};
        for (int i = 0; i <= 200; ++i) {
            const double x = std::pow(10.0, -3.0 + 4.0 * i / 200.0);
            analytic.x.push_back(x);
            analytic.y.push_back(cascade::g2_analytic(x, f));
        }
        io::PlotSeries mc{"Monte Carlo", {}, {}, true};
        for (const auto& p : table) {
            mc.x.push_back(p.n_omega);
            mc.y.push_back(p.alpha_mc);
        }
        s.write("cascade_sweep.svg",
                io::render_svg({analytic, mc}, {"alpha vs N omega, f(omega) = " + fmt(f), "N omega",
                                                "alpha", true}));

        bool all_ok = true;
        ordered_json rows = ordered_json::array();
        for (const auto& p : table) {
            const bool ok = within_tolerance(p.alpha_mc, p.alpha_analytic, p.std_error);
            all_ok = all_ok && ok;
            rows.push_back({{"n_omega", p.n_omega}, {"alpha_mc", p.alpha_mc},
                            {"alpha_analytic", p.alpha_analytic}, {"stderr", p.std_error},
                            {"gates", p.gates}, {"agrees", ok}});
        }
        if (o.check) s.check(all_ok, "Monte Carlo alpha within max(5%, 3 stderr) of analytic");
        results["points"] = rows;
        if (s.json_output()) {
            s.out() << rows.dump(2) << '\n';
        } else {
            s.out() << csv;
        }
    } else {
        const auto rec = cascade::simulate(cfg);
        const double nw = cfg.accidental_mean();
        const double analytic = cascade::g2_analytic(nw, f);
        std::optional<double> alpha;
        std::optional<double> se;
        if (rec.nt_counts > 0 && rec.nr_counts > 0) {
            alpha = cascade::measured_alpha(rec);
            se = cascade::alpha_standard_error(rec);
        }
        const double trigger_fraction =
            static_cast<double>(rec.trigger_arrivals) / static_cast<double>(rec.total_gates);
        const std::string csv = csv_of([&](io::CsvWriter& w) {
            metadata(w);
            w.header({"n_omega", "alpha_mc", "alpha_analytic", "stderr", "gates", "n1", "nt", "nr",
                      "nc", "trigger_fraction"});
            w.row({nw, alpha.value_or(std::nan("")), analytic, se.value_or(std::nan("")),
                   static_cast<double>(rec.total_gates), static_cast<double>(rec.n1_counts),
                   static_cast<double>(rec.nt_counts), static_cast<double>(rec.nr_counts),
                   static_cast<double>(rec.nc_counts), trigger_fraction});
        });
        s.write("cascade_run.csv", csv);
        results = {{"n_omega", nw},
                   {"alpha_analytic", analytic},
                   {"gates", rec.total_gates},
                   {"nt", rec.nt_counts},
                   {"nr", rec.nr_counts},
                   {"nc", rec.nc_counts},
                   {"trigger_fraction", trigger_fraction}};
        if (alpha) {
            results["alpha_mc"] = *alpha;
            results["stderr"] = *se;
        }
        if (o.check) {
            s.check(alpha.has_value() && within_tolerance(*alpha, analytic, *se),
                    "Monte Carlo alpha within max(5%, 3 stderr) of analytic");
        }
        print_report(s, results);
    }
    ordered_json config = cascade_config_to_json(cfg);
    if (o.sweep) config["n_omega"] = points;
    return s.finish(config, results);
}

// ---------------------------------------------------------------------------
// beables

struct BeablesOptions {
    std::string config_path;
    int region = 1;
    std::optional<double> phi;
    int grid = 0;
    bool check_wave_eq = false;
    bool visibility_sweep = false;
    int points = 360;
    double periods = 1.0;
};

struct BeablesSetup {
    beables::ModePair pair;
    beables::FieldSettings settings;
    std::optional<double> dt;
    std::string vacuum_policy = "zero";
    std::uint64_t vacuum_seed = 0;
    std::vector<std::pair<beables::Vec3, beables::Vec3>> vacuum_grid;
};

BeablesSetup beables_setup(const std::string& path, std::uint64_t seed) {
    BeablesSetup b;
    b.vacuum_seed = seed;
    if (path.empty()) return b;
    const json j = read_json_file(path);
    apply_keys(
        j,
        {
            {"pair", [&](const json& v) { b.pair = mode_pair_from_json(v); }},
            {"volume", [&](const json& v) { b.settings.volume = as_number(v, "volume"); }},
            {"dt", [&](const json& v) { b.dt = as_number(v, "dt"); }},
            {"units",
             [&](const json& v) {
                 if (v == "natural") {
                     b.settings.units = beables::Units::natural();
                 } else if (v == "si") {
                     b.settings.units = beables::Units::si();
                 } else if (v.is_object()) {
                     apply_keys(v,
                                {{"hbar", [&](const json& x) { b.settings.units.hbar = as_number(x, "hbar"); }},
                                 {"c", [&](const json& x) { b.settings.units.c = as_number(x, "c"); }}},
                                "units");
                 } else {
                     throw ConfigError("units must be \"natural\", \"si\" or {hbar, c}");
                 }
             }},
            {"vacuum",
             [&](const json& v) {
                 apply_keys(
                     v,
                     {{"policy",
                       [&](const json& x) {
                           b.vacuum_policy = x.get<std::string>();
                           if (b.vacuum_policy != "zero" && b.vacuum_policy != "sampled") {
                               throw ConfigError("vacuum policy must be \"zero\" or \"sampled\"");
                           }
                       }},
                      {"seed", [&](const json& x) { b.vacuum_seed = x.get<std::uint64_t>(); }},
                      {"modes",
                       [&](const json& x) {
                           for (const auto& m : x) {
                               b.vacuum_grid.emplace_back(as_vec3(m.at("k"), "k"), as_vec3(m.at("pol"), "pol"));
                           }
                       }}},
                     "vacuum");
             }},
        },
        "beables config");
    b.pair.validate();
    if (b.vacuum_policy == "sampled") {
        b.settings.vacuum = beables::sample_vacuum_modes(b.vacuum_grid, b.settings.units, b.vacuum_seed);
    }
    return b;
}

ordered_json pair_to_json(const beables::ModePair& p) {
    auto v = [](const beables::Vec3& x) { return ordered_json::array({x(0), x(1), x(2)}); };
    return {{"amp_a", p.amp_a}, {"amp_b", p.amp_b}, {"phase_a", p.phase_a}, {"phase_b", p.phase_b},
            {"k_a", v(p.k_a)},   {"k_b", v(p.k_b)},   {"pol_a", v(p.pol_a)},   {"pol_b", v(p.pol_b)}};
}

int cmd_beables(const BeablesOptions& o, Session& s) {
    const BeablesSetup b = beables_setup(o.config_path, s.globals().seed);
    const auto& u = b.settings.units;
    const auto& pair = b.pair;
    ordered_json results;

    if (o.region == 1) {
        const beables::ExactRegion1 exact(pair, u);
        const double fastest = std::max({exact.rotation_rate(), beables::nonclassical_frequency(pair.amp_a, u),
                                         beables::nonclassical_frequency(pair.amp_b, u)});
        const double t_end = o.periods * 2.0 * kPi / fastest;
        const double dt = b.dt.value_or(beables::default_step(pair, u));
        const auto traj = beables::integrate_region1(pair, t_end, dt, u, b.settings.vacuum);
        const bool manifold = beables::on_constant_modulus_manifold(pair);

        double max_err = 0.0;
        double max_modulus_drift = 0.0;
        const std::string csv = csv_of([&](io::CsvWriter& w) {
            w.meta("region", "1");
            w.meta("dt", dt);
            w.header({"t", "re_q_a", "im_q_a", "re_q_b", "im_q_b", "abs_q_a", "abs_q_b", "error"});
            for (std::size_t i = 0; i < traj.t.size(); ++i) {
                const double t = traj.t[i];
                const double e = std::max(std::abs(traj.q_a[i] - exact.q_a(t)),
                                          std::abs(traj.q_b[i] - exact.q_b(t)));
                max_err = std::max(max_err, e);
                max_modulus_drift = std::max({max_modulus_drift,
                                              std::abs(std::abs(traj.q_a[i]) - std::abs(traj.q_a[0])),
                                              std::abs(std::abs(traj.q_b[i]) - std::abs(traj.q_b[0]))});
                w.row({t, traj.q_a[i].real(), traj.q_a[i].imag(), traj.q_b[i].real(), traj.q_b[i].imag(),
                       std::abs(traj.q_a[i]), std::abs(traj.q_b[i]), e});
            }
        });
        s.write("trajectory.csv", csv);
        io::PlotSeries re_a{"Re q_a", traj.t, {}, false};
        io::PlotSeries re_b{"Re q_b", traj.t, {}, false};
        for (std::size_t i = 0; i < traj.t.size(); ++i) {
            re_a.y.push_back(traj.q_a[i].real());
            re_b.y.push_back(traj.q_b[i].real());
        }
        s.write("trajectory.svg", io::render_svg({re_a, re_b}, {"Region I mode coordinates", "t", "Re q"}));

        results["max_error_vs_exact"] = max_err;
        results["on_constant_modulus_manifold"] = manifold;
        results["rotation_rate"] = exact.rotation_rate();
        s.check(max_err < 1e-6, "integration matches the exact solution to 1e-6");
        if (manifold) {
            const double fitted = beables::fitted_frequency(traj);
            const double expected = beables::nonclassical_frequency(pair.amp_a, u);
            results["modulus_drift"] = max_modulus_drift;
            results["fitted_frequency"] = fitted;
            results["nonclassical_frequency"] = expected;
            results["frequency_relative_error"] = std::abs(fitted - expected) / expected;
            s.check(std::abs(fitted - expected) <= 1e-9 * expected,
                    "fitted frequency equals hbar c^2 / (4 amp^2) to 1e-9");
        }
        if (o.check_wave_eq) {
            double worst = 0.0;
            for (int i = 0; i < 8; ++i) {
                worst = std::max(worst, beables::wave_equation_residual(pair, t_end * i / 8.0, u));
            }
            results["wave_equation_residual"] = worst;
            s.check(worst < 1e-4, "wave-equation residual below 1e-4");
        }
    } else {
        const beables::Vec3 origin = beables::Vec3::Zero();
        if (o.phi) {
            const auto beams = beables::time_averaged_beam_intensities(pair, *o.phi, origin, b.settings);
            const double total = beams.c + beams.d;
            results["phi"] = *o.phi;
            results["beam_c"] = beams.c;
            results["beam_d"] = beams.d;
            results["beam_c_fraction"] = beams.c / total;
            results["beam_d_fraction"] = beams.d / total;
            if (std::cos(*o.phi) == 1.0) {
                s.check(std::abs(beams.d) < 1e-12 * total, "d-beam extinguished at phi = 0");
            }
            if (std::cos(*o.phi) == -1.0) {
                s.check(std::abs(beams.c) < 1e-12 * total, "c-beam extinguished at phi = pi");
            }
        }
        if (o.visibility_sweep) {
            const auto curve = beables::visibility_sweep(pair, origin, o.points, b.settings);
            double lo = INFINITY;
            double hi = -INFINITY;
            const std::string csv = csv_of([&](io::CsvWriter& w) {
                w.meta("region", "2");
                w.header({"phi", "beam_c", "beam_d", "total"});
                for (std::size_t i = 0; i < curve.phi.size(); ++i) {
                    const double total = curve.beam_c[i] + curve.beam_d[i];
                    lo = std::min(lo, total);
                    hi = std::max(hi, total);
                    w.row({curve.phi[i], curve.beam_c[i], curve.beam_d[i], total});
                }
            });
            s.write("visibility.csv", csv);
            s.write("visibility.svg",
                    io::render_svg({{"beam c", curve.phi, curve.beam_c, false},
                                    {"beam d", curve.phi, curve.beam_d, false}},
                                   {"Time-averaged output intensity", "phi", "intensity"}));
            results["visibility_c"] = curve.visibility_c;
            results["visibility_d"] = curve.visibility_d;
            results["total_relative_spread"] = (hi - lo) / hi;
            s.check(std::abs(curve.visibility_c - 1.0) <= 1e-9 && std::abs(curve.visibility_d - 1.0) <= 1e-9,
                    "visibility of both output beams is 1 to 1e-9");
            s.check((hi - lo) <= 1e-10 * hi, "summed output intensity independent of phi to 1e-10");
        }
    }

    if (o.grid > 0) {
        const double phi = o.phi.value_or(0.0);
        const double span = 2.0 * kPi / pair.k0();
        const std::string csv = csv_of([&](io::CsvWriter& w) {
            w.meta("region", std::to_string(o.region));
            w.meta("t", 0.0);
            w.header({"x", "y", "z", "Ax", "Ay", "Az", "Ex", "Ey", "Ez", "Bx", "By", "Bz", "Ix", "Iy", "Iz"});
            for (int i = 0; i < o.grid; ++i) {
                const beables::Vec3 x(span * i / o.grid, 0.0, 0.0);
                const auto f = o.region == 1 ? beables::beables_region1(pair, x, 0.0, b.settings)
                                             : beables::beables_region2(pair, phi, x, 0.0, b.settings);
                w.row({x(0), x(1), x(2), f.A(0), f.A(1), f.A(2), f.E(0), f.E(1), f.E(2), f.B(0), f.B(1),
                       f.B(2), f.I(0), f.I(1), f.I(2)});
            }
        });
        s.write("beables_grid.csv", csv);
    }

    print_report(s, results);
    ordered_json config;
    config["region"] = o.region;
    config["pair"] = pair_to_json(pair);
    config["volume"] = b.settings.volume;
    config["units"] = {{"hbar", u.hbar}, {"c", u.c}};
    config["vacuum_policy"] = b.vacuum_policy;
    if (b.vacuum_policy == "sampled") config["vacuum_seed"] = b.vacuum_seed;
    if (o.phi) config["phi"] = *o.phi;
    return s.finish(config, results);
}

// ---------------------------------------------------------------------------
// photodetect

struct PhotodetectOptions {
    std::string config_path;
    std::vector<double> times;
    int points = 401;
    std::size_t n_max = 3;
    std::optional<double> phi;
};

int cmd_photodetect(const PhotodetectOptions& o, Session& s) {
    photodetect::DetectorAtomConfig cfg;
    std::vector<double> times = {10.0, 20.0, 40.0};
    std::size_t n_max = o.n_max;
    if (!o.config_path.empty()) {
        const json j = read_json_file(o.config_path);
        apply_keys(j,
                   {{"atom", [&](const json& v) { cfg = detector_config_from_json(v, cfg); }},
                    {"times",
                     [&](const json& v) {
                         times.clear();
                         for (const auto& t : v) times.push_back(as_number(t, "times"));
                     }},
                    {"n_max", [&](const json& v) { n_max = v.get<std::size_t>(); }}},
                   "photodetect config");
    }
    if (!o.times.empty()) times = o.times;
    if (o.phi) cfg.phi = *o.phi;
    cfg.validate();
    if (times.empty()) throw ConfigError("at least one time is required");

    ordered_json results;
    const double k_res = photodetect::resonant_wavenumber(cfg);
    double t_min = INFINITY;
    double t_max = 0.0;
    for (double t : times) {
        if (!(t >= 0.0)) throw ConfigError("times must be nonnegative");
        if (t > 0.0) t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
    }
    const double e_span = std::isfinite(t_min) ? 8.0 * kPi * cfg.hbar / t_min : 1.0;

    std::vector<std::string> cols{"E"};
    for (double t : times) cols.push_back("eta2_t=" + fmt(t));
    std::vector<io::PlotSeries> energy_series;
    for (double t : times) energy_series.push_back({"t = " + fmt(t), {}, {}, false});
    bool zero_time_all_zero = true;
    const std::string energy_csv = csv_of([&](io::CsvWriter& w) {
        w.meta("k_en", k_res);
        w.meta("phi", cfg.phi);
        w.header(cols);
        for (int i = 0; i < o.points; ++i) {
            const double e = -e_span + 2.0 * e_span * i / std::max(o.points - 1, 1);
            std::vector<double> row{e};
            for (std::size_t j = 0; j < times.size(); ++j) {
                const double v = photodetect::eta_squared_at_mismatch(cfg, k_res, e, times[j]);
                if (times[j] == 0.0 && v != 0.0) zero_time_all_zero = false;
                row.push_back(v);
                energy_series[j].x.push_back(e);
                energy_series[j].y.push_back(v);
            }
            w.row(row);
        }
    });
    s.write("eta_vs_energy.csv", energy_csv);
    s.write("eta_vs_energy.svg", io::render_svg(energy_series, {"|eta|^2 vs energy mismatch", "E", "|eta|^2"}));

    const std::string time_csv = csv_of([&](io::CsvWriter& w) {
        w.meta("k_en", k_res);
        w.header({"t", "eta2_resonant"});
        for (int i = 0; i <= 100; ++i) {
            const double t = t_max * i / 100.0;
            w.row({t, std::norm(photodetect::eta(cfg, k_res, t))});
        }
    });
    s.write("eta_vs_time.csv", time_csv);

    const auto [ca, cb] = photodetect::region1_coefficients(cfg.phi);
    const auto report = photodetect::absorption_matrix_element_check(ca, cb, cfg.k0, n_max);
    ordered_json overlaps = ordered_json::array();
    for (const auto& ov : report.nonzero) {
        overlaps.push_back({{"n_a", ov.n_a}, {"n_b", ov.n_b}, {"re", ov.value.real()}, {"im", ov.value.imag()}});
    }
    results["resonant_k_en"] = k_res;
    results["basis_size"] = report.basis_size;
    results["nonzero_overlaps"] = overlaps;
    results["vacuum_overlap_abs"] = std::abs(report.vacuum_overlap);
    results["expected_vacuum_overlap_abs"] = std::abs(photodetect::absorption_amplitude(cfg.phi, cfg.k0));
    results["max_non_vacuum_overlap"] = report.max_other;
    results["absorption_amplitude_vanishes"] = report.amplitude_vanishes;
    if (report.amplitude_vanishes) {
        s.err() << "note: the absorption amplitude (i - exp(i phi)) vanishes at phi = " << fmt(cfg.phi) << '\n';
    }
    s.check(report.whole_quantum, "only the field vacuum overlaps after absorption");
    if (!report.amplitude_vanishes) {
        s.check(report.nonzero.size() == 1, "exactly one nonzero field-sector overlap");
    }
    if (std::find(times.begin(), times.end(), 0.0) != times.end()) {
        s.check(zero_time_all_zero, "t = 0 profile vanishes");
    }
    if (t_max > 0.0 && !report.amplitude_vanishes) {
        const double r = std::norm(photodetect::eta(cfg, k_res, t_max)) /
                         std::norm(photodetect::eta(cfg, k_res, 0.5 * t_max));
        results["resonant_growth_ratio"] = r;
        s.check(std::abs(r - 4.0) <= 1e-9, "resonant |eta|^2 grows as t^2");
    }
    print_report(s, results);

    ordered_json config{{"hbar", cfg.hbar},
                        {"c", cfg.c},
                        {"reduced_mass", cfg.reduced_mass},
                        {"charge", cfg.charge},
                        {"bohr_radius", cfg.bohr_radius},
                        {"initial_electron_energy", cfg.initial_electron_energy},
                        {"k0", cfg.k0},
                        {"phi", cfg.phi},
                        {"volume", cfg.volume},
                        {"times", times},
                        {"n_max", n_max}};
    return s.finish(config, results);
}

// ---------------------------------------------------------------------------
// classical

struct ClassicalOptions {
    std::vector<double> intensities;
    std::string distribution = "exponential";
    std::size_t samples = 100000;
    double mean = 1.0;
    double gate = 1.0;
    double eff_t = 0.1;
    double eff_r = 0.1;
};

int cmd_classical(const ClassicalOptions& o, Session& s) {
    std::vector<double> values = o.intensities;
    if (values.empty()) {
        std::mt19937_64 engine(s.globals().seed);
        auto uniform = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
        values.reserve(o.samples);
        for (std::size_t i = 0; i < o.samples; ++i) {
            if (o.distribution == "constant") {
                values.push_back(o.mean);
            } else if (o.distribution == "two-point") {
                values.push_back(uniform() < 0.5 ? 0.0 : 2.0 * o.mean);
            } else {
                values.push_back(-o.mean * std::log1p(-uniform()));
            }
        }
    }
    const classical::GateIntensityEnsemble ens(values, o.gate, o.eff_t, o.eff_r);
    const auto singles = classical::singles_probabilities(ens);
    const double pc = classical::coincidence_probability(ens);
    const double alpha = classical::classical_alpha(ens);

    ordered_json results{{"gates", values.size()},
                         {"mean_intensity", ens.mean_intensity()},
                         {"mean_square_intensity", ens.mean_square_intensity()},
                         {"p_t", singles.transmitted},
                         {"p_r", singles.reflected},
                         {"p_c", pc},
                         {"alpha", alpha},
                         {"admissible", ens.admissible()}};
    if (!ens.admissible()) s.err() << "warning: a detection probability exceeds 1\n";
    s.check(alpha >= 1.0, "classical alpha >= 1");
    print_report(s, results);
    ordered_json config{{"distribution", o.intensities.empty() ? o.distribution : "explicit"},
                        {"samples", values.size()},
                        {"mean", o.mean},
                        {"gate", o.gate},
                        {"efficiency_t", o.eff_t},
                        {"efficiency_r", o.eff_r}};
    return s.finish(config, results);
}

} // namespace

// ---------------------------------------------------------------------------
// Parsers

fock::QuantumState parse_state_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidArgument("state spec must look like kind:value, got '" + std::string(spec) + "'");
    }
    const std::string kind(spec.substr(0, colon));
    const std::string arg(spec.substr(colon + 1));
    auto number = [&](const std::string& text) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size()) {
            throw InvalidArgument("malformed number '" + text + "' in state spec");
        }
        return v;
    };
    if (kind == "number") {
        const double n = number(arg);
        if (n < 0 || n != std::floor(n) || n > 1e6) {
            throw InvalidArgument("number state needs a nonnegative integer");
        }
        return fock::NumberState{static_cast<unsigned>(n)};
    }
    if (kind == "coherent") {
        const auto comma = arg.find(',');
        if (comma == std::string::npos) return fock::CoherentState({number(arg), 0.0});
        return fock::CoherentState({number(arg.substr(0, comma)), number(arg.substr(comma + 1))});
    }
    if (kind == "chaotic") return fock::ChaoticState(number(arg));
    throw InvalidArgument("unknown state kind '" + kind + "'");
}

double parse_duration(const nlohmann::json& value) {
    static const std::map<std::string, double> units = {
        {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
    auto scaled = [&](double v, std::string unit) {
        const auto it = units.find(unit);
        if (it == units.end()) throw ConfigError("unknown time unit '" + unit + "'");
        return v * it->second;
    };
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
        const std::string text = value.get<std::string>();
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw ConfigError("malformed duration '" + text + "'");
        }
        std::string unit = text.substr(used);
        unit.erase(0, unit.find_first_not_of(' '));
        if (unit.empty()) return v;
        return scaled(v, unit);
    }
    if (value.is_object() && value.contains("value") && value.contains("unit")) {
        return scaled(as_number(value.at("value"), "value"), value.at("unit").get<std::string>());
    }
    throw ConfigError("durations must be numbers (seconds), \"<value> <unit>\" or {value, unit}");
}

cascade::CascadeConfig cascade_config_from_json(const nlohmann::json& j, cascade::CascadeConfig cfg) {
    std::optional<double> f_target;
    std::optional<double> transmittance;
    std::optional<double> phase;
    apply_keys(j,
               {
                   {"decay_rate", [&](const json& v) { cfg.decay_rate = as_number(v, "decay_rate"); }},
                   {"lifetime", [&](const json& v) { cfg.lifetime = parse_duration(v); }},
                   {"gate", [&](const json& v) { cfg.gate = parse_duration(v); }},
                   {"correlation_factor",
                    [&](const json& v) { cfg.correlation_factor = as_number(v, "correlation_factor"); }},
                   {"f_omega", [&](const json& v) { f_target = as_number(v, "f_omega"); }},
                   {"efficiency_trigger",
                    [&](const json& v) { cfg.efficiency_trigger = as_number(v, "efficiency_trigger"); }},
                   {"efficiency_t", [&](const json& v) { cfg.efficiency_t = as_number(v, "efficiency_t"); }},
                   {"efficiency_r", [&](const json& v) { cfg.efficiency_r = as_number(v, "efficiency_r"); }},
                   {"accidental_collection",
                    [&](const json& v) { cfg.accidental_collection = as_number(v, "accidental_collection"); }},
                   {"transmittance", [&](const json& v) { transmittance = as_number(v, "transmittance"); }},
                   {"reflection_phase", [&](const json& v) { phase = as_number(v, "reflection_phase"); }},
                   {"mode", [&](const json& v) { cfg.mode = cascade::arrival_mode_from_string(v.get<std::string>()); }},
                   {"run_time", [&](const json& v) { cfg.run_time = parse_duration(v); }},
                   {"gate_target", [&](const json& v) { cfg.gate_target = v.get<std::uint64_t>(); }},
                   {"workers", [&](const json& v) { cfg.workers = v.get<unsigned>(); }},
                   {"seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); }},
                   {"n_omega", [](const json&) {}},
               },
               "cascade config");
    if (transmittance || phase) {
        try {
            cfg.beam_splitter = fock::BeamSplitter::from_transmittance(
                transmittance.value_or(cfg.beam_splitter.transmittance()),
                phase.value_or(cfg.beam_splitter.reflection_phase()));
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    if (f_target) cfg.set_f_omega(*f_target);
    return cfg;
}

nlohmann::ordered_json cascade_config_to_json(const cascade::CascadeConfig& cfg) {
    return {{"decay_rate", cfg.decay_rate},
            {"lifetime", cfg.lifetime},
            {"gate", cfg.gate},
            {"correlation_factor", cfg.correlation_factor},
            {"f_omega", cascade::f_omega(cfg)},
            {"efficiency_trigger", cfg.efficiency_trigger},
            {"efficiency_t", cfg.efficiency_t},
            {"efficiency_r", cfg.efficiency_r},
            {"effective_efficiency_t", cfg.effective_efficiency_t()},
            {"effective_efficiency_r", cfg.effective_efficiency_r()},
            {"accidental_collection", cfg.accidental_collection},
            {"transmittance", cfg.beam_splitter.transmittance()},
            {"reflection_phase", cfg.beam_splitter.reflection_phase()},
            {"mode", std::string(cascade::to_string(cfg.mode))},
            {"run_time", cfg.run_time},
            {"gate_target", cfg.gate_target},
            {"workers", cfg.workers},
            {"seed", cfg.seed}};
}

cascade::CascadeConfig figure_sweep_config() {
    cascade::CascadeConfig cfg;
    cfg.set_f_omega(0.9);
    cfg.efficiency_trigger = 1.0;
    cfg.efficiency_t = 0.2;
    cfg.efficiency_r = 0.2;
    cfg.decay_rate = 0.9 / cfg.gate;
    cfg.gate_target = 100000;
    return cfg;
}

beables::ModePair mode_pair_from_json(const nlohmann::json& j, beables::ModePair p) {
    apply_keys(j,
               {{"amp_a", [&](const json& v) { p.amp_a = as_number(v, "amp_a"); }},
                {"amp_b", [&](const json& v) { p.amp_b = as_number(v, "amp_b"); }},
                {"phase_a", [&](const json& v) { p.phase_a = as_number(v, "phase_a"); }},
                {"phase_b", [&](const json& v) { p.phase_b = as_number(v, "phase_b"); }},
                {"k_a", [&](const json& v) { p.k_a = as_vec3(v, "k_a"); }},
                {"k_b", [&](const json& v) { p.k_b = as_vec3(v, "k_b"); }},
                {"pol_a", [&](const json& v) { p.pol_a = as_vec3(v, "pol_a"); }},
                {"pol_b", [&](const json& v) { p.pol_b = as_vec3(v, "pol_b"); }}},
               "mode pair");
    return p;
}

photodetect::DetectorAtomConfig detector_config_from_json(const nlohmann::json& j,
                                                          photodetect::DetectorAtomConfig c) {
    apply_keys(j,
               {{"hbar", [&](const json& v) { c.hbar = as_number(v, "hbar"); }},
                {"c", [&](const json& v) { c.c = as_number(v, "c"); }},
                {"reduced_mass", [&](const json& v) { c.reduced_mass = as_number(v, "reduced_mass"); }},
                {"charge", [&](const json& v) { c.charge = as_number(v, "charge"); }},
                {"bohr_radius", [&](const json& v) { c.bohr_radius = as_number(v, "bohr_radius"); }},
                {"initial_electron_energy",
                 [&](const json& v) { c.initial_electron_energy = as_number(v, "initial_electron_energy"); }},
                {"k0", [&](const json& v) { c.k0 = as_number(v, "k0"); }},
                {"phi", [&](const json& v) { c.phi = as_number(v, "phi"); }},
                {"volume", [&](const json& v) { c.volume = as_number(v, "volume"); }}},
               "atom config");
    return c;
}

// ---------------------------------------------------------------------------
// Entry point

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Single-photon which-path and interference laboratory"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    Globals g;
    if (const char* env = std::getenv("GRALAB_OUT_DIR"); env && *env) g.out_dir = env;
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--out-dir", g.out_dir, "Directory for CSV, SVG and manifest output (env GRALAB_OUT_DIR)");
    app.add_option("--format", g.format, "Report format on stdout")->check(CLI::IsMember({"csv", "json"}));

    G2Options g2o;
    auto* g2 = app.add_subcommand("g2", "Second-order coherence behind a beam splitter");
    g2->add_option("state", g2o.state, "number:N | coherent:RE[,IM] | chaotic:U")->required();
    g2->add_option("--transmittance", g2o.transmittance, "t^2")->check(CLI::Range(0.0, 1.0));
    g2->add_option("--phase", g2o.phase, "Reflection phase in radians");
    g2->add_flag("--oracle", g2o.oracle, "Also evaluate the truncated Fock-space oracle");
    g2->add_option("--n-max", g2o.n_max, "Oracle truncation (default: automatic)");
    g2->add_flag("--csv", g2o.write_csv, "Write g2.csv to the output directory");

    CascadeOptions co;
    auto* casc = app.add_subcommand("cascade", "Gated cascade Monte Carlo");
    casc->add_option("--config", co.config_path, "JSON config file")->check(CLI::ExistingFile);
    casc->add_flag("--sweep", co.sweep, "Sweep N omega and compare with the analytic curve");
    casc->add_option("--gates", co.gates, "Gates per run or sweep point")->check(CLI::PositiveNumber);
    casc->add_option("--points", co.points, "Comma-separated N omega values")->delimiter(',');
    casc->add_option("--mode", co.mode, "analytic | physical")->check(CLI::IsMember({"analytic", "physical"}));
    casc->add_option("--workers", co.workers, "Worker threads")->check(CLI::PositiveNumber);
    casc->add_flag("--check", co.check, "Fail unless Monte Carlo agrees with the analytic value");

    BeablesOptions bo;
    auto* beab = app.add_subcommand("beables", "Field beables of the split photon");
    beab->add_option("--config", bo.config_path, "JSON config file")->check(CLI::ExistingFile);
    beab->add_option("--region", bo.region, "1 (after the splitter) or 2 (after the interferometer)")
        ->check(CLI::IsMember({1, 2}));
    beab->add_option("--phi", bo.phi, "Interferometer phase (region 2)");
    beab->add_option("--grid", bo.grid, "Number of beable sample points along x")->check(CLI::NonNegativeNumber);
    beab->add_flag("--check-wave-eq", bo.check_wave_eq, "Report the wave-equation residual (region 1)");
    beab->add_flag("--visibility-sweep", bo.visibility_sweep, "Sweep phi and report fringe visibility (region 2)");
    beab->add_option("--points", bo.points, "Points in the phi sweep")->check(CLI::PositiveNumber);
    beab->add_option("--periods", bo.periods, "Integration length in periods")->check(CLI::PositiveNumber);

    PhotodetectOptions po;
    auto* phot = app.add_subcommand("photodetect", "Photoionization amplitude and absorption selection rule");
    phot->add_option("--config", po.config_path, "JSON config file")->check(CLI::ExistingFile);
    phot->add_option("--times", po.times, "Comma-separated interaction times")->delimiter(',');
    phot->add_option("--points", po.points, "Energy grid points")->check(CLI::PositiveNumber);
    phot->add_option("--n-max", po.n_max, "Fock truncation for the selection-rule scan");
    phot->add_option("--phi", po.phi, "Interferometer phase");

    ClassicalOptions clo;
    auto* clas = app.add_subcommand("classical", "Semiclassical gate-intensity model");
    clas->add_option("--intensities", clo.intensities, "Comma-separated gate intensities")->delimiter(',');
    clas->add_option("--distribution", clo.distribution, "constant | two-point | exponential")
        ->check(CLI::IsMember({"constant", "two-point", "exponential"}));
    clas->add_option("--samples", clo.samples, "Number of sampled gates")->check(CLI::PositiveNumber);
    clas->add_option("--mean", clo.mean, "Mean intensity")->check(CLI::PositiveNumber);
    clas->add_option("--gate", clo.gate, "Gate duration");
    clas->add_option("--eff-t", clo.eff_t, "Transmitted-arm efficiency");
    clas->add_option("--eff-r", clo.eff_r, "Reflected-arm efficiency");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (g2->parsed()) {
            Session s("g2", g, out, err);
            return cmd_g2(g2o, s);
        }
        if (casc->parsed()) {
            Session s("cascade", g, out, err);
            return cmd_cascade(co, s);
        }
        if (beab->parsed()) {
            Session s("beables", g, out, err);
            return cmd_beables(bo, s);
        }
        if (phot->parsed()) {
            Session s("photodetect", g, out, err);
            return cmd_photodetect(po, s);
        }
        Session s("classical", g, out, err);
        return cmd_classical(clo, s);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kEngineError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kEngineError;
    }
}

} // namespace gralab::cli
