#pragma once

// Command-line front end. `run` is the whole program minus process plumbing so
// tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gralab/beables.hpp"
#include "gralab/cascade.hpp"
#include "gralab/fock.hpp"
#include "gralab/photodetect.hpp"

namespace gralab::cli {

inline constexpr std::string_view kVersion = "1.0.0";

/// Exit codes: 0 success, 1 a requested check failed, 2 usage error,
/// 3 engine or I/O error.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kEngineError = 3 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "number:N", "coherent:RE" or "coherent:RE,IM", "chaotic:U".
fock::QuantumState parse_state_spec(std::string_view spec);

/// Seconds from a number, a string such as "4.7 ns", or {"value": v, "unit": u}.
double parse_duration(const nlohmann::json& value);

/// Overlays JSON keys onto the defaults. Unknown keys are a ConfigError.
cascade::CascadeConfig cascade_config_from_json(const nlohmann::json& j,
                                                cascade::CascadeConfig base = {});
nlohmann::ordered_json cascade_config_to_json(const cascade::CascadeConfig& cfg);

/// The configuration used for the f(omega) = 0.9 comparison curve.
cascade::CascadeConfig figure_sweep_config();

beables::ModePair mode_pair_from_json(const nlohmann::json& j, beables::ModePair base = {});
photodetect::DetectorAtomConfig detector_config_from_json(const nlohmann::json& j,
                                                          photodetect::DetectorAtomConfig base = {});

} // namespace gralab::cli
