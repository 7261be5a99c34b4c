#pragma once

#include "nflow/bv.hpp"
#include "nflow/ode.hpp"
#include "nflow/potentials.hpp"
#include "nflow/schedule.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nflow {

enum class Mode { Solve, Certify, Stability, BV, ListPotentials, Validate };

std::string to_string(Mode mode);
/// Throws ArgumentError for unknown names.
Mode parse_mode(const std::string& name);

/// Malformed config text: bad syntax or a value of the wrong type.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
    /// 1-based line in the config text, 0 when unknown.
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// A parsed "name:key=value,..." potential descriptor.
struct Descriptor {
    std::string name;
    std::map<std::string, std::string> params;
    int line = 0;
};

/// Throws ArgumentError on malformed text.
Descriptor parse_descriptor(const std::string& text);

/// Schedule as written in a config: kind plus numeric parameters.
struct ScheduleSpec {
    std::string kind = "constant";
    double value = 1.0; ///< constant
    double a = 1.0, b = 1.0, c = 0.1;
    std::vector<std::pair<double, double>> knots; ///< piecewise_linear
    int line = 0;
};

struct StabilitySpec {
    ScheduleSpec eta;
    Vector y0, w0;
};

struct BVSpec {
    std::vector<BVPiece> pieces;
    MollifiedSequenceConfig sequence;
    double tolerance = 1e-5;
};

struct Diagnostic {
    std::string field;
    std::string message;
    int line = 0;
};

/// One experiment. Vectors given as a single number are broadcast to the
/// dimension of x0.
struct ExperimentConfig {
    std::string name;
    Mode mode = Mode::Solve;
    Descriptor phi{"zero", {}, 0};
    Descriptor psi{"zero", {}, 0};
    std::optional<double> inf_bound;
    Vector x0, v0;
    double horizon = 1.0;
    ScheduleSpec lambda;
    IntegratorConfig integrator;
    double certificate_tolerance = 1e-4;
    std::optional<StabilitySpec> stability;
    std::optional<BVSpec> bv;
    /// Directory that relative matrix paths are resolved against.
    std::filesystem::path base_dir = ".";
    /// Line of each key ("problem.T" etc.), for diagnostics.
    std::map<std::string, int> lines;
    /// Problems found while parsing that do not stop it, such as unknown keys.
    std::vector<Diagnostic> parse_diagnostics;
};

std::string to_string(const Diagnostic& d);

/// Parses YAML config text. Structural problems throw ConfigError with the
/// offending line; semantic problems are left to validate().
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full static validation; empty iff the config can be run.
std::vector<Diagnostic> validate(const ExperimentConfig& config);

/// Names known to the catalogs, for listing and suggestions.
const std::vector<std::string>& phi_catalog();
const std::vector<std::string>& psi_catalog();
const std::vector<std::string>& schedule_catalog();
/// Catalog entry closest to `name` in edit distance.
std::string nearest_name(const std::string& name, const std::vector<std::string>& catalog);

/// Builders used by the runner; they assume validate() returned no diagnostics
/// and throw ArgumentError otherwise.
PotentialPhi build_phi(const ExperimentConfig& config);
PotentialPsi build_psi(const ExperimentConfig& config);
PotentialPair build_pair(const ExperimentConfig& config);
LambdaSchedule build_schedule(const ScheduleSpec& spec);
BVSchedule build_bv_schedule(const BVSpec& spec);

/// Built-in experiment presets, by name.
const std::vector<std::string>& preset_names();
/// YAML text of a preset; throws ArgumentError naming the nearest preset.
const std::string& preset_text(const std::string& name);
ExperimentConfig load_preset(const std::string& name);

} // namespace nflow
