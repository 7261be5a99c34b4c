#pragma once

#include "nflow/certificates.hpp"
#include "nflow/config.hpp"
#include "nflow/ode.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nflow {

/// Process exit codes of the runner.
enum ExitCode : int {
    kExitPass = 0,
    kExitConfig = 2,
    kExitInadmissible = 3,
    kExitIntegration = 4,
    kExitCertificate = 5,
};

struct RunOptions {
    /// Output directory; nothing is written when empty.
    std::filesystem::path out_dir;
    std::optional<double> rtol;
    std::optional<double> atol;
};

struct RunReport {
    Mode mode = Mode::Solve;
    std::string name;
    double wall_time = 0.0; ///< seconds
    /// Integrator statistics per integrated flow, by flow name.
    std::vector<std::pair<std::string, IntegratorStats>> stats;
    std::vector<CertificateCheck> checks;
    /// Named scalar results (bounds, measured values, level counts).
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<Diagnostic> diagnostics;
    std::vector<std::string> warnings;
    /// Error message when the run stopped early.
    std::string error;
    std::vector<std::filesystem::path> outputs;
    int exit_status = kExitPass;

    bool passed() const { return exit_status == kExitPass; }
    /// Value of a metric; throws ArgumentError if absent.
    double metric(const std::string& key) const;
};

/// Runs the experiment of `config.mode` and writes its files into
/// options.out_dir: trajectory CSV(s), mode-specific tables and report.json.
RunReport run(const ExperimentConfig& config, const RunOptions& options = {});

/// JSON document of a report.
std::string report_json(const RunReport& report);
/// Human-readable summary, one line per check.
std::string report_text(const RunReport& report);

/// Potential and schedule catalogs with their parameters.
std::string catalog_text();

} // namespace nflow
