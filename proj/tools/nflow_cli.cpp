#include "nflow/config.hpp"
#include "nflow/errors.hpp"
#include "nflow/runner.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Args {
    std::string config;
    std::string preset;
    std::string out;
    std::optional<double> rtol;
    std::optional<double> atol;
    bool json = false;
};

void add_common(CLI::App* sub, Args& a) {
    sub->add_option("--config", a.config, "experiment config file (YAML)");
    sub->add_option("--preset", a.preset, "built-in preset name");
    sub->add_option("--out", a.out, "output directory");
    sub->add_option("--rtol", a.rtol, "relative tolerance override");
    sub->add_option("--atol", a.atol, "absolute tolerance override");
    sub->add_flag("--json", a.json, "print the report as JSON");
}

int execute(nflow::Mode mode, const Args& a) {
    using namespace nflow;
    if (a.config.empty() == a.preset.empty()) {
        std::cerr << "error: give exactly one of --config or --preset\n";
        return kExitConfig;
    }
    ExperimentConfig cfg;
    try {
        cfg = a.config.empty() ? load_preset(a.preset) : load_config(a.config);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << (a.config.empty() ? a.preset : a.config);
        if (e.line() > 0) std::cerr << ":" << e.line();
        std::cerr << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    cfg.mode = mode;
    RunOptions opts;
    opts.out_dir = a.out;
    opts.rtol = a.rtol;
    opts.atol = a.atol;
    const RunReport rep = run(cfg, opts);
    std::cout << (a.json ? report_json(rep) : report_text(rep));
    return rep.exit_status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regularized Newton-flow integrator and estimate checker"};
    app.require_subcommand(1);

    Args args;
    const std::vector<std::pair<nflow::Mode, std::string>> modes = {
        {nflow::Mode::Solve, "integrate the flow and write its trajectory"},
        {nflow::Mode::Certify, "integrate and check the energy and Lipschitz estimates"},
        {nflow::Mode::Stability, "compare two flows against the stability bound"},
        {nflow::Mode::BV, "solve with a bounded-variation schedule by mollification"},
        {nflow::Mode::Validate, "check a config without running it"}};
    std::optional<nflow::Mode> chosen;
    for (const auto& [mode, help] : modes) {
        auto* sub = app.add_subcommand(nflow::to_string(mode), help);
        add_common(sub, args);
        sub->callback([&chosen, m = mode] { chosen = m; });
    }
    auto* list = app.add_subcommand("list-potentials", "list potentials, schedules and presets");
    list->callback([&chosen] { chosen = nflow::Mode::ListPotentials; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nflow::kExitConfig;
    }

    if (*chosen == nflow::Mode::ListPotentials) {
        std::cout << nflow::catalog_text() << "presets:\n";
        for (const auto& p : nflow::preset_names()) std::cout << "  " << p << "\n";
        return 0;
    }
    return execute(*chosen, args);
}
