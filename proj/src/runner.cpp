#include "nflow/runner.hpp"

#include "nflow/bv.hpp"
#include "nflow/errors.hpp"
#include "nflow/flow.hpp"
#include "nflow/io.hpp"
#include "nflow/stability.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace nflow {

double RunReport::metric(const std::string& key) const {
    for (const auto& [k, v] : metrics)
        if (k == key) return v;
    throw ArgumentError("run report has no metric '" + key + "'");
}

namespace {

// residual_i <= 10 (atol + rtol |x_i|), reported as the worst ratio of the two sides
CertificateCheck inclusion_check(const Trajectory& traj, const IntegratorConfig& ic, const std::string& flow) {
    double worst = 0.0;
    for (const auto& s : traj.samples())
        worst = std::max(worst, s.residual / (10.0 * (ic.atol + ic.rtol * s.x.norm())));
    CertificateCheck c;
    c.id = "inclusion";
    c.description = "v(t) in d phi(x(t)) at every output time of " + flow + " (residual / 10 (atol + rtol |x|))";
    c.measured = worst;
    c.bound = 1.0;
    c.pass = worst <= c.bound;
    return c;
}

class Runner {
public:
    Runner(const ExperimentConfig& cfg, const RunOptions& opts, RunReport& rep) : cfg_(cfg), opts_(opts), rep_(rep) {
        ic_ = cfg.integrator;
        if (opts.rtol) ic_.rtol = *opts.rtol;
        if (opts.atol) ic_.atol = *opts.atol;
    }

    void execute() {
        try {
            ic_.validate();
        } catch (const ArgumentError& e) {
            rep_.diagnostics.push_back({"integrator", e.what(), 0});
            rep_.exit_status = kExitConfig;
            return;
        }
        switch (cfg_.mode) {
        case Mode::Solve: solve(false); break;
        case Mode::Certify: solve(true); break;
        case Mode::Stability: stability(); break;
        case Mode::BV: bv(); break;
        default: break;
        }
    }

private:
    FlowProblem problem() const {
        return FlowProblem(build_pair(cfg_), build_schedule(cfg_.lambda), cfg_.x0, cfg_.v0, cfg_.horizon);
    }

    void add_trajectory(const std::string& flow, const Trajectory& traj, const std::string& file) {
        rep_.stats.emplace_back(flow, traj.stats());
        rep_.checks.push_back(inclusion_check(traj, ic_, flow));
        write(file, io::trajectory_csv(traj));
    }

    void write(const std::string& file, const std::string& content) {
        if (opts_.out_dir.empty()) return;
        const auto path = opts_.out_dir / file;
        io::write_atomic(path, content);
        rep_.outputs.push_back(path);
    }

    void metric(const std::string& k, double v) { rep_.metrics.emplace_back(k, v); }

    void solve(bool certify) {
        const FlowProblem p = problem();
        const Trajectory traj = integrate(p, ic_);
        add_trajectory("flow", traj, "trajectory.csv");
        metric("c0", p.c0());
        metric("x_T_norm", traj.back().x.norm());
        metric("objective_T", traj.back().objective);
        metric("max_residual", traj.max_residual());
        if (!certify) return;
        CertificateOptions co;
        co.relative_tolerance = cfg_.certificate_tolerance;
        const auto cr = certify_energy(traj, p, co);
        rep_.checks.insert(rep_.checks.end(), cr.checks.begin(), cr.checks.end());
        metric("certificate_tolerance", cr.tolerance);
        metric("trajectory_scale", cr.scale);
    }

    void stability() {
        const auto& s = *cfg_.stability;
        const PerturbationPair pp(build_pair(cfg_), build_schedule(cfg_.lambda), build_schedule(s.eta), cfg_.x0,
                                  cfg_.v0, s.y0, s.w0, cfg_.horizon);
        const auto r = run_stability_experiment(pp, ic_);
        add_trajectory("flow lambda", r.first, "trajectory_lambda.csv");
        add_trajectory("flow eta", r.second, "trajectory_eta.csv");

        CertificateCheck c;
        c.id = "thm3.1";
        c.description = "sup theta <= Gronwall stability bound (+ 10 (atol + rtol))";
        c.measured = r.measured_sup;
        c.bound = r.terms.bound;
        c.pass = r.pass;
        rep_.checks.push_back(c);

        metric("c0", pp.c0());
        metric("C", r.terms.C);
        metric("l1_gap", r.terms.l1_gap);
        metric("derivative_term", r.terms.derivative_term);
        metric("prefactor", r.terms.prefactor);
        metric("exponent", r.terms.exponent);
        metric("bound", r.terms.bound);
        metric("measured_sup", r.measured_sup);
        metric("tightness", r.tightness);
        metric("tolerance_budget", r.tolerance_budget);

        std::string csv = "t,theta,bound\n";
        for (std::size_t i = 0; i < r.series.times.size(); ++i)
            csv += io::format_double(r.series.times[i]) + "," + io::format_double(r.series.values[i]) + "," +
                   io::format_double(r.terms.bound) + "\n";
        write("theta.csv", csv);
    }

    void bv() {
        const auto& spec = *cfg_.bv;
        const BVSchedule schedule = build_bv_schedule(spec);
        const auto mollification = check_mollification(schedule, spec.sequence);
        rep_.checks.insert(rep_.checks.end(), mollification.begin(), mollification.end());

        BVSolveOptions so;
        so.tolerance = spec.tolerance;
        const auto sol = bv_solve(build_pair(cfg_), schedule, cfg_.x0, cfg_.v0, ic_, spec.sequence, so);
        if (sol.v0_is_zero) rep_.warnings.push_back("v0 = 0: existence for bounded-variation schedules is stated for v0 != 0");
        add_trajectory("flow", sol.trajectory, "trajectory.csv");
        rep_.checks.insert(rep_.checks.end(), sol.checks.begin(), sol.checks.end());

        metric("c0", sol.c0);
        metric("cauchy_factor", sol.cauchy_factor);
        metric("levels", static_cast<double>(sol.levels.size()));
        metric("total_variation", schedule.total_variation());
        metric("final_l1_gap", sol.levels.back().l1_gap);

        std::string csv = "n,eps,l1_gap,tv_n,sup_gap_to_prev,cauchy_bound\n";
        for (const auto& l : sol.levels)
            csv += std::to_string(l.n) + "," + io::format_double(l.eps) + "," + io::format_double(l.l1_gap) + "," +
                   io::format_double(l.tv) + "," + io::format_double(l.sup_gap_to_prev) + "," +
                   io::format_double(l.cauchy_bound) + "\n";
        write("levels.csv", csv);
    }

    const ExperimentConfig& cfg_;
    const RunOptions& opts_;
    RunReport& rep_;
    IntegratorConfig ic_;
};

} // namespace

RunReport run(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.mode = config.mode;
    rep.name = config.name;

    auto finish = [&]() {
        rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!options.out_dir.empty() && rep.mode != Mode::Validate && rep.mode != Mode::ListPotentials) {
            const auto path = options.out_dir / "report.json";
            rep.outputs.push_back(path);
            io::write_atomic(path, report_json(rep));
        }
        return rep;
    };

    if (config.mode == Mode::ListPotentials) return finish();
    rep.diagnostics = validate(config);
    if (!rep.diagnostics.empty()) {
        rep.exit_status = kExitConfig;
        return finish();
    }
    if (config.mode == Mode::Validate) return finish();

    try {
        Runner(config, options, rep).execute();
        if (rep.exit_status == kExitPass) {
            for (const auto& c : rep.checks)
                if (!c.pass) rep.exit_status = kExitCertificate;
        }
    } catch (const InadmissibleDataError& e) {
        rep.error = e.what();
        rep.exit_status = kExitInadmissible;
    } catch (const ArgumentError& e) {
        rep.error = e.what();
        rep.exit_status = kExitConfig;
    } catch (const InconsistentBoundError& e) {
        rep.error = e.what();
        rep.exit_status = kExitConfig;
    } catch (const IntegrationError& e) {
        rep.error = e.what();
        rep.exit_status = kExitIntegration;
        if (!options.out_dir.empty() && !e.partial().empty()) {
            const auto path = options.out_dir / "trajectory_partial.csv";
            io::write_atomic(path, io::trajectory_csv(e.partial()));
            rep.outputs.push_back(path);
        }
    } catch (const NonConvergenceError& e) {
        rep.error = e.what();
        rep.exit_status = kExitCertificate;
    }
    return finish();
}

std::string report_json(const RunReport& r) {
    using nlohmann::json;
    json j;
    j["name"] = r.name;
    j["mode"] = to_string(r.mode);
    j["exit_status"] = r.exit_status;
    j["passed"] = r.passed();
    j["wall_time"] = r.wall_time;
    if (!r.error.empty()) j["error"] = r.error;
    j["warnings"] = r.warnings;
    j["diagnostics"] = json::array();
    for (const auto& d : r.diagnostics) j["diagnostics"].push_back({{"field", d.field}, {"message", d.message}, {"line", d.line}});
    j["stats"] = json::object();
    for (const auto& [name, s] : r.stats)
        j["stats"][name] = {{"steps", s.steps}, {"rejections", s.rejections}, {"max_error_estimate", s.max_error_estimate}};
    j["checks"] = json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back(
            {{"id", c.id}, {"description", c.description}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
    j["metrics"] = json::object();
    for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
    j["outputs"] = json::array();
    for (const auto& p : r.outputs) j["outputs"].push_back(p.string());
    return j.dump(2) + "\n";
}

std::string report_text(const RunReport& r) {
    std::ostringstream os;
    os << to_string(r.mode);
    if (!r.name.empty()) os << " " << r.name;
    os << ": " << (r.passed() ? "PASS" : "FAIL") << " (exit " << r.exit_status << ")\n";
    if (!r.error.empty()) os << "  error: " << r.error << "\n";
    for (const auto& d : r.diagnostics) os << "  " << to_string(d) << "\n";
    for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
    for (const auto& c : r.checks)
        os << "  " << (c.pass ? "PASS " : "FAIL ") << c.id << "  measured " << io::format_double(c.measured)
           << "  bound " << io::format_double(c.bound) << "  " << c.description << "\n";
    for (const auto& [k, v] : r.metrics) os << "  " << k << " = " << io::format_double(v) << "\n";
    for (const auto& [name, s] : r.stats)
        os << "  " << name << ": " << s.steps << " steps, " << s.rejections << " rejected\n";
    for (const auto& p : r.outputs) os << "  wrote " << p.string() << "\n";
    return os.str();
}

std::string catalog_text() {
    return R"(phi (nonsmooth, exact prox):
  zero                      0
  quadratic:alpha=a         (a/2)|x|^2
  l1:w=w                    w |x|_1
  box:lo=l,hi=h             indicator of [l, h]^n
  enet:w=w,alpha=a          w |x|_1 + (a/2)|x|^2
psi (smooth, Lipschitz gradient):
  zero                      0
  quadratic:alpha=a,center=c (a/2)|x - c|^2
  qform:Q=<file>,b=<file>,offset=o   0.5 x'Qx - b'x + o, Q symmetric PSD
  lsq:A=<file>,b=<file>     0.5 |Ax - b|^2
  logistic:A=<file>,y=<file> sum log(1 + exp(-y_i <a_i, x>))
lambda schedules:
  <number>                  constant
  {kind: constant, value}   constant
  {kind: exp_decay, a, b, c}  b exp(-a t) + c
  {kind: rational, c}       1 / (1 + t) + c
  {kind: piecewise_linear, knots: [[t, value], ...]}
bounded-variation schedules (bv mode):
  pieces: [{from, to, left_value, right_value, shape: affine|constant}, ...]
matrix files: first line "rows cols", then row-major values
)";
}

} // namespace nflow
