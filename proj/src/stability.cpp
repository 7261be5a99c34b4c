#include "nflow/stability.hpp"

#include "nflow/certificates.hpp"
#include "nflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nflow {

PerturbationPair::PerturbationPair(PotentialPair pair, LambdaSchedule lambda, LambdaSchedule eta, Vector x0,
                                   Vector v0, Vector y0, Vector w0, double horizon)
    : first_(pair, std::move(lambda), std::move(x0), std::move(v0), horizon),
      second_(std::move(pair), std::move(eta), std::move(y0), std::move(w0), horizon),
      c0_(std::min(first_.c0(), second_.c0())) {}

PerturbationPair PerturbationPair::swapped() const {
    return PerturbationPair(second_.pair(), second_.lambda(), first_.lambda(), second_.x0(), second_.v0(),
                            first_.x0(), first_.v0(), horizon());
}

double theta(const FlowState& a, const FlowState& b, double c0, double time_tolerance) {
    if (std::abs(a.t - b.t) > time_tolerance * std::max(1.0, std::abs(a.t)))
        throw ArgumentError("theta: states are at different times");
    if (a.x.size() != b.x.size() || a.v.size() != b.v.size()) throw ArgumentError("theta: dimension mismatch");
    if (!(c0 > 0.0)) throw ArgumentError("theta: c0 must be positive");
    return std::sqrt(c0 * c0 * (a.x - b.x).squaredNorm() + (a.v - b.v).squaredNorm());
}

ThetaSeries theta_series(const Trajectory& a, const Trajectory& b, double c0) {
    if (a.empty() || b.empty()) throw ArgumentError("theta series: empty trajectory");
    std::vector<double> ts = a.times();
    const auto tb = b.times();
    ts.insert(ts.end(), tb.begin(), tb.end());
    std::sort(ts.begin(), ts.end());
    const double end = std::min(a.back().t, b.back().t);
    std::vector<double> grid;
    for (double t : ts) {
        if (t > end * (1 + 1e-12) + 1e-15) break;
        if (grid.empty() || t - grid.back() > 1e-12 * std::max(1.0, std::abs(t))) grid.push_back(t);
    }
    ThetaSeries s;
    s.times = grid;
    s.values.reserve(grid.size());
    for (double t : grid) {
        const double th = theta(a.interpolate(t), b.interpolate(t), c0);
        s.values.push_back(th);
        s.sup = std::max(s.sup, th);
    }
    return s;
}

double stability_constant_C(const PerturbationPair& pp) {
    const auto& f = pp.first();
    const auto& g = pp.second();
    const auto bf = apriori_bounds(pp.pair(), f.x0(), f.v0(), pp.c0(), pp.horizon());
    const auto bg = apriori_bounds(pp.pair(), g.x0(), g.v0(), pp.c0(), pp.horizon());
    return bf.xdot_sup + bg.xdot_sup;
}

StabilityTerms stability_terms(const PerturbationPair& pp) {
    const auto& f = pp.first();
    const auto& g = pp.second();
    const double T = pp.horizon();
    const double c0 = pp.c0();
    const double L = pp.pair().psi().lipschitz_grad();

    StabilityTerms s;
    s.C = stability_constant_C(pp);
    s.l1_gap = l1_distance(f.lambda(), g.lambda(), T);
    s.derivative_term = l1_derivative_sum(f.lambda(), g.lambda(), T);
    const double gamma0 = 0.5 * (f.lambda().value(0.0) + g.lambda().value(0.0));
    s.prefactor = gamma0 * (f.x0() - g.x0()).norm() + (f.v0() - g.v0()).norm() + 0.5 * s.C * s.l1_gap;
    s.exponent = s.derivative_term / (2.0 * c0) + T * (1.0 + L / c0);
    s.bound = s.prefactor * std::exp(s.exponent);
    return s;
}

double theoretical_bound(const PerturbationPair& pp) { return stability_terms(pp).bound; }

namespace {

Trajectory integrate_named(const FlowProblem& p, const IntegratorConfig& cfg, const char* name) {
    try {
        return integrate(p, cfg);
    } catch (const StiffnessError& e) {
        throw StiffnessError(std::string(name) + ": " + e.what(), e.partial());
    } catch (const IntegrationError& e) {
        throw IntegrationError(std::string(name) + ": " + e.what(), e.partial());
    }
}

} // namespace

StabilityBoundReport run_stability_experiment(const PerturbationPair& pp, const IntegratorConfig& cfg) {
    StabilityBoundReport r;
    r.terms = stability_terms(pp);
    r.first = integrate_named(pp.first(), cfg, "flow lambda");
    r.second = integrate_named(pp.second(), cfg, "flow eta");
    r.series = theta_series(r.first, r.second, pp.c0());
    r.measured_sup = r.series.sup;
    r.tightness = r.terms.bound > 0.0 ? r.measured_sup / r.terms.bound : 0.0;
    r.tolerance_budget = 10.0 * (cfg.atol + cfg.rtol);
    r.pass = r.measured_sup <= r.terms.bound + r.tolerance_budget;
    return r;
}

InitialDataReport run_initial_data_experiment(const FlowProblem& problem,
                                              const std::vector<std::pair<Vector, Vector>>& perturbed,
                                              const IntegratorConfig& cfg) {
    const auto& phi = problem.pair().phi();
    InitialDataReport report;
    for (std::size_t n = 0; n < perturbed.size(); ++n) {
        const auto& [x0n, v0n] = perturbed[n];
        if (x0n.size() != problem.dimension() || v0n.size() != problem.dimension())
            throw ArgumentError("initial data experiment: perturbed data has the wrong dimension");
        const double r = inclusion_residual(phi, 1.0, x0n, v0n);
        if (!(r <= default_inclusion_tolerance(x0n))) {
            std::ostringstream os;
            os << "initial data experiment: perturbed datum " << n
               << " is off the graph of the subdifferential (inclusion residual " << r << ")";
            throw InadmissibleDataError(os.str(), r);
        }
        report.entries.push_back({n, x0n, v0n, r, 0.0, 0.0});
    }

    const Trajectory base = integrate(problem, cfg);
    for (auto& e : report.entries) {
        PerturbationPair pp(problem.pair(), problem.lambda(), problem.lambda(), problem.x0(), problem.v0(), e.x0,
                            e.v0, problem.horizon());
        const Trajectory other = integrate(pp.second(), cfg);
        e.sup_gap = theta_series(base, other, pp.c0()).sup;
        e.bound = theoretical_bound(pp);
    }

    const auto& es = report.entries;
    bool monotone = true;
    for (std::size_t i = 1; i < es.size(); ++i)
        if (es[i].sup_gap > es[i - 1].sup_gap * (1 + 1e-9) + 1e-12) monotone = false;
    report.converging = monotone && (es.size() < 2 || es.back().sup_gap < es.front().sup_gap);
    return report;
}

} // namespace nflow
