#include "nflow/certificates.hpp"

#include "nflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nflow {

AprioriBounds apriori_bounds(const PotentialPair& pair, const Vector& x0, const Vector& v0, double c0,
                             double horizon) {
    if (!(c0 > 0.0) || !(horizon > 0.0)) throw ArgumentError("apriori bounds: c0 and T must be positive");
    const double e0 = pair.objective(x0);
    const double gap = e0 - pair.inf_sum_lower_bound();
    if (!(gap >= 0.0)) {
        std::ostringstream os;
        os << "(phi+psi)(x0)=" << e0 << " lies below the lower bound " << pair.inf_sum_lower_bound()
           << " on inf(phi+psi)";
        throw InconsistentBoundError(os.str());
    }
    const double T = horizon;
    const double L = pair.psi().lipschitz_grad();
    const double g0 = pair.psi().grad(x0).norm();
    const double nv0 = v0.norm();
    const double sg = std::sqrt(gap);
    const double lip_coeff = (std::sqrt(2.0) * T + std::sqrt(T)) * L;

    AprioriBounds b;
    b.energy_gap = gap;
    b.xdot_l2_squared = gap / c0;
    b.x_sup = x0.norm() + std::sqrt(T / c0) * sg;
    b.vdot_l2_squared = nv0 * nv0 + 2.0 * T * g0 * g0 + 2.0 * T * T * L * L / c0 * gap;
    b.v_sup = nv0 + std::sqrt(2.0 * T) * g0 + std::sqrt(2.0 / c0) * T * L * sg;
    b.xdot_sup = nv0 / c0 + (1.0 + std::sqrt(2.0 * T)) / c0 * g0 + lip_coeff / std::pow(c0, 1.5) * sg;
    b.vdot_sup = nv0 + (1.0 + std::sqrt(2.0 * T)) * g0 + lip_coeff / std::sqrt(c0) * sg;
    return b;
}

bool CertificateReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CertificateCheck& c) { return c.pass; });
}

const CertificateCheck& CertificateReport::check(const std::string& id) const {
    for (const auto& c : checks)
        if (c.id == id) return c;
    throw ArgumentError("certificate report: no check named " + id);
}

TrajectoryDerivatives finite_differences(const Trajectory& trajectory) {
    const auto& s = trajectory.samples();
    const std::size_t n = s.size();
    if (n < 2) throw ArgumentError("finite differences: need at least two samples");
    TrajectoryDerivatives d;
    d.xdot.resize(n);
    d.vdot.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        const double dt = s[hi].t - s[lo].t;
        d.xdot[i] = (s[hi].x - s[lo].x) / dt;
        d.vdot[i] = (s[hi].v - s[lo].v) / dt;
    }
    return d;
}

namespace {

double trapezoid_sq(const std::vector<TrajectorySample>& s, const std::vector<Vector>& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        acc += 0.5 * (s[i + 1].t - s[i].t) * (f[i].squaredNorm() + f[i + 1].squaredNorm());
    return acc;
}

} // namespace

CertificateReport certify_energy(const Trajectory& trajectory, const FlowProblem& problem,
                                 const CertificateOptions& options) {
    const auto& s = trajectory.samples();
    if (s.size() < 2) throw ArgumentError("certify: trajectory has fewer than two samples");
    if (trajectory.dimension() != problem.dimension())
        throw ArgumentError("certify: trajectory and problem dimensions differ");
    const double tscale = std::max(1.0, problem.horizon());
    if (std::abs(s.front().t) > 1e-12 || std::abs(s.back().t - problem.horizon()) > 1e-9 * tscale)
        throw ArgumentError("certify: trajectory does not span the problem horizon");
    if ((s.front().x - problem.x0()).norm() > 1e-9 * (1.0 + problem.x0().norm()) ||
        (s.front().v - problem.v0()).norm() > 1e-9 * (1.0 + problem.v0().norm()))
        throw ArgumentError("certify: trajectory does not start at the problem's Cauchy data");

    const auto& pair = problem.pair();
    const auto bounds = apriori_bounds(pair, problem.x0(), problem.v0(), problem.c0(), problem.horizon());
    const auto d = finite_differences(trajectory);

    double x_sup = 0, v_sup = 0, xdot_sup = 0, vdot_sup = 0;
    double worst_monotonicity = -std::numeric_limits<double>::infinity();
    double worst_pointwise = -std::numeric_limits<double>::infinity();
    double worst_ascent = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        x_sup = std::max(x_sup, s[i].x.norm());
        v_sup = std::max(v_sup, s[i].v.norm());
        xdot_sup = std::max(xdot_sup, d.xdot[i].norm());
        vdot_sup = std::max(vdot_sup, d.vdot[i].norm());
        if (i > 0 && i + 1 < s.size()) worst_monotonicity = std::max(worst_monotonicity, -d.xdot[i].dot(d.vdot[i]));
        const double drive = (s[i].v + pair.psi().grad(s[i].x)).norm();
        worst_pointwise = std::max(worst_pointwise, d.vdot[i].norm() - drive);
        if (i + 1 < s.size()) worst_ascent = std::max(worst_ascent, s[i + 1].objective - s[i].objective);
    }
    if (s.size() < 3) worst_monotonicity = 0.0;

    CertificateReport report;
    report.scale = std::max(x_sup, v_sup);
    report.tolerance = options.relative_tolerance * (1.0 + report.scale);
    auto add = [&](std::string id, std::string description, double measured, double bound) {
        report.checks.push_back({std::move(id), std::move(description), measured, bound,
                                 measured <= bound + report.tolerance});
    };
    add("prop2.1a", "int |x'|^2 <= ((phi+psi)(x0) - inf) / c0", trapezoid_sq(s, d.xdot), bounds.xdot_l2_squared);
    add("prop2.1b", "sup |x| <= |x0| + sqrt(T/c0) sqrt(energy gap)", x_sup, bounds.x_sup);
    add("prop2.2a", "int |v'|^2 <= |v0|^2 + 2T|grad psi(x0)|^2 + 2T^2 L^2 gap / c0", trapezoid_sq(s, d.vdot),
        bounds.vdot_l2_squared);
    add("prop2.2b", "sup |v| <= |v0| + sqrt(2T)|grad psi(x0)| + sqrt(2/c0) T L sqrt(gap)", v_sup, bounds.v_sup);
    add("prop2.3a", "sup |x'| <= Lipschitz bound on x", xdot_sup, bounds.xdot_sup);
    add("prop2.3b", "sup |v'| <= Lipschitz bound on v", vdot_sup, bounds.vdot_sup);
    add("eq.energy2", "monotonicity: -<x'(t), v'(t)> <= 0 at interior samples", worst_monotonicity, 0.0);
    add("prop2.3b.pointwise", "|v'(t)| - |v(t) + grad psi(x(t))| <= 0", worst_pointwise, 0.0);
    add("eq.energy6", "descent: (phi+psi)(x(t_{i+1})) - (phi+psi)(x(t_i)) <= 0", worst_ascent, 0.0);
    return report;
}

} // namespace nflow
