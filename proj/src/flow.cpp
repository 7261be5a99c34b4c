#include "nflow/flow.hpp"

#include "nflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nflow {

FlowProblem::FlowProblem(PotentialPair pair, LambdaSchedule lambda, Vector x0, Vector v0, double horizon)
    : pair_(std::move(pair)), lambda_(std::move(lambda)), x0_(std::move(x0)), v0_(std::move(v0)),
      horizon_(horizon), c0_(0.0) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ArgumentError("flow problem: T must be positive");
    if (x0_.size() != pair_.dimension() || v0_.size() != pair_.dimension())
        throw ArgumentError("flow problem: x0 and v0 must match the potentials' dimension");
    if (!x0_.allFinite() || !v0_.allFinite()) throw ArgumentError("flow problem: x0 and v0 must be finite");
    c0_ = lambda_.c0(horizon_);
    if (!(c0_ > 0.0)) {
        std::ostringstream os;
        os << "flow problem: lambda must stay above a positive c0 on [0,T]; got lower bound " << c0_;
        throw ArgumentError(os.str());
    }
    const double r = inclusion_residual(pair_.phi(), 1.0, x0_, v0_);
    if (!(r <= default_inclusion_tolerance(x0_))) {
        std::ostringstream os;
        os << "flow problem: v0 is not a subgradient of phi at x0 (inclusion residual " << r << ")";
        throw InadmissibleDataError(os.str(), r);
    }
}

Vector FlowProblem::initial_z() const { return x0_ + v0_ / lambda_.value(0.0); }

std::vector<double> Trajectory::times() const {
    std::vector<double> ts;
    ts.reserve(samples_.size());
    for (const auto& s : samples_) ts.push_back(s.t);
    return ts;
}

double Trajectory::max_residual() const {
    double m = 0.0;
    for (const auto& s : samples_) m = std::max(m, s.residual);
    return m;
}

FlowState Trajectory::interpolate(double t) const {
    if (samples_.empty()) throw ArgumentError("interpolate: empty trajectory");
    const double tol = 1e-12 * std::max(1.0, std::abs(samples_.back().t));
    if (t < samples_.front().t - tol || t > samples_.back().t + tol)
        throw ArgumentError("interpolate: time outside trajectory range");
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                               [](const TrajectorySample& s, double x) { return s.t < x; });
    if (it == samples_.end()) return samples_.back();
    if (it == samples_.begin() || std::abs(it->t - t) <= tol) return *it;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    FlowState s;
    s.t = t;
    s.z = (1 - w) * a.z + w * b.z;
    s.x = (1 - w) * a.x + w * b.x;
    s.v = (1 - w) * a.v + w * b.v;
    s.mu = (1 - w) * a.mu + w * b.mu;
    return s;
}

std::vector<double> output_grid(double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0)) throw ArgumentError("output grid: T and dt must be positive");
    std::vector<double> ts{0.0};
    for (long k = 1;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t >= horizon * (1.0 - 1e-12)) break;
        ts.push_back(t);
    }
    ts.push_back(horizon);
    return ts;
}

FlowState recover_state(const FlowProblem& problem, double t, const Vector& z, Side side) {
    const auto [mu, mu_dot] = mu_of(problem.lambda(), t, problem.horizon(), side);
    (void)mu_dot;
    FlowState s;
    s.t = t;
    s.z = z;
    s.mu = mu;
    s.x = problem.pair().phi().prox(mu, z);
    s.v = (z - s.x) / mu;
    return s;
}

Vector z_rhs(const FlowProblem& problem, double t, const Vector& z, Side side) {
    const auto [mu, mu_dot] = mu_of(problem.lambda(), t, problem.horizon(), side);
    const Vector x = problem.pair().phi().prox(mu, z);
    const Vector yosida = (z - x) / mu;
    return -(mu - mu_dot) * yosida - mu * problem.pair().psi().grad(x);
}

namespace {

TrajectorySample make_sample(const FlowProblem& problem, double t, const Vector& z) {
    TrajectorySample s;
    static_cast<FlowState&>(s) = recover_state(problem, t, z);
    s.lambda = problem.lambda().value(t);
    s.objective = problem.pair().objective(s.x);
    s.residual = inclusion_residual(problem.pair().phi(), 1.0, s.x, s.v);
    return s;
}

} // namespace

Trajectory integrate(const FlowProblem& problem, const IntegratorConfig& cfg) {
    cfg.validate();
    const double T = problem.horizon();
    auto grid = output_grid(T, cfg.dense_output_dt);

    std::vector<TrajectorySample> samples;
    samples.reserve(grid.size());
    const Vector z0 = problem.initial_z();
    samples.push_back(make_sample(problem, 0.0, z0));
    grid.erase(grid.begin());

    OdeRhs rhs = [&problem](double t, Side side, const Vector& z, Vector& dz) {
        dz = z_rhs(problem, t, z, side);
    };
    OdeObserver observe = [&](double t, const Vector& z) { samples.push_back(make_sample(problem, t, z)); };

    IntegratorStats stats;
    try {
        stats = dormand_prince(rhs, 0.0, z0, grid, problem.lambda().breakpoints(T), cfg, observe);
    } catch (const OdeFailure& e) {
        Trajectory partial(std::move(samples), e.stats());
        if (e.kind() == OdeFailure::Kind::StepUnderflow) throw StiffnessError(e.what(), std::move(partial));
        throw IntegrationError(e.what(), std::move(partial));
    }
    return Trajectory(std::move(samples), stats);
}

} // namespace nflow
