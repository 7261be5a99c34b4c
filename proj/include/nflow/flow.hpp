#pragma once

#include "nflow/ode.hpp"
#include "nflow/potentials.hpp"
#include "nflow/schedule.hpp"

#include <stdexcept>
#include <vector>

namespace nflow {

/// Cauchy problem for lambda(t) x' + v' + v + grad psi(x) = 0, v in d phi(x),
/// x(0) = x0, v(0) = v0, posed on [0, T].
class FlowProblem {
public:
    /// Rejects T <= 0, c0 <= 0 and dimension mismatches with ArgumentError, and
    /// v0 not in d phi(x0) with InadmissibleDataError.
    FlowProblem(PotentialPair pair, LambdaSchedule lambda, Vector x0, Vector v0, double horizon);

    const PotentialPair& pair() const noexcept { return pair_; }
    const LambdaSchedule& lambda() const noexcept { return lambda_; }
    const Vector& x0() const noexcept { return x0_; }
    const Vector& v0() const noexcept { return v0_; }
    double horizon() const noexcept { return horizon_; }
    Eigen::Index dimension() const noexcept { return pair_.dimension(); }
    /// Positive lower bound of lambda on [0, T].
    double c0() const noexcept { return c0_; }

    /// z(0) = x0 + mu(0) v0
    Vector initial_z() const;

private:
    PotentialPair pair_;
    LambdaSchedule lambda_;
    Vector x0_, v0_;
    double horizon_;
    double c0_;
};

/// Point of the flow in Minty coordinates: x = prox_{mu phi}(z),
/// v = grad phi_mu(z), hence z = x + mu v.
struct FlowState {
    double t = 0.0;
    Vector z, x, v;
    double mu = 1.0;
};

struct TrajectorySample : FlowState {
    double lambda = 1.0;
    double objective = 0.0;
    /// inclusion_residual(phi, 1, x, v)
    double residual = 0.0;
};

/// Output-grid samples of a computed flow.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::vector<TrajectorySample> samples, IntegratorStats stats)
        : samples_(std::move(samples)), stats_(stats) {}

    const std::vector<TrajectorySample>& samples() const noexcept { return samples_; }
    const TrajectorySample& operator[](std::size_t i) const { return samples_[i]; }
    const TrajectorySample& front() const { return samples_.front(); }
    const TrajectorySample& back() const { return samples_.back(); }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    Eigen::Index dimension() const { return samples_.empty() ? 0 : samples_.front().x.size(); }
    const IntegratorStats& stats() const noexcept { return stats_; }

    std::vector<double> times() const;
    double max_residual() const;

    /// Linear interpolation of (x, v) at time t within the sample range.
    FlowState interpolate(double t) const;

private:
    std::vector<TrajectorySample> samples_;
    IntegratorStats stats_;
};

/// The integrator could not cover [0, T]; carries what was computed.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, Trajectory partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

/// Step size collapsed; the problem is too stiff for explicit stepping.
class StiffnessError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

/// Output grid 0, dt, 2 dt, ..., T (T always included).
std::vector<double> output_grid(double horizon, double dt);

/// (x, v, mu) recovered from z at time t.
FlowState recover_state(const FlowProblem& problem, double t, const Vector& z, Side side = Side::Right);

/// z' = -(mu - mu') grad phi_mu(z) - mu grad psi(prox_{mu phi}(z))
Vector z_rhs(const FlowProblem& problem, double t, const Vector& z, Side side = Side::Right);

/// Integrates the z-equation on [0, T] and recovers (x, v) on the output grid.
/// Throws IntegrationError (max steps) or StiffnessError (step underflow).
Trajectory integrate(const FlowProblem& problem, const IntegratorConfig& cfg);

} // namespace nflow
