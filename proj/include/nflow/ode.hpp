#pragma once

#include "nflow/potentials.hpp"
#include "nflow/schedule.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace nflow {

/// Step-size control for the embedded Runge-Kutta integrator.
struct IntegratorConfig {
    double rtol = 1e-9;
    double atol = 1e-9;
    double h0 = 1e-3;
    double hmax = 0.05;
    long max_steps = 2'000'000;
    /// Spacing of the output grid; steps are clamped to land on it.
    double dense_output_dt = 0.01;

    /// Throws ArgumentError naming the first offending field.
    void validate() const;
};

struct IntegratorStats {
    long steps = 0;
    long rejections = 0;
    /// Largest normalized local error estimate among accepted steps (<= 1).
    double max_error_estimate = 0.0;
};

/// Right-hand side dz = f(t, z). `side` selects the one-sided value of any
/// time-dependent coefficient at points where it is discontinuous: stages at
/// the end of a step see the left limit, stages at its start the right limit.
using OdeRhs = std::function<void(double t, Side side, const Vector& z, Vector& dz)>;
using OdeObserver = std::function<void(double t, const Vector& z)>;

/// Raised when the integrator cannot reach the final stop.
class OdeFailure : public std::runtime_error {
public:
    enum class Kind { MaxSteps, StepUnderflow };
    OdeFailure(Kind kind, double t, IntegratorStats stats, const std::string& what)
        : std::runtime_error(what), kind_(kind), t_(t), stats_(stats) {}
    Kind kind() const noexcept { return kind_; }
    double time() const noexcept { return t_; }
    const IntegratorStats& stats() const noexcept { return stats_; }

private:
    Kind kind_;
    double t_;
    IntegratorStats stats_;
};

/// Dormand-Prince 5(4) with PI step-size control.
///
/// Integrates from t0 through every output time and breakpoint (both sorted,
/// all > t0); no step straddles either kind of point. The observer is called
/// with the state at each output time. Local error per step is held below
/// atol + rtol |z| componentwise.
IntegratorStats dormand_prince(const OdeRhs& rhs, double t0, const Vector& z0,
                               const std::vector<double>& output_times, const std::vector<double>& breakpoints,
                               const IntegratorConfig& cfg, const OdeObserver& observer);

} // namespace nflow
