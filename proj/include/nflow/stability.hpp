#pragma once

#include "nflow/flow.hpp"

#include <utility>
#include <vector>

namespace nflow {

/// Two flows sharing the potentials and horizon but differing in the
/// regularization schedule and/or the Cauchy data.
class PerturbationPair {
public:
    /// Both Cauchy data must be admissible; c0 is the smaller of the two
    /// schedules' lower bounds and must be positive.
    PerturbationPair(PotentialPair pair, LambdaSchedule lambda, LambdaSchedule eta, Vector x0, Vector v0, Vector y0,
                     Vector w0, double horizon);

    const PotentialPair& pair() const noexcept { return first_.pair(); }
    const FlowProblem& first() const noexcept { return first_; }
    const FlowProblem& second() const noexcept { return second_; }
    double horizon() const noexcept { return first_.horizon(); }
    double c0() const noexcept { return c0_; }

    PerturbationPair swapped() const;

private:
    FlowProblem first_, second_;
    double c0_;
};

/// sqrt(c0^2 |x_a - x_b|^2 + |v_a - v_b|^2); the states must share a time stamp.
double theta(const FlowState& a, const FlowState& b, double c0, double time_tolerance = 1e-9);

struct ThetaSeries {
    std::vector<double> times;
    std::vector<double> values;
    double sup = 0.0;
};

/// theta on the union of both output grids, each trajectory linearly
/// interpolated where it has no sample.
ThetaSeries theta_series(const Trajectory& a, const Trajectory& b, double c0);

/// Every ingredient of the Gronwall stability bound.
struct StabilityTerms {
    double C = 0.0;
    double l1_gap = 0.0;          ///< |lambda - eta|_{L1}
    double derivative_term = 0.0; ///< |lambda' + eta'|_{L1}
    double prefactor = 0.0;       ///< bracket multiplying the exponential
    double exponent = 0.0;
    double bound = 0.0;
};

/// C = Lip(x) + Lip(y), the sum of the a-priori Lipschitz bounds of both flows.
double stability_constant_C(const PerturbationPair& pp);

StabilityTerms stability_terms(const PerturbationPair& pp);

/// Upper bound on sup_t theta(t).
double theoretical_bound(const PerturbationPair& pp);

struct StabilityBoundReport {
    StabilityTerms terms;
    double measured_sup = 0.0;
    /// measured / bound, 0 when the bound vanishes
    double tightness = 0.0;
    /// 10 (atol + rtol) added to the bound before comparing
    double tolerance_budget = 0.0;
    bool pass = false;
    ThetaSeries series;
    Trajectory first, second;
};

/// Integrates both flows and compares sup theta with the bound. Integration
/// failures are rethrown naming the flow that failed.
StabilityBoundReport run_stability_experiment(const PerturbationPair& pp, const IntegratorConfig& cfg);

struct InitialDataEntry {
    std::size_t index = 0;
    Vector x0, v0;
    double residual = 0.0;
    double sup_gap = 0.0;
    double bound = 0.0;
};

struct InitialDataReport {
    std::vector<InitialDataEntry> entries;
    /// sup-gaps non-increasing along the sequence and the last below the first
    bool converging = false;
};

/// Solves the flow from each perturbed Cauchy datum and measures its sup theta
/// distance to the unperturbed flow. Data off the graph of d phi is rejected
/// with InadmissibleDataError before anything is integrated.
InitialDataReport run_initial_data_experiment(const FlowProblem& problem,
                                              const std::vector<std::pair<Vector, Vector>>& perturbed,
                                              const IntegratorConfig& cfg);

} // namespace nflow
