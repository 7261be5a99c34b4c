#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nflow {

/// Which one-sided derivative to report at a point where the derivative jumps.
enum class Side { Right, Left };

/// Model behind a LambdaSchedule. Implementations are immutable.
class ScheduleModel {
public:
    virtual ~ScheduleModel() = default;

    virtual double value(double t) const = 0;
    virtual double derivative(double t, Side side) const = 0;
    /// Points in (0, T) where the derivative may be discontinuous or change
    /// character sharply; integrators stop exactly on them.
    virtual std::vector<double> breakpoints(double horizon) const { (void)horizon; return {}; }
    /// Certified bounds of the schedule on [0, T].
    virtual double min_on(double horizon) const = 0;
    virtual double max_on(double horizon) const = 0;
    /// Integral of |derivative| over [0, T].
    virtual double l1_derivative_norm(double horizon) const = 0;
    virtual std::optional<double> constant_value() const { return std::nullopt; }
    virtual std::string describe() const = 0;
};

/// Regularization coefficient t -> lambda(t), absolutely continuous and
/// bounded below by a positive constant on the horizon of interest.
class LambdaSchedule {
public:
    explicit LambdaSchedule(std::shared_ptr<const ScheduleModel> model);

    static LambdaSchedule constant(double c);
    /// b exp(-a t) + c
    static LambdaSchedule exponential_decay(double a, double b, double c);
    /// 1 / (1 + t) + c
    static LambdaSchedule rational(double c);
    /// Linear interpolation through (t_i, value_i); the first knot must be at
    /// t = 0 and the schedule is held constant after the last knot.
    static LambdaSchedule piecewise_linear(std::vector<std::pair<double, double>> knots);

    double value(double t) const { return model_->value(t); }
    double derivative(double t, Side side = Side::Right) const { return model_->derivative(t, side); }
    std::vector<double> breakpoints(double horizon) const { return model_->breakpoints(horizon); }
    /// c0: positive lower bound on [0, T].
    double c0(double horizon) const { return model_->min_on(horizon); }
    double max_on(double horizon) const { return model_->max_on(horizon); }
    double l1_derivative_norm(double horizon) const { return model_->l1_derivative_norm(horizon); }
    std::optional<double> constant_value() const { return model_->constant_value(); }
    std::string describe() const { return model_->describe(); }

    const ScheduleModel& model() const noexcept { return *model_; }

private:
    std::shared_ptr<const ScheduleModel> model_;
};

struct MuValue {
    double mu;
    double mu_dot;
};

/// mu = 1/lambda(t) and its derivative -lambda'(t)/lambda(t)^2; t must lie in [0, T].
MuValue mu_of(const LambdaSchedule& lambda, double t, double horizon, Side side = Side::Right);

/// |lambda - eta|_{L1(0,T)}
double l1_distance(const LambdaSchedule& lambda, const LambdaSchedule& eta, double horizon);

/// |lambda' + eta'|_{L1(0,T)}
double l1_derivative_sum(const LambdaSchedule& lambda, const LambdaSchedule& eta, double horizon);

} // namespace nflow
