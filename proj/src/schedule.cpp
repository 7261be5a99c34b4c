#include "nflow/schedule.hpp"

#include "nflow/errors.hpp"
#include "nflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nflow {

namespace {

class ConstantModel final : public ScheduleModel {
public:
    explicit ConstantModel(double c) : c_(c) {}
    double value(double) const override { return c_; }
    double derivative(double, Side) const override { return 0.0; }
    double min_on(double) const override { return c_; }
    double max_on(double) const override { return c_; }
    double l1_derivative_norm(double) const override { return 0.0; }
    std::optional<double> constant_value() const override { return c_; }
    std::string describe() const override {
        std::ostringstream os;
        os << "constant(c=" << c_ << ")";
        return os.str();
    }

private:
    double c_;
};

class ExpDecayModel final : public ScheduleModel {
public:
    ExpDecayModel(double a, double b, double c) : a_(a), b_(b), c_(c) {}
    double value(double t) const override { return b_ * std::exp(-a_ * t) + c_; }
    double derivative(double t, Side) const override { return -a_ * b_ * std::exp(-a_ * t); }
    // monotone in t, so extremes sit at the ends
    double min_on(double T) const override { return std::min(value(0.0), value(T)); }
    double max_on(double T) const override { return std::max(value(0.0), value(T)); }
    double l1_derivative_norm(double T) const override { return std::abs(value(T) - value(0.0)); }
    std::optional<double> constant_value() const override {
        if (a_ == 0.0 || b_ == 0.0) return value(0.0);
        return std::nullopt;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "exponential-decay(a=" << a_ << ",b=" << b_ << ",c=" << c_ << ")";
        return os.str();
    }

private:
    double a_, b_, c_;
};

class RationalModel final : public ScheduleModel {
public:
    explicit RationalModel(double c) : c_(c) {}
    double value(double t) const override { return 1.0 / (1.0 + t) + c_; }
    double derivative(double t, Side) const override { return -1.0 / ((1.0 + t) * (1.0 + t)); }
    double min_on(double T) const override { return value(T); }
    double max_on(double) const override { return value(0.0); }
    double l1_derivative_norm(double T) const override { return 1.0 - 1.0 / (1.0 + T); }
    std::string describe() const override {
        std::ostringstream os;
        os << "rational(c=" << c_ << ")";
        return os.str();
    }

private:
    double c_;
};

class PiecewiseLinearModel final : public ScheduleModel {
public:
    explicit PiecewiseLinearModel(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
        if (knots_.empty()) throw ArgumentError("piecewise-linear schedule: needs at least one knot");
        if (knots_.front().first != 0.0) throw ArgumentError("piecewise-linear schedule: first knot must be at t=0");
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (!(knots_[i].first > knots_[i - 1].first))
                throw ArgumentError("piecewise-linear schedule: knot times must be strictly increasing");
        }
        for (const auto& k : knots_) {
            if (!std::isfinite(k.first) || !std::isfinite(k.second))
                throw ArgumentError("piecewise-linear schedule: knots must be finite");
        }
    }

    double value(double t) const override {
        if (t <= knots_.front().first) return knots_.front().second;
        if (t >= knots_.back().first) return knots_.back().second;
        const std::size_t i = piece(t, Side::Right);
        const auto& [t0, v0] = knots_[i];
        const auto& [t1, v1] = knots_[i + 1];
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }

    double derivative(double t, Side side) const override {
        if (knots_.size() < 2) return 0.0;
        if (side == Side::Right ? t >= knots_.back().first : t > knots_.back().first) return 0.0;
        if (side == Side::Right ? t < knots_.front().first : t <= knots_.front().first) return 0.0;
        return slope(piece(t, side));
    }

    std::vector<double> breakpoints(double T) const override {
        std::vector<double> out;
        for (const auto& k : knots_)
            if (k.first > 0.0 && k.first < T) out.push_back(k.first);
        return out;
    }

    double min_on(double T) const override {
        double m = value(T);
        for (const auto& k : knots_)
            if (k.first <= T) m = std::min(m, k.second);
        return m;
    }

    double max_on(double T) const override {
        double m = value(T);
        for (const auto& k : knots_)
            if (k.first <= T) m = std::max(m, k.second);
        return m;
    }

    double l1_derivative_norm(double T) const override {
        double s = 0.0;
        double prev = value(0.0);
        for (double b : breakpoints(T)) {
            const double cur = value(b);
            s += std::abs(cur - prev);
            prev = cur;
        }
        return s + std::abs(value(T) - prev);
    }

    std::optional<double> constant_value() const override {
        for (const auto& k : knots_)
            if (k.second != knots_.front().second) return std::nullopt;
        return knots_.front().second;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "piecewise-linear(" << knots_.size() << " knots)";
        return os.str();
    }

private:
    // index i of the piece [t_i, t_{i+1}] containing t, resolving ties at
    // knots by side
    std::size_t piece(double t, Side side) const {
        auto it = side == Side::Right
                      ? std::upper_bound(knots_.begin(), knots_.end(), t,
                                         [](double x, const auto& k) { return x < k.first; })
                      : std::lower_bound(knots_.begin(), knots_.end(), t,
                                         [](const auto& k, double x) { return k.first < x; });
        auto i = static_cast<std::size_t>(std::distance(knots_.begin(), it));
        i = i == 0 ? 0 : i - 1;
        return std::min(i, knots_.size() - 2);
    }

    double slope(std::size_t i) const {
        return (knots_[i + 1].second - knots_[i].second) / (knots_[i + 1].first - knots_[i].first);
    }

    std::vector<std::pair<double, double>> knots_;
};

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ArgumentError(std::string(what) + " must be finite");
}

} // namespace

LambdaSchedule::LambdaSchedule(std::shared_ptr<const ScheduleModel> model) : model_(std::move(model)) {
    if (!model_) throw ArgumentError("schedule model must not be null");
}

LambdaSchedule LambdaSchedule::constant(double c) {
    require_finite(c, "constant schedule value");
    if (!(c > 0.0)) throw ArgumentError("constant schedule: c must be positive");
    return LambdaSchedule(std::make_shared<ConstantModel>(c));
}

LambdaSchedule LambdaSchedule::exponential_decay(double a, double b, double c) {
    require_finite(a, "a");
    require_finite(b, "b");
    require_finite(c, "c");
    return LambdaSchedule(std::make_shared<ExpDecayModel>(a, b, c));
}

LambdaSchedule LambdaSchedule::rational(double c) {
    require_finite(c, "c");
    return LambdaSchedule(std::make_shared<RationalModel>(c));
}

LambdaSchedule LambdaSchedule::piecewise_linear(std::vector<std::pair<double, double>> knots) {
    return LambdaSchedule(std::make_shared<PiecewiseLinearModel>(std::move(knots)));
}

MuValue mu_of(const LambdaSchedule& lambda, double t, double horizon, Side side) {
    if (!(t >= 0.0 && t <= horizon)) {
        std::ostringstream os;
        os << "mu_of: t=" << t << " outside [0, " << horizon << "]";
        throw ArgumentError(os.str());
    }
    const double l = lambda.value(t);
    if (!(l > 0.0)) throw ArgumentError("mu_of: lambda(t) must be positive");
    const double dl = lambda.derivative(t, side);
    return {1.0 / l, -dl / (l * l)};
}

namespace {

std::vector<double> merged_breakpoints(const LambdaSchedule& a, const LambdaSchedule& b, double T) {
    auto pts = a.breakpoints(T);
    const auto other = b.breakpoints(T);
    pts.insert(pts.end(), other.begin(), other.end());
    return pts;
}

} // namespace

double l1_distance(const LambdaSchedule& lambda, const LambdaSchedule& eta, double horizon) {
    if (!(horizon > 0.0)) throw ArgumentError("l1_distance: horizon must be positive");
    const auto cl = lambda.constant_value();
    const auto ce = eta.constant_value();
    if (cl && ce) return std::abs(*cl - *ce) * horizon;
    return quad::integrate_abs([&](double t) { return lambda.value(t) - eta.value(t); }, 0.0, horizon,
                               merged_breakpoints(lambda, eta, horizon));
}

double l1_derivative_sum(const LambdaSchedule& lambda, const LambdaSchedule& eta, double horizon) {
    if (!(horizon > 0.0)) throw ArgumentError("l1_derivative_sum: horizon must be positive");
    if (lambda.constant_value() && eta.constant_value()) return 0.0;
    if (lambda.constant_value()) return eta.l1_derivative_norm(horizon);
    if (eta.constant_value()) return lambda.l1_derivative_norm(horizon);
    return quad::integrate_abs([&](double t) { return lambda.derivative(t) + eta.derivative(t); }, 0.0, horizon,
                               merged_breakpoints(lambda, eta, horizon));
}

} // namespace nflow
