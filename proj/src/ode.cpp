#include "nflow/ode.hpp"

#include "nflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nflow {

void IntegratorConfig::validate() const {
    auto bad = [](const char* field, const char* why) {
        throw ArgumentError(std::string("integrator config: ") + field + " " + why);
    };
    if (!(rtol > 0.0) || !std::isfinite(rtol)) bad("rtol", "must be positive");
    if (!(atol > 0.0) || !std::isfinite(atol)) bad("atol", "must be positive");
    if (!(h0 > 0.0) || !std::isfinite(h0)) bad("h0", "must be positive");
    if (!(hmax > 0.0) || !std::isfinite(hmax)) bad("hmax", "must be positive");
    if (h0 > hmax) bad("h0", "must not exceed hmax");
    if (max_steps <= 0) bad("max_steps", "must be positive");
    if (!(dense_output_dt > 0.0) || !std::isfinite(dense_output_dt)) bad("dense_output_dt", "must be positive");
}

namespace {

// Dormand & Prince (1980) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kBeta = 0.04;
constexpr double kAlpha = 0.2 - 0.75 * kBeta;

struct Stop {
    double t;
    bool output;
    bool breakpoint;
};

std::vector<Stop> merge_stops(double t0, const std::vector<double>& outputs, const std::vector<double>& breaks) {
    std::vector<Stop> stops;
    stops.reserve(outputs.size() + breaks.size());
    for (double t : outputs) stops.push_back({t, true, false});
    for (double t : breaks) stops.push_back({t, false, true});
    std::stable_sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.t < b.t; });
    std::vector<Stop> merged;
    for (const auto& s : stops) {
        if (!(s.t > t0)) throw ArgumentError("integrator: stop times must lie after t0");
        const double tol = 1e-13 * std::max(1.0, std::abs(s.t));
        if (!merged.empty() && s.t - merged.back().t <= tol) {
            merged.back().output = merged.back().output || s.output;
            merged.back().breakpoint = merged.back().breakpoint || s.breakpoint;
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

} // namespace

IntegratorStats dormand_prince(const OdeRhs& rhs, double t0, const Vector& z0,
                               const std::vector<double>& output_times, const std::vector<double>& breakpoints,
                               const IntegratorConfig& cfg, const OdeObserver& observer) {
    cfg.validate();
    const auto stops = merge_stops(t0, output_times, breakpoints);
    IntegratorStats stats;
    if (stops.empty()) return stats;

    const Eigen::Index n = z0.size();
    Vector z = z0, znew(n), tmp(n), err(n);
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

    double t = t0;
    double h = std::min(cfg.h0, cfg.hmax);
    double err_prev = 1e-4;
    bool rejected_last = false;
    rhs(t, Side::Right, z, k1);

    std::size_t next = 0;
    while (next < stops.size()) {
        if (stats.steps >= cfg.max_steps) {
            std::ostringstream os;
            os << "integrator: max_steps=" << cfg.max_steps << " exceeded at t=" << t;
            throw OdeFailure(OdeFailure::Kind::MaxSteps, t, stats, os.str());
        }
        const Stop& target = stops[next];
        double step = std::min(h, cfg.hmax);
        bool lands = false;
        if (t + step >= target.t) {
            step = target.t - t;
            lands = true;
        }
        const double tend = lands ? target.t : t + step;

        tmp = z + step * (a21 * k1);
        rhs(t + c2 * step, Side::Right, tmp, k2);
        tmp = z + step * (a31 * k1 + a32 * k2);
        rhs(t + c3 * step, Side::Right, tmp, k3);
        tmp = z + step * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * step, Side::Right, tmp, k4);
        tmp = z + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * step, Side::Right, tmp, k5);
        tmp = z + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(tend, Side::Left, tmp, k6);
        znew = z + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(tend, Side::Left, znew, k7);
        err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double enorm = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = cfg.atol + cfg.rtol * std::max(std::abs(z(i)), std::abs(znew(i)));
            enorm = std::max(enorm, std::abs(err(i)) / sc);
        }
        if (!std::isfinite(enorm) || !znew.allFinite()) enorm = 1e10;

        if (enorm <= 1.0) {
            ++stats.steps;
            stats.max_error_estimate = std::max(stats.max_error_estimate, enorm);
            t = tend;
            z = znew;
            double fac = enorm == 0.0 ? kFacMax
                                      : kSafety * std::pow(enorm, -kAlpha) * std::pow(err_prev, kBeta);
            fac = std::clamp(fac, kFacMin, rejected_last ? 1.0 : kFacMax);
            err_prev = std::max(enorm, 1e-4);
            const double proposal = step * fac;
            // a step shortened to hit a stop says little about the natural step size
            h = (lands && step < h) ? std::max(h, proposal) : proposal;
            rejected_last = false;
            if (lands) {
                if (target.output) observer(t, z);
                if (target.breakpoint) {
                    rhs(t, Side::Right, z, k1);
                } else {
                    k1 = k7;
                }
                ++next;
            } else {
                k1 = k7;
            }
        } else {
            ++stats.rejections;
            h = step * std::max(kFacMin, kSafety * std::pow(enorm, -0.2));
            rejected_last = true;
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                std::ostringstream os;
                os << "integrator: step size underflow at t=" << t << " (problem too stiff for explicit stepping)";
                throw OdeFailure(OdeFailure::Kind::StepUnderflow, t, stats, os.str());
            }
        }
    }
    return stats;
}

} // namespace nflow
