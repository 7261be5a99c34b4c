#include "nflow/bv.hpp"

#include "nflow/errors.hpp"
#include "nflow/quadrature.hpp"
#include "nflow/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nflow {

// ---------------------------------------------------------------------------
// BVSchedule

BVSchedule::BVSchedule(std::vector<BVPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw ArgumentError("bv schedule: needs at least one piece");
    if (pieces_.front().from != 0.0) throw ArgumentError("bv schedule: first piece must start at t=0");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        std::ostringstream where;
        where << "bv schedule piece " << i << ": ";
        if (!std::isfinite(p.from) || !std::isfinite(p.to) || !(p.from < p.to))
            throw ArgumentError(where.str() + "requires finite from < to");
        if (!std::isfinite(p.left_value) || !std::isfinite(p.right_value) || !(p.left_value > 0.0) ||
            !(p.right_value > 0.0))
            throw ArgumentError(where.str() + "values must be finite and positive");
        if (p.shape == BVPiece::Shape::Constant && p.left_value != p.right_value)
            throw ArgumentError(where.str() + "constant piece needs left_value == right_value");
        if (i > 0 && std::abs(p.from - pieces_[i - 1].to) > 1e-12 * std::max(1.0, std::abs(p.from)))
            throw ArgumentError(where.str() + "pieces must be contiguous");
    }
}

BVSchedule BVSchedule::step(double before, double after, double at, double horizon) {
    using S = BVPiece::Shape;
    return BVSchedule({{0.0, at, before, before, S::Constant}, {at, horizon, after, after, S::Constant}});
}

double BVSchedule::value(double t) const {
    if (t < 0.0 || t >= horizon()) return extended_value(t);
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t, [](double x, const BVPiece& p) { return x < p.from; });
    const BVPiece& p = *(it - 1);
    if (p.shape == BVPiece::Shape::Constant) return p.left_value;
    return p.left_value + (p.right_value - p.left_value) * (t - p.from) / (p.to - p.from);
}

double BVSchedule::extended_value(double s) const {
    if (s < 0.0) return pieces_.front().left_value;
    if (s >= horizon()) return pieces_.back().right_value;
    return value(s);
}

double BVSchedule::inf() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) m = std::min({m, p.left_value, p.right_value});
    return m;
}

double BVSchedule::sup() const {
    double m = 0.0;
    for (const auto& p : pieces_) m = std::max({m, p.left_value, p.right_value});
    return m;
}

double BVSchedule::total_variation() const {
    double tv = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        tv += std::abs(pieces_[i].right_value - pieces_[i].left_value);
        if (i > 0) tv += std::abs(pieces_[i].left_value - pieces_[i - 1].right_value);
    }
    return tv;
}

std::vector<double> BVSchedule::boundaries() const {
    std::vector<double> b;
    for (std::size_t i = 1; i < pieces_.size(); ++i) b.push_back(pieces_[i].from);
    return b;
}

// ---------------------------------------------------------------------------
// mollification

double MollifiedSequenceConfig::width(int n, double horizon) const {
    if (n < 0) throw ArgumentError("mollification index must be non-negative");
    if (!widths.empty()) {
        if (static_cast<std::size_t>(n) >= widths.size()) throw ArgumentError("mollification index beyond widths");
        return widths[static_cast<std::size_t>(n)];
    }
    return horizon / (8.0 * std::ldexp(1.0, n));
}

void MollifiedSequenceConfig::validate(double horizon) const {
    if (max_index < 0) throw ArgumentError("mollification: max_index must be non-negative");
    if (!widths.empty() && widths.size() < static_cast<std::size_t>(max_index) + 1)
        throw ArgumentError("mollification: fewer widths than max_index + 1");
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= max_index; ++n) {
        const double e = width(n, horizon);
        if (!(e > 0.0) || !(e < prev)) throw ArgumentError("mollification: widths must be positive and strictly decreasing");
        prev = e;
    }
}

namespace {

double bump_raw(double u) {
    const double s = 1.0 - u * u;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// Cumulative moments K0(u) = int_{-1}^u k, K1(u) = int_{-1}^u s k(s) ds of the
// normalized bump k, tabulated on a uniform grid and completed by a 15-point
// Kronrod rule on the last partial cell.
class KernelMoments {
public:
    static const KernelMoments& get() {
        static const KernelMoments m;
        return m;
    }

    double density(double u) const { return bump_raw(u) / mass_; }

    void moments(double u, double& k0, double& k1) const {
        if (u <= -1.0) {
            k0 = k1 = 0.0;
            return;
        }
        if (u >= 1.0) {
            k0 = 1.0;
            k1 = 0.0;
            return;
        }
        const auto i = std::min(static_cast<std::size_t>((u + 1.0) / h_), kCells - 1);
        const double a = -1.0 + static_cast<double>(i) * h_;
        k0 = k0_[i] + quad::integrate([](double s) { return bump_raw(s); }, a, u) / mass_;
        k1 = k1_[i] + quad::integrate([](double s) { return s * bump_raw(s); }, a, u) / mass_;
    }

private:
    static constexpr std::size_t kCells = 512;

    KernelMoments() : h_(2.0 / kCells), k0_(kCells + 1, 0.0), k1_(kCells + 1, 0.0) {
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < kCells; ++i) {
            const double a = -1.0 + static_cast<double>(i) * h_;
            m0 += quad::integrate([](double s) { return bump_raw(s); }, a, a + h_);
            m1 += quad::integrate([](double s) { return s * bump_raw(s); }, a, a + h_);
            k0_[i + 1] = m0;
            k1_[i + 1] = m1;
        }
        mass_ = m0;
        for (std::size_t i = 0; i <= kCells; ++i) {
            k0_[i] /= mass_;
            k1_[i] /= mass_;
        }
    }

    double h_;
    double mass_ = 1.0;
    std::vector<double> k0_, k1_;
};

class MollifiedModel final : public ScheduleModel {
public:
    MollifiedModel(BVSchedule bv, double eps) : bv_(std::move(bv)), eps_(eps) {
        kinks_ = bv_.boundaries();
        kinks_.push_back(0.0);
        kinks_.push_back(bv_.horizon());
        std::sort(kinks_.begin(), kinks_.end());
        const double tv = bv_.total_variation();
        if (tv == 0.0) constant_ = bv_.value(0.0);
    }

    double value(double t) const override {
        if (constant_) return *constant_;
        return convolve(t, false);
    }

    double derivative(double t, Side) const override {
        if (constant_) return 0.0;
        return convolve(t, true);
    }

    std::vector<double> breakpoints(double T) const override {
        if (constant_) return {};
        std::vector<double> out;
        for (double s : kinks_) {
            for (double p : {s - eps_, s, s + eps_})
                if (p > 0.0 && p < T) out.push_back(p);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    double min_on(double) const override { return constant_ ? *constant_ : bv_.inf(); }
    double max_on(double) const override { return constant_ ? *constant_ : bv_.sup(); }

    double l1_derivative_norm(double T) const override {
        if (constant_) return 0.0;
        return quad::integrate_abs([this](double t) { return derivative(t, Side::Right); }, 0.0, T, breakpoints(T));
    }

    std::optional<double> constant_value() const override { return constant_; }

    std::string describe() const override {
        std::ostringstream os;
        os << "mollified(eps=" << eps_ << ")";
        return os.str();
    }

private:
    // lambda_eps(t) = int lambda_ext(t - eps u) k(u) du. On each affine segment
    // alpha + beta s of the extended schedule this is a combination of K0 and K1
    // over the u-range mapping into the segment. The derivative is the same
    // convolution of the slopes plus one kernel term per jump.
    double convolve(double t, bool derivative) const {
        const auto& km = KernelMoments::get();
        const auto& ps = bv_.pieces();
        const double inf = std::numeric_limits<double>::infinity();
        double total = 0.0;
        auto segment = [&](double sa, double sb, double alpha, double beta) {
            const double ul = std::max(-1.0, (t - sb) / eps_);
            const double uh = std::min(1.0, (t - sa) / eps_);
            if (!(uh > ul)) return;
            double a0, a1, b0, b1;
            km.moments(ul, a0, a1);
            km.moments(uh, b0, b1);
            if (derivative)
                total += beta * (b0 - a0);
            else
                total += (alpha + beta * t) * (b0 - a0) - beta * eps_ * (b1 - a1);
        };
        segment(-inf, 0.0, ps.front().left_value, 0.0);
        for (const auto& p : ps) {
            const double beta = (p.right_value - p.left_value) / (p.to - p.from);
            segment(p.from, p.to, p.left_value - beta * p.from, beta);
        }
        segment(ps.back().to, inf, ps.back().right_value, 0.0);
        if (!derivative) return total;
        for (std::size_t i = 1; i < ps.size(); ++i) {
            const double jump = ps[i].left_value - ps[i - 1].right_value;
            if (jump != 0.0) total += jump * km.density((t - ps[i].from) / eps_) / eps_;
        }
        return total;
    }

    BVSchedule bv_;
    double eps_;
    std::vector<double> kinks_;
    std::optional<double> constant_;
};

} // namespace

LambdaSchedule mollify(const BVSchedule& schedule, double eps) {
    if (!(eps > 0.0)) throw ArgumentError("mollify: width must be positive");
    if (!(eps < 0.5 * schedule.horizon())) throw ArgumentError("mollify: width must be below T/2");
    return LambdaSchedule(std::make_shared<MollifiedModel>(schedule, eps));
}

LambdaSchedule mollify(const BVSchedule& schedule, int n, const MollifiedSequenceConfig& cfg) {
    return mollify(schedule, cfg.width(n, schedule.horizon()));
}

double l1_gap(const BVSchedule& schedule, const LambdaSchedule& mollified) {
    const double T = schedule.horizon();
    auto bps = mollified.breakpoints(T);
    const auto b = schedule.boundaries();
    bps.insert(bps.end(), b.begin(), b.end());
    return quad::integrate_abs([&](double t) { return mollified.value(t) - schedule.value(t); }, 0.0, T,
                               std::move(bps));
}

std::vector<CertificateCheck> check_mollification(const BVSchedule& schedule, const MollifiedSequenceConfig& cfg,
                                                  int grid_points) {
    const double T = schedule.horizon();
    cfg.validate(T);
    if (grid_points < 1) throw ArgumentError("check_mollification: grid_points must be positive");
    const double lo = schedule.inf();
    const double hi = schedule.sup();
    const double tv = schedule.total_variation();

    double range_violation = -std::numeric_limits<double>::infinity();
    double tv_excess = -std::numeric_limits<double>::infinity();
    double gap_increase = -std::numeric_limits<double>::infinity();
    double first_gap = 0.0, prev_gap = 0.0;
    for (int n = 0; n <= cfg.max_index; ++n) {
        const auto ln = mollify(schedule, n, cfg);
        for (int i = 0; i <= grid_points; ++i) {
            const double t = T * static_cast<double>(i) / grid_points;
            const double v = ln.value(t);
            range_violation = std::max({range_violation, lo - v, v - hi});
        }
        tv_excess = std::max(tv_excess, ln.l1_derivative_norm(T) - tv);
        const double gap = l1_gap(schedule, ln);
        if (n == 0) {
            first_gap = gap;
        } else {
            gap_increase = std::max(gap_increase, gap - prev_gap);
        }
        prev_gap = gap;
    }
    if (cfg.max_index == 0) gap_increase = 0.0;

    std::vector<CertificateCheck> out;
    out.push_back({"lem4.1i", "range: inf lambda <= lambda_n <= sup lambda on the grid (worst violation)",
                   range_violation, 0.0, range_violation <= 1e-12});
    out.push_back({"lem4.1ii", "L1 convergence: |lambda_n - lambda|_L1 non-increasing in n (largest increase)",
                   gap_increase, 0.0, gap_increase <= 0.0 && (cfg.max_index == 0 || prev_gap < first_gap)});
    out.push_back({"lem4.1iii", "variation: int |lambda_n'| - TV(lambda) <= 0 (largest excess)", tv_excess, 0.0,
                   tv_excess <= 1e-8});
    return out;
}

// ---------------------------------------------------------------------------
// bv_solve

bool BVSolution::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CertificateCheck& c) { return c.pass; });
}

namespace {
constexpr double kCauchyBudget = 1e-4;
}

BVSolution bv_solve(const PotentialPair& pair, const BVSchedule& schedule, const Vector& x0, const Vector& v0,
                    const IntegratorConfig& cfg, const MollifiedSequenceConfig& seq_cfg,
                    const BVSolveOptions& options) {
    const double T = schedule.horizon();
    seq_cfg.validate(T);
    if (!(options.tolerance > 0.0)) throw ArgumentError("bv solve: tolerance must be positive");

    const double c0 = schedule.inf();
    const double tv = schedule.total_variation();
    const double L = pair.psi().lipschitz_grad();
    const auto bounds = apriori_bounds(pair, x0, v0, c0, T);

    BVSolution sol{Trajectory{}, LambdaSchedule::constant(1.0), {}, 0.0, c0, v0.norm() == 0.0, {}};
    sol.cauchy_factor = bounds.xdot_sup * std::exp(tv / c0 + T * (1.0 + L / c0));

    std::optional<LambdaSchedule> prev_schedule;
    Trajectory prev;
    bool converged = false;
    for (int n = 0; n <= seq_cfg.max_index; ++n) {
        const LambdaSchedule ln = mollify(schedule, n, seq_cfg);
        const FlowProblem problem(pair, ln, x0, v0, T);
        Trajectory traj = integrate(problem, cfg);

        BVLevel level;
        level.n = n;
        level.eps = seq_cfg.width(n, T);
        level.l1_gap = l1_gap(schedule, ln);
        level.tv = ln.l1_derivative_norm(T);
        if (prev_schedule) {
            level.l1_gap_to_prev = l1_distance(ln, *prev_schedule, T);
            level.sup_gap_to_prev = theta_series(prev, traj, c0).sup;
            level.cauchy_bound = sol.cauchy_factor * level.l1_gap_to_prev;
        } else {
            level.sup_gap_to_prev = std::numeric_limits<double>::quiet_NaN();
        }
        sol.levels.push_back(level);
        prev_schedule = ln;
        prev = std::move(traj);
        if (n > 0 && level.sup_gap_to_prev < options.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "bv solve: consecutive solutions still differ by " << sol.levels.back().sup_gap_to_prev
           << " after " << seq_cfg.max_index + 1 << " mollification levels (target " << options.tolerance << ")";
        throw NonConvergenceError(os.str(), sol.levels);
    }

    sol.trajectory = std::move(prev);
    sol.final_schedule = *prev_schedule;

    double cauchy_excess = -std::numeric_limits<double>::infinity();
    for (const auto& l : sol.levels)
        if (l.n > 0) cauchy_excess = std::max(cauchy_excess, l.sup_gap_to_prev - l.cauchy_bound);
    sol.checks.push_back({"thm4.3", "Cauchy estimate: sup gap - C exp(TV/c0 + T(1+L/c0)) |lambda_n - lambda_m|_L1",
                          cauchy_excess, 0.0, cauchy_excess <= kCauchyBudget});
    const double res = sol.trajectory.max_residual();
    sol.checks.push_back({"thm4.3.limit", "limit stays on the graph of d phi (max inclusion residual)", res,
                          options.tolerance, res <= options.tolerance});
    return sol;
}

} // namespace nflow
