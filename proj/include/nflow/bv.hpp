#pragma once

#include "nflow/certificates.hpp"
#include "nflow/flow.hpp"
#include "nflow/schedule.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace nflow {

/// One piece of a bounded-variation schedule on [from, to).
struct BVPiece {
    enum class Shape { Affine, Constant };
    double from = 0.0;
    double to = 0.0;
    double left_value = 1.0;
    double right_value = 1.0;
    Shape shape = Shape::Affine;
};

/// Piecewise-affine schedule with jumps, right-continuous at every breakpoint
/// and left-continuous at T. Adjacent pieces with mismatched values encode a
/// jump.
class BVSchedule {
public:
    /// Pieces must tile [0, T] in order; values must be finite and positive.
    explicit BVSchedule(std::vector<BVPiece> pieces);

    /// lambda = before on [0, at), after on [at, T]
    static BVSchedule step(double before, double after, double at, double horizon);

    const std::vector<BVPiece>& pieces() const noexcept { return pieces_; }
    double horizon() const noexcept { return pieces_.back().to; }

    double value(double t) const;
    /// lambda extended by constants outside [0, T].
    double extended_value(double s) const;

    double inf() const;
    double sup() const;
    /// Sum of per-piece variations plus jump magnitudes.
    double total_variation() const;
    /// Interior piece boundaries (jump or kink locations).
    std::vector<double> boundaries() const;

private:
    std::vector<BVPiece> pieces_;
};

struct MollifiedSequenceConfig {
    /// Kernel half-widths eps_n; when empty eps_n = T / (8 * 2^n).
    std::vector<double> widths;
    /// Largest mollification index N.
    int max_index = 12;
    // constant extension of lambda outside [0, T] is the only extension rule

    double width(int n, double horizon) const;
    void validate(double horizon) const;
};

/// Convolution of the constant extension of `schedule` with a smooth bump of
/// half-width eps. Value and derivative are evaluated by quadrature of the
/// kernel (and its derivative) against the piecewise-affine schedule.
LambdaSchedule mollify(const BVSchedule& schedule, double eps);
LambdaSchedule mollify(const BVSchedule& schedule, int n, const MollifiedSequenceConfig& cfg);

/// |lambda_n - lambda|_{L1(0,T)}
double l1_gap(const BVSchedule& schedule, const LambdaSchedule& mollified);

/// Range, L1 convergence and variation checks on lambda_0..lambda_N:
/// "lem4.1i", "lem4.1ii", "lem4.1iii".
std::vector<CertificateCheck> check_mollification(const BVSchedule& schedule, const MollifiedSequenceConfig& cfg,
                                                  int grid_points = 10'000);

struct BVLevel {
    int n = 0;
    double eps = 0.0;
    double l1_gap = 0.0;         ///< |lambda_n - lambda|_{L1}
    double tv = 0.0;             ///< int |lambda_n'|
    double l1_gap_to_prev = 0.0; ///< |lambda_n - lambda_{n-1}|_{L1}
    double sup_gap_to_prev = 0.0;
    double cauchy_bound = 0.0;
};

struct BVSolveOptions {
    /// stop once the c0-weighted sup gap between consecutive levels is below this
    double tolerance = 1e-5;
};

struct BVSolution {
    Trajectory trajectory;
    LambdaSchedule final_schedule;
    std::vector<BVLevel> levels;
    /// C exp(TV/c0 + T(1 + L/c0)) with C the Lipschitz bound on x
    double cauchy_factor = 0.0;
    double c0 = 0.0;
    /// Existence is stated for v0 != 0; solving proceeds but this flags it.
    bool v0_is_zero = false;
    std::vector<CertificateCheck> checks;
    bool passed() const;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, std::vector<BVLevel> levels)
        : std::runtime_error(what), levels_(std::move(levels)) {}
    const std::vector<BVLevel>& levels() const noexcept { return levels_; }

private:
    std::vector<BVLevel> levels_;
};

/// Solves the flow for lambda_n = mollify(n), n = 0, 1, ..., until consecutive
/// solutions agree to `options.tolerance` in the c0-weighted sup norm, and
/// returns the last one. The checks record the Cauchy estimate for every
/// consecutive pair ("thm4.3") and the inclusion residual of the limit.
BVSolution bv_solve(const PotentialPair& pair, const BVSchedule& schedule, const Vector& x0, const Vector& v0,
                    const IntegratorConfig& cfg, const MollifiedSequenceConfig& seq_cfg = {},
                    const BVSolveOptions& options = {});

} // namespace nflow
