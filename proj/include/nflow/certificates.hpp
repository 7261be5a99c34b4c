#pragma once

#include "nflow/flow.hpp"

#include <string>
#include <vector>

namespace nflow {

/// A-priori estimates for the strong solution on [0, T], all functions of the
/// Cauchy data, c0, T, L_psi and the energy gap (phi+psi)(x0) - inf(phi+psi).
struct AprioriBounds {
    double energy_gap = 0.0;
    double xdot_l2_squared = 0.0; ///< bound on int |x'|^2
    double x_sup = 0.0;           ///< bound on sup |x|
    double vdot_l2_squared = 0.0; ///< bound on int |v'|^2
    double v_sup = 0.0;           ///< bound on sup |v|
    double xdot_sup = 0.0;        ///< Lipschitz constant of x
    double vdot_sup = 0.0;        ///< Lipschitz constant of v
};

/// Throws InconsistentBoundError when (phi+psi)(x0) is below the pair's
/// lower bound on inf(phi+psi).
AprioriBounds apriori_bounds(const PotentialPair& pair, const Vector& x0, const Vector& v0, double c0,
                             double horizon);

/// One verified inequality. Every check is normalized to
/// `measured <= bound + tolerance`.
struct CertificateCheck {
    std::string id;
    std::string description;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct CertificateReport {
    std::vector<CertificateCheck> checks;
    double tolerance = 0.0;
    double scale = 0.0;

    bool passed() const;
    const CertificateCheck& check(const std::string& id) const;
};

struct CertificateOptions {
    /// tolerance = relative_tolerance * (1 + trajectory scale)
    double relative_tolerance = 1e-4;
};

/// Finite-difference derivatives of a trajectory: central in the interior,
/// one-sided at the ends.
struct TrajectoryDerivatives {
    std::vector<Vector> xdot;
    std::vector<Vector> vdot;
};
TrajectoryDerivatives finite_differences(const Trajectory& trajectory);

/// Checks the energy, sup-norm and Lipschitz estimates, the monotonicity
/// <x', v'> >= 0, the pointwise bound |v'| <= |v + grad psi(x)| and descent of
/// (phi+psi)(x(t)) along a computed trajectory of `problem`.
CertificateReport certify_energy(const Trajectory& trajectory, const FlowProblem& problem,
                                 const CertificateOptions& options = {});

} // namespace nflow
