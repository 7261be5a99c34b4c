#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>

namespace nflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Built-in nonsmooth potentials phi. Scalar parameters act coordinate-wise.
namespace phi_kind {
struct Zero {};
/// (alpha/2)|x|^2
struct Quadratic { double alpha = 1.0; };
/// w |x|_1
struct L1 { double w = 1.0; };
/// Indicator of the box [lo, hi]^n.
struct Box { double lo = 0.0; double hi = 1.0; };
/// w |x|_1 + (alpha/2)|x|^2
struct ElasticNet { double w = 1.0; double alpha = 1.0; };
} // namespace phi_kind

using PhiDescriptor = std::variant<phi_kind::Zero, phi_kind::Quadratic, phi_kind::L1,
                                   phi_kind::Box, phi_kind::ElasticNet>;

/// Convex, lower semicontinuous, proper potential from a closed catalog whose
/// proximal mapping has an exact closed form.
///
/// The catalog is closed on purpose: every instance carries a certified
/// infimum, which the a-priori bounds depend on. New kinds are added by
/// extending PhiDescriptor and the visitors in potentials.cpp.
class PotentialPhi {
public:
    PotentialPhi(PhiDescriptor descriptor, Eigen::Index dimension);

    Eigen::Index dimension() const noexcept { return dim_; }
    const PhiDescriptor& descriptor() const noexcept { return desc_; }
    /// Lower bound of phi over R^n (exact for every catalog entry).
    double known_infimum() const noexcept { return 0.0; }

    /// phi(x); +infinity outside the effective domain.
    double value(const Vector& x) const;

    /// argmin_u phi(u) + |u - y|^2 / (2 mu).
    Vector prox(double mu, const Vector& y) const;

    /// Yosida approximation (y - prox(mu, y)) / mu.
    Vector yosida_grad(double mu, const Vector& y) const;

    std::string describe() const;

private:
    PhiDescriptor desc_;
    Eigen::Index dim_;
};

namespace psi_kind {
struct Zero {};
/// 0.5 x'Qx - b'x + offset, Q symmetric positive semidefinite.
struct QuadraticForm { Matrix Q; Vector b; double offset = 0.0; };
/// 0.5 |Ax - b|^2
struct LeastSquares { Matrix A; Vector b; };
/// sum_i log(1 + exp(-y_i <a_i, x>)), rows a_i of A, labels y_i.
struct LogisticSum { Matrix A; Vector y; };
} // namespace psi_kind

using PsiDescriptor = std::variant<psi_kind::Zero, psi_kind::QuadraticForm,
                                   psi_kind::LeastSquares, psi_kind::LogisticSum>;

/// Smooth convex potential psi with globally Lipschitz gradient.
class PotentialPsi {
public:
    PotentialPsi(PsiDescriptor descriptor, Eigen::Index dimension);

    /// psi(x) = (alpha/2)|x - center|^2, the common test case.
    static PotentialPsi centered_quadratic(double alpha, const Vector& center);

    Eigen::Index dimension() const noexcept { return dim_; }
    const PsiDescriptor& descriptor() const noexcept { return desc_; }
    double lipschitz_grad() const noexcept { return lipschitz_; }
    /// Certified lower bound of psi; may be -infinity for unbounded quadratics.
    double known_infimum() const noexcept { return infimum_; }

    double value(const Vector& x) const;
    Vector grad(const Vector& x) const;

    std::string describe() const;

private:
    PsiDescriptor desc_;
    Eigen::Index dim_;
    double lipschitz_ = 0.0;
    double infimum_ = 0.0;
};

/// phi and psi on the same space together with a lower bound on inf(phi+psi).
class PotentialPair {
public:
    /// Without an explicit bound, inf(phi) + inf(psi) is used; that sum must
    /// be finite.
    PotentialPair(PotentialPhi phi, PotentialPsi psi,
                  std::optional<double> inf_sum_lower_bound = std::nullopt);

    const PotentialPhi& phi() const noexcept { return phi_; }
    const PotentialPsi& psi() const noexcept { return psi_; }
    Eigen::Index dimension() const noexcept { return phi_.dimension(); }
    double inf_sum_lower_bound() const noexcept { return inf_bound_; }

    double objective(const Vector& x) const { return phi_.value(x) + psi_.value(x); }

private:
    PotentialPhi phi_;
    PotentialPsi psi_;
    double inf_bound_;
};

/// |x - prox(mu, x + mu v)|, zero iff v is a subgradient of phi at x.
double inclusion_residual(const PotentialPhi& phi, double mu, const Vector& x, const Vector& v);

/// Default zero test for the inclusion: 1e-8 (1 + |x|).
double default_inclusion_tolerance(const Vector& x);

} // namespace nflow
