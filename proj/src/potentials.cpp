#include "nflow/potentials.hpp"

#include "nflow/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(const Vector& x, Eigen::Index dim, const char* what) {
    if (x.size() != dim) {
        std::ostringstream os;
        os << what << ": dimension mismatch (got " << x.size() << ", expected " << dim << ")";
        throw ArgumentError(os.str());
    }
}

void require_mu(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw ArgumentError("prox index mu must be positive and finite");
}

Vector soft_threshold(const Vector& y, double tau) {
    return y.array().sign() * (y.array().abs() - tau).max(0.0);
}

// log(1 + exp(s)) without overflow
double log1pexp(double s) {
    return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

double sigmoid(double s) {
    if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

double spectral_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

} // namespace

// ---------------------------------------------------------------------------
// phi

PotentialPhi::PotentialPhi(PhiDescriptor descriptor, Eigen::Index dimension)
    : desc_(std::move(descriptor)), dim_(dimension) {
    if (dim_ <= 0) throw ArgumentError("phi: dimension must be positive");
    std::visit(overloaded{
                   [](const phi_kind::Zero&) {},
                   [](const phi_kind::Quadratic& q) {
                       if (!(q.alpha >= 0) || !std::isfinite(q.alpha))
                           throw ArgumentError("phi quadratic: alpha must be >= 0");
                   },
                   [](const phi_kind::L1& l) {
                       if (!(l.w >= 0) || !std::isfinite(l.w))
                           throw ArgumentError("phi l1: w must be >= 0");
                   },
                   [](const phi_kind::Box& b) {
                       if (!(b.lo <= b.hi) || std::isnan(b.lo) || std::isnan(b.hi))
                           throw ArgumentError("phi box: requires lo <= hi");
                   },
                   [](const phi_kind::ElasticNet& e) {
                       if (!(e.w >= 0) || !(e.alpha >= 0) || !std::isfinite(e.w) ||
                           !std::isfinite(e.alpha))
                           throw ArgumentError("phi elastic-net: w and alpha must be >= 0");
                   },
               },
               desc_);
}

double PotentialPhi::value(const Vector& x) const {
    require_dim(x, dim_, "phi value");
    return std::visit(overloaded{
                          [](const phi_kind::Zero&) { return 0.0; },
                          [&](const phi_kind::Quadratic& q) { return 0.5 * q.alpha * x.squaredNorm(); },
                          [&](const phi_kind::L1& l) { return l.w * x.lpNorm<1>(); },
                          [&](const phi_kind::Box& b) {
                              const bool inside = (x.array() >= b.lo).all() && (x.array() <= b.hi).all();
                              return inside ? 0.0 : kInf;
                          },
                          [&](const phi_kind::ElasticNet& e) {
                              return e.w * x.lpNorm<1>() + 0.5 * e.alpha * x.squaredNorm();
                          },
                      },
                      desc_);
}

Vector PotentialPhi::prox(double mu, const Vector& y) const {
    require_mu(mu);
    require_dim(y, dim_, "phi prox");
    return std::visit(overloaded{
                          [&](const phi_kind::Zero&) -> Vector { return y; },
                          [&](const phi_kind::Quadratic& q) -> Vector { return y / (1.0 + mu * q.alpha); },
                          [&](const phi_kind::L1& l) -> Vector { return soft_threshold(y, mu * l.w); },
                          [&](const phi_kind::Box& b) -> Vector { return y.cwiseMax(b.lo).cwiseMin(b.hi); },
                          [&](const phi_kind::ElasticNet& e) -> Vector {
                              return soft_threshold(y, mu * e.w) / (1.0 + mu * e.alpha);
                          },
                      },
                      desc_);
}

Vector PotentialPhi::yosida_grad(double mu, const Vector& y) const {
    return (y - prox(mu, y)) / mu;
}

std::string PotentialPhi::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const phi_kind::Zero&) { os << "zero"; },
                   [&](const phi_kind::Quadratic& q) { os << "quadratic:alpha=" << q.alpha; },
                   [&](const phi_kind::L1& l) { os << "l1:w=" << l.w; },
                   [&](const phi_kind::Box& b) { os << "box:lo=" << b.lo << ",hi=" << b.hi; },
                   [&](const phi_kind::ElasticNet& e) { os << "enet:w=" << e.w << ",alpha=" << e.alpha; },
               },
               desc_);
    return os.str();
}

// ---------------------------------------------------------------------------
// psi

PotentialPsi::PotentialPsi(PsiDescriptor descriptor, Eigen::Index dimension)
    : desc_(std::move(descriptor)), dim_(dimension) {
    if (dim_ <= 0) throw ArgumentError("psi: dimension must be positive");
    std::visit(
        overloaded{
            [&](const psi_kind::Zero&) {
                lipschitz_ = 0.0;
                infimum_ = 0.0;
            },
            [&](const psi_kind::QuadraticForm& q) {
                if (q.Q.rows() != dim_ || q.Q.cols() != dim_ || q.b.size() != dim_)
                    throw ArgumentError("psi quadratic-form: Q must be n x n and b of length n");
                const double scale = std::max(1.0, q.Q.cwiseAbs().maxCoeff());
                if ((q.Q - q.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
                    throw ArgumentError("psi quadratic-form: Q must be symmetric");
                Eigen::SelfAdjointEigenSolver<Matrix> eig(q.Q);
                const Vector& ev = eig.eigenvalues();
                const double tol = 1e-12 * scale * static_cast<double>(dim_);
                if (ev.minCoeff() < -tol)
                    throw ArgumentError("psi quadratic-form: Q must be positive semidefinite");
                lipschitz_ = std::max(0.0, ev.maxCoeff());
                // inf = offset - 0.5 b' Q^+ b when b lies in range(Q), else -inf
                const Vector bt = eig.eigenvectors().transpose() * q.b;
                const double bscale = std::max(1.0, q.b.norm());
                double inf = q.offset;
                for (Eigen::Index i = 0; i < dim_; ++i) {
                    if (ev(i) > tol) {
                        inf -= 0.5 * bt(i) * bt(i) / ev(i);
                    } else if (std::abs(bt(i)) > 1e-12 * bscale) {
                        inf = -kInf;
                        break;
                    }
                }
                if (std::isfinite(inf)) inf -= 1e-12 * (1.0 + std::abs(inf));
                infimum_ = inf;
            },
            [&](const psi_kind::LeastSquares& l) {
                if (l.A.cols() != dim_ || l.A.rows() != l.b.size())
                    throw ArgumentError("psi least-squares: A must have n columns and b match its rows");
                const double s = spectral_norm(l.A);
                lipschitz_ = s * s;
                const Vector xs = l.A.completeOrthogonalDecomposition().solve(l.b);
                const double r = 0.5 * (l.A * xs - l.b).squaredNorm();
                infimum_ = std::max(0.0, r - 1e-12 * (1.0 + r));
            },
            [&](const psi_kind::LogisticSum& l) {
                if (l.A.cols() != dim_ || l.A.rows() != l.y.size())
                    throw ArgumentError("psi logistic: A must have n columns and y match its rows");
                const double s = spectral_norm(l.A);
                lipschitz_ = 0.25 * s * s;
                infimum_ = 0.0;
            },
        },
        desc_);
}

PotentialPsi PotentialPsi::centered_quadratic(double alpha, const Vector& center) {
    const auto n = center.size();
    return PotentialPsi(psi_kind::QuadraticForm{alpha * Matrix::Identity(n, n), alpha * center,
                                                0.5 * alpha * center.squaredNorm()},
                        n);
}

double PotentialPsi::value(const Vector& x) const {
    require_dim(x, dim_, "psi value");
    return std::visit(overloaded{
                          [](const psi_kind::Zero&) { return 0.0; },
                          [&](const psi_kind::QuadraticForm& q) {
                              return 0.5 * x.dot(q.Q * x) - q.b.dot(x) + q.offset;
                          },
                          [&](const psi_kind::LeastSquares& l) { return 0.5 * (l.A * x - l.b).squaredNorm(); },
                          [&](const psi_kind::LogisticSum& l) {
                              const Vector m = l.A * x;
                              double s = 0.0;
                              for (Eigen::Index i = 0; i < m.size(); ++i) s += log1pexp(-l.y(i) * m(i));
                              return s;
                          },
                      },
                      desc_);
}

Vector PotentialPsi::grad(const Vector& x) const {
    require_dim(x, dim_, "psi grad");
    return std::visit(overloaded{
                          [&](const psi_kind::Zero&) -> Vector { return Vector::Zero(dim_); },
                          [&](const psi_kind::QuadraticForm& q) -> Vector { return q.Q * x - q.b; },
                          [&](const psi_kind::LeastSquares& l) -> Vector {
                              return l.A.transpose() * (l.A * x - l.b);
                          },
                          [&](const psi_kind::LogisticSum& l) -> Vector {
                              const Vector m = l.A * x;
                              Vector w(m.size());
                              for (Eigen::Index i = 0; i < m.size(); ++i) w(i) = -l.y(i) * sigmoid(-l.y(i) * m(i));
                              return l.A.transpose() * w;
                          },
                      },
                      desc_);
}

std::string PotentialPsi::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const psi_kind::Zero&) { os << "zero"; },
                   [&](const psi_kind::QuadraticForm& q) { os << "qform(n=" << q.Q.rows() << ")"; },
                   [&](const psi_kind::LeastSquares& l) {
                       os << "lsq(" << l.A.rows() << "x" << l.A.cols() << ")";
                   },
                   [&](const psi_kind::LogisticSum& l) { os << "logistic(m=" << l.A.rows() << ")"; },
               },
               desc_);
    return os.str();
}

// ---------------------------------------------------------------------------

PotentialPair::PotentialPair(PotentialPhi phi, PotentialPsi psi, std::optional<double> inf_sum_lower_bound)
    : phi_(std::move(phi)), psi_(std::move(psi)) {
    if (phi_.dimension() != psi_.dimension())
        throw ArgumentError("potential pair: phi and psi dimensions differ");
    if (inf_sum_lower_bound) {
        if (!std::isfinite(*inf_sum_lower_bound))
            throw ArgumentError("potential pair: explicit lower bound must be finite");
        inf_bound_ = *inf_sum_lower_bound;
    } else {
        inf_bound_ = phi_.known_infimum() + psi_.known_infimum();
        if (!std::isfinite(inf_bound_))
            throw ArgumentError(
                "potential pair: inf(phi)+inf(psi) is unbounded; supply an explicit lower bound on inf(phi+psi)");
    }
}

double inclusion_residual(const PotentialPhi& phi, double mu, const Vector& x, const Vector& v) {
    require_dim(x, phi.dimension(), "inclusion residual x");
    require_dim(v, phi.dimension(), "inclusion residual v");
    return (x - phi.prox(mu, x + mu * v)).norm();
}

double default_inclusion_tolerance(const Vector& x) { return 1e-8 * (1.0 + x.norm()); }

} // namespace nflow
