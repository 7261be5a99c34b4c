#pragma once

#include "nflow/potentials.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing {

using nflow::Matrix;
using nflow::Vector;

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 3.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

inline double random_mu(std::mt19937_64& rng) {
    // log-uniform on [1e-2, 1e2]
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    return std::pow(10.0, u(rng));
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> g;
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
    return m;
}

struct NamedPhi {
    std::string name;
    nflow::PotentialPhi phi;
};

/// One instance of every phi catalog entry in dimension n.
inline std::vector<NamedPhi> phi_instances(Eigen::Index n) {
    using namespace nflow::phi_kind;
    return {{"zero", nflow::PotentialPhi(Zero{}, n)},
            {"quadratic", nflow::PotentialPhi(Quadratic{1.7}, n)},
            {"l1", nflow::PotentialPhi(L1{0.8}, n)},
            {"box", nflow::PotentialPhi(Box{-0.5, 1.25}, n)},
            {"enet", nflow::PotentialPhi(ElasticNet{0.6, 0.9}, n)}};
}

struct NamedPsi {
    std::string name;
    nflow::PotentialPsi psi;
};

inline std::vector<NamedPsi> psi_instances(std::mt19937_64& rng, Eigen::Index n) {
    using namespace nflow::psi_kind;
    const Matrix B = random_matrix(rng, n, n);
    const Matrix Q = B.transpose() * B;
    const Vector b = Q * random_vector(rng, n); // in range(Q): bounded below
    const Matrix A = random_matrix(rng, n + 2, n);
    Vector labels(n + 2);
    for (Eigen::Index i = 0; i < labels.size(); ++i) labels(i) = (i % 2 == 0) ? 1.0 : -1.0;
    return {{"zero", nflow::PotentialPsi(Zero{}, n)},
            {"qform", nflow::PotentialPsi(QuadraticForm{Q, b, 0.3}, n)},
            {"lsq", nflow::PotentialPsi(LeastSquares{A, random_vector(rng, n + 2)}, n)},
            {"logistic", nflow::PotentialPsi(LogisticSum{A, labels}, n)},
            {"centered", nflow::PotentialPsi::centered_quadratic(2.0, random_vector(rng, n))}};
}

/// Minimizer of a convex scalar function on [lo, hi] by golden-section search.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace testing
