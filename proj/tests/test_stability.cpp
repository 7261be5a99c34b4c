#include "doctest.h"

#include "nflow/errors.hpp"
#include "nflow/stability.hpp"

#include <cmath>
#include <string>

using namespace nflow;

namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

PotentialPair half_decay_pair() {
    return PotentialPair(PotentialPhi(phi_kind::Quadratic{1.0}, 1), PotentialPsi(psi_kind::Zero{}, 1));
}

PotentialPair l1_pair() {
    return PotentialPair(PotentialPhi(phi_kind::L1{1.0}, 1), PotentialPsi::centered_quadratic(1.0, scalar(2.0)));
}

PerturbationPair scalar_case(double eta) {
    return PerturbationPair(half_decay_pair(), LambdaSchedule::constant(1.0), LambdaSchedule::constant(eta),
                            scalar(1.0), scalar(1.0), scalar(1.0), scalar(1.0), 1.0);
}

const double kThetaAt1 = std::sqrt(2.0) * std::abs(std::exp(-0.5) - std::exp(-1.0 / 3.0));

} // namespace

TEST_SUITE("stability") {

TEST_CASE("theta of states") {
    FlowState a, b;
    a.x = Vector::Zero(2);
    a.v = Vector::Zero(2);
    b = a;
    CHECK(theta(a, b, 1.0) == 0.0);
    b.x(0) = 3.0;
    b.v(1) = 4.0;
    CHECK(theta(a, b, 1.0) == doctest::Approx(5.0));
    CHECK(theta(a, b, 0.5) == doctest::Approx(std::sqrt(2.25 + 16.0)));
    b.t = 0.1;
    CHECK_THROWS_AS(theta(a, b, 1.0), ArgumentError);
    b.t = 0.0;
    b.x = Vector::Zero(3);
    CHECK_THROWS_AS(theta(a, b, 1.0), ArgumentError);
}

TEST_CASE("constant C") {
    CHECK(stability_constant_C(scalar_case(2.0)) == doctest::Approx(2.0));

    // data at a minimizer with v0 = 0: every term vanishes
    const PerturbationPair rest(half_decay_pair(), LambdaSchedule::constant(1.0), LambdaSchedule::constant(2.0),
                                scalar(0.0), scalar(0.0), scalar(0.0), scalar(0.0), 1.0);
    CHECK(stability_constant_C(rest) == 0.0);

    // phi = |x|, psi = (x-2)^2/2, x0 = y0 = v0 = w0 = 1, c0 = 0.5, T = 2, by hand
    const PerturbationPair l1(l1_pair(), LambdaSchedule::constant(0.5), LambdaSchedule::constant(0.5), scalar(1.0),
                              scalar(1.0), scalar(1.0), scalar(1.0), 2.0);
    const double c0 = 0.5, T = 2.0, L = 1.0, gpsi = 1.0, gap = 1.5;
    const double C = 2.0 / c0 + (1.0 + std::sqrt(2.0 * T)) / c0 * (2.0 * gpsi) +
                     (std::sqrt(2.0) * T + std::sqrt(T)) * L / std::pow(c0, 1.5) * (2.0 * std::sqrt(gap));
    CHECK(stability_constant_C(l1) == doctest::Approx(C).epsilon(1e-12));
}

TEST_CASE("theoretical bound examples") {
    const PerturbationPair same(half_decay_pair(), LambdaSchedule::constant(1.0), LambdaSchedule::constant(1.0),
                                scalar(1.0), scalar(1.0), scalar(1.0), scalar(1.0), 1.0);
    CHECK(theoretical_bound(same) == 0.0);
    CHECK(theoretical_bound(scalar_case(2.0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(theoretical_bound(scalar_case(1.5)) == doctest::Approx(std::exp(1.0) / 2.0).epsilon(1e-15));
    const auto terms = stability_terms(scalar_case(2.0));
    CHECK(terms.C == doctest::Approx(2.0));
    CHECK(terms.l1_gap == doctest::Approx(1.0));
    CHECK(terms.derivative_term == 0.0);
    CHECK(terms.exponent == doctest::Approx(1.0));
}

TEST_CASE("bound is monotone in the L1 gap") {
    double prev = 0.0;
    for (double eta : {1.1, 1.3, 1.6, 2.5}) {
        const double b = theoretical_bound(scalar_case(eta));
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("psi = 0 reduces to the bound without psi terms") {
    // time-varying schedules so the derivative term is exercised
    const auto lam = LambdaSchedule::rational(0.5);
    const auto eta = LambdaSchedule::exponential_decay(0.7, 1.2, 0.4);
    const double T = 3.0;
    const Vector x0 = scalar(0.8), v0 = scalar(0.8), y0 = scalar(1.3), w0 = scalar(1.3);
    const PerturbationPair pp(half_decay_pair(), lam, eta, x0, v0, y0, w0, T);
    const double c0 = std::min(lam.c0(T), eta.c0(T));
    const double gap = l1_distance(lam, eta, T);
    const double dsum = l1_derivative_sum(lam, eta, T);
    const double C = (v0.norm() + w0.norm()) / c0;
    const double g0 = 0.5 * (lam.value(0) + eta.value(0));
    const double expect =
        (g0 * (x0 - y0).norm() + (v0 - w0).norm() + 0.5 * C * gap) * std::exp(dsum / (2.0 * c0) + T);
    CHECK(theoretical_bound(pp) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("closed-form theta series for lambda = 1 against eta = 2") {
    const auto rep = run_stability_experiment(scalar_case(2.0), {});
    CHECK(std::abs(rep.measured_sup - kThetaAt1) < 1e-6);
    CHECK(rep.series.values.front() == 0.0);
    CHECK(rep.series.times.back() == 1.0);
    // theta increases on [0, 1]
    for (std::size_t i = 1; i < rep.series.values.size(); ++i)
        REQUIRE(rep.series.values[i] >= rep.series.values[i - 1]);
    for (std::size_t i = 0; i < rep.series.times.size(); i += 10) {
        const double t = rep.series.times[i];
        CHECK(rep.series.values[i] ==
              doctest::Approx(std::sqrt(2.0) * std::abs(std::exp(-t / 2) - std::exp(-t / 3))).epsilon(1e-6));
    }
    CHECK(rep.pass);
    CHECK(rep.terms.bound == doctest::Approx(std::exp(1.0)));
    CHECK(rep.tightness == doctest::Approx(kThetaAt1 / std::exp(1.0)).epsilon(1e-5));
}

TEST_CASE("theta(0) is the distance of the data") {
    const PerturbationPair pp(l1_pair(), LambdaSchedule::constant(0.5), LambdaSchedule::rational(0.3), scalar(1.0),
                              scalar(1.0), scalar(-0.5), scalar(-1.0), 2.0);
    const auto rep = run_stability_experiment(pp, {});
    const double c0 = pp.c0();
    CHECK(rep.series.values.front() == doctest::Approx(std::sqrt(c0 * c0 * 1.5 * 1.5 + 4.0)));
    CHECK(rep.pass);
}

TEST_CASE("identical flows: zero gap up to numerics") {
    IntegratorConfig cfg;
    const PerturbationPair pp(l1_pair(), LambdaSchedule::rational(0.1), LambdaSchedule::rational(0.1), scalar(-1.0),
                              scalar(-1.0), scalar(-1.0), scalar(-1.0), 5.0);
    const auto rep = run_stability_experiment(pp, cfg);
    CHECK(rep.measured_sup <= 10.0 * (cfg.atol + cfg.rtol));
    CHECK(rep.terms.bound == 0.0);
    CHECK(rep.pass);
}

TEST_CASE("lambda sweep: measured gap shrinks, bound linear in eps") {
    double prev_sup = std::numeric_limits<double>::infinity();
    double slope = 0.0;
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto rep = run_stability_experiment(scalar_case(1.0 + eps), {});
        CHECK(rep.pass);
        CHECK(rep.measured_sup < prev_sup);
        prev_sup = rep.measured_sup;
        const double s = rep.terms.bound / eps;
        if (slope == 0.0) slope = s;
        CHECK(s == doctest::Approx(slope).epsilon(1e-6));
    }
}

TEST_CASE("swapping the flows changes nothing") {
    const PerturbationPair pp(l1_pair(), LambdaSchedule::rational(0.1), LambdaSchedule::constant(0.7), scalar(-1.0),
                              scalar(-1.0), scalar(2.0), scalar(1.0), 3.0);
    const auto a = run_stability_experiment(pp, {});
    const auto b = run_stability_experiment(pp.swapped(), {});
    CHECK(a.terms.bound == doctest::Approx(b.terms.bound).epsilon(1e-14));
    CHECK(a.measured_sup == doctest::Approx(b.measured_sup).epsilon(1e-12));
    CHECK(a.pass);
}

TEST_CASE("soundness across assorted perturbations") {
    const std::vector<std::pair<LambdaSchedule, LambdaSchedule>> schedules = {
        {LambdaSchedule::rational(0.1), LambdaSchedule::exponential_decay(1.0, 1.0, 0.1)},
        {LambdaSchedule::constant(0.3), LambdaSchedule::piecewise_linear({{0.0, 0.3}, {1.0, 2.0}, {2.0, 0.5}})},
        {LambdaSchedule::exponential_decay(-0.2, 0.5, 0.5), LambdaSchedule::constant(1.0)}};
    for (const auto& [lam, eta] : schedules) {
        const PerturbationPair pp(l1_pair(), lam, eta, scalar(-1.0), scalar(-1.0), scalar(0.5), scalar(1.0), 3.0);
        const auto rep = run_stability_experiment(pp, {});
        CHECK_MESSAGE(rep.pass, lam.describe() << " vs " << eta.describe());
        CHECK(rep.measured_sup <= rep.terms.bound);
    }
}

TEST_CASE("integration failure names the flow") {
    IntegratorConfig cfg;
    cfg.max_steps = 5;
    try {
        run_stability_experiment(scalar_case(2.0), cfg);
        FAIL("expected an integration error");
    } catch (const IntegrationError& e) {
        CHECK(std::string(e.what()).find("flow lambda") != std::string::npos);
    }
}

TEST_CASE("initial data converging inside the graph") {
    const FlowProblem base(half_decay_pair(), LambdaSchedule::constant(1.0), scalar(1.0), scalar(1.0), 2.0);
    std::vector<std::pair<Vector, Vector>> data;
    for (int n = 1; n <= 8; n *= 2) data.emplace_back(scalar(1.0 + 1.0 / n), scalar(1.0 + 1.0 / n));
    const auto rep = run_initial_data_experiment(base, data, {});
    REQUIRE(rep.entries.size() == 4);
    int n = 1;
    for (const auto& e : rep.entries) {
        CHECK(e.sup_gap == doctest::Approx(std::sqrt(2.0) / n).epsilon(1e-9));
        CHECK(e.sup_gap <= e.bound);
        n *= 2;
    }
    CHECK(rep.converging);

    const auto zero = run_initial_data_experiment(base, {{scalar(1.0), scalar(1.0)}}, {});
    CHECK(zero.entries.front().sup_gap == 0.0);
}

TEST_CASE("initial data off the graph are rejected before integrating") {
    const PotentialPair box(PotentialPhi(phi_kind::Box{0.0, 1.0}, 1), PotentialPsi::centered_quadratic(1.0, scalar(2.0)));
    const FlowProblem base(box, LambdaSchedule::constant(1.0), scalar(1.0), scalar(0.0), 2.0);
    try {
        run_initial_data_experiment(base, {{scalar(1.0), scalar(1.0)}, {scalar(0.5), scalar(1.0)}}, {});
        FAIL("expected rejection");
    } catch (const InadmissibleDataError& e) {
        CHECK(e.residual() == doctest::Approx(0.5));
        CHECK(std::string(e.what()).find("datum 1") != std::string::npos);
    }
}

TEST_CASE("box boundary with growing normal-cone data does not converge") {
    // x0 = 1 on the boundary of [0, 1]; every v0 >= 0 is admissible
    const PotentialPair box(PotentialPhi(phi_kind::Box{0.0, 1.0}, 1), PotentialPsi::centered_quadratic(1.0, scalar(2.0)));
    const FlowProblem base(box, LambdaSchedule::constant(1.0), scalar(1.0), scalar(0.0), 2.0);
    std::vector<std::pair<Vector, Vector>> data;
    for (int n = 1; n <= 4; ++n) data.emplace_back(scalar(1.0), scalar(static_cast<double>(n)));
    const auto rep = run_initial_data_experiment(base, data, {});
    CHECK_FALSE(rep.converging);
    for (const auto& e : rep.entries) {
        CHECK(e.residual == 0.0);
        // x is pinned at 1 and v(t) = 1 + (v0 - 1) e^{-t}: the gap is |v0n - v0| at t = 0
        CHECK(e.sup_gap == doctest::Approx(e.v0(0)).epsilon(1e-8));
        CHECK(e.sup_gap <= e.bound);
    }
}

} // TEST_SUITE
