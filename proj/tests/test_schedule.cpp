#include "doctest.h"

#include "nflow/errors.hpp"
#include "nflow/quadrature.hpp"
#include "nflow/schedule.hpp"

#include <cmath>
#include <random>

using namespace nflow;

TEST_SUITE("schedule") {

TEST_CASE("quadrature on smooth and kinked integrands") {
    CHECK(quad::integrate([](double t) { return std::exp(t); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK(quad::integrate([](double t) { return std::sin(t); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-14));
    // |t - 1/3| integrated with its kink declared
    const double v = quad::integrate_piecewise([](double t) { return std::abs(t - 1.0 / 3.0); }, 0.0, 1.0, {1.0 / 3.0});
    CHECK(v == doctest::Approx(1.0 / 18.0 + 4.0 / 18.0).epsilon(1e-14));
    // |sin| over two periods: sign changes found by the scan
    CHECK(quad::integrate_abs([](double t) { return std::sin(t); }, 0.0, 4.0 * M_PI, {}) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(quad::integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
    const auto p = quad::partition(0.0, 1.0, {0.5, -1.0, 2.0, 0.5, 0.25});
    REQUIRE(p.size() == 4);
    CHECK(p[1] == 0.25);
    CHECK(p[2] == 0.5);
}

TEST_CASE("mu_of examples") {
    const auto one = LambdaSchedule::constant(1.0);
    for (double t : {0.0, 0.3, 2.0}) {
        const auto m = mu_of(one, t, 2.0);
        CHECK(m.mu == 1.0);
        CHECK(m.mu_dot == 0.0);
    }
    const auto m1 = mu_of(LambdaSchedule::exponential_decay(1.0, 1.0, 0.0), 0.0, 1.0);
    CHECK(m1.mu == doctest::Approx(1.0));
    CHECK(m1.mu_dot == doctest::Approx(1.0));
    const auto m2 = mu_of(LambdaSchedule::rational(0.0), 1.0, 2.0);
    CHECK(m2.mu == doctest::Approx(2.0));
    CHECK(m2.mu_dot == doctest::Approx(1.0));
    CHECK_THROWS_AS(mu_of(one, -0.1, 1.0), ArgumentError);
    CHECK_THROWS_AS(mu_of(one, 1.1, 1.0), ArgumentError);
}

TEST_CASE("invalid schedules are rejected") {
    CHECK_THROWS_AS(LambdaSchedule::constant(0.0), ArgumentError);
    CHECK_THROWS_AS(LambdaSchedule::constant(-2.0), ArgumentError);
    CHECK_THROWS_AS(LambdaSchedule::piecewise_linear({}), ArgumentError);
    CHECK_THROWS_AS(LambdaSchedule::piecewise_linear({{0.5, 1.0}}), ArgumentError);
    CHECK_THROWS_AS(LambdaSchedule::piecewise_linear({{0.0, 1.0}, {0.0, 2.0}}), ArgumentError);
}

TEST_CASE("piecewise-linear one-sided derivatives") {
    const auto l = LambdaSchedule::piecewise_linear({{0.0, 1.0}, {1.0, 3.0}, {2.0, 2.0}});
    CHECK(l.value(0.5) == doctest::Approx(2.0));
    CHECK(l.value(1.5) == doctest::Approx(2.5));
    CHECK(l.value(5.0) == doctest::Approx(2.0));
    CHECK(l.derivative(1.0, Side::Right) == doctest::Approx(-1.0));
    CHECK(l.derivative(1.0, Side::Left) == doctest::Approx(2.0));
    CHECK(l.c0(3.0) == doctest::Approx(1.0));
    CHECK(l.max_on(3.0) == doctest::Approx(3.0));
    const auto bps = l.breakpoints(3.0);
    REQUIRE(bps.size() == 2);
}

TEST_CASE("lower bounds hold on a dense grid") {
    const double T = 5.0;
    const std::vector<LambdaSchedule> ls = {
        LambdaSchedule::constant(0.7), LambdaSchedule::exponential_decay(0.8, 2.0, 0.1),
        LambdaSchedule::exponential_decay(-0.3, 0.5, 0.2), LambdaSchedule::rational(0.1),
        LambdaSchedule::piecewise_linear({{0.0, 1.0}, {1.0, 0.2}, {3.0, 2.0}, {4.0, 0.5}})};
    for (const auto& l : ls) {
        const double c0 = l.c0(T);
        REQUIRE(c0 > 0.0);
        for (int i = 0; i <= 10000; ++i) {
            const double t = T * i / 10000.0;
            REQUIRE_MESSAGE(l.value(t) >= c0 - 1e-15, l.describe());
            REQUIRE_MESSAGE(l.value(t) <= l.max_on(T) + 1e-15, l.describe());
        }
    }
}

TEST_CASE("derivative L1 norms: exact formulas agree with quadrature") {
    const double T = 5.0;
    const std::vector<LambdaSchedule> ls = {
        LambdaSchedule::constant(0.7), LambdaSchedule::exponential_decay(0.8, 2.0, 0.1),
        LambdaSchedule::exponential_decay(-0.3, -0.5, 3.0), LambdaSchedule::rational(0.1),
        LambdaSchedule::piecewise_linear({{0.0, 1.0}, {1.0, 0.2}, {3.0, 2.0}, {4.0, 0.5}})};
    for (const auto& l : ls) {
        const double q = quad::integrate_abs([&](double t) { return l.derivative(t); }, 0.0, T, l.breakpoints(T));
        CHECK_MESSAGE(std::abs(l.l1_derivative_norm(T) - q) <= 1e-8, l.describe());
    }
}

TEST_CASE("L1 distances between schedules") {
    const double T = 1.0;
    CHECK(l1_distance(LambdaSchedule::constant(1.0), LambdaSchedule::constant(2.0), T) == doctest::Approx(1.0));
    CHECK(l1_distance(LambdaSchedule::constant(1.0), LambdaSchedule::constant(1.5), 2.0) == doctest::Approx(1.0));
    // |1/(1+t) - 1/2| on [0, 3]: crossing at t = 1
    const double exact = (std::log(2.0) - 0.5) + (1.0 - (std::log(4.0) - std::log(2.0)));
    CHECK(l1_distance(LambdaSchedule::rational(0.0), LambdaSchedule::constant(0.5), 3.0) ==
          doctest::Approx(exact).epsilon(1e-10));
    // derivative sum: rational has decreasing value, exp_decay(a=1,b=1) too
    const double ds = l1_derivative_sum(LambdaSchedule::rational(0.1), LambdaSchedule::exponential_decay(1.0, 1.0, 0.1), 2.0);
    CHECK(ds == doctest::Approx((1.0 - 1.0 / 3.0) + (1.0 - std::exp(-2.0))).epsilon(1e-10));
    CHECK(l1_derivative_sum(LambdaSchedule::constant(1.0), LambdaSchedule::rational(0.1), 2.0) ==
          doctest::Approx(1.0 - 1.0 / 3.0));
}

} // TEST_SUITE
