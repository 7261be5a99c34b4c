#include "doctest.h"

#include "nflow/bv.hpp"
#include "nflow/errors.hpp"

#include <cmath>

using namespace nflow;

namespace {

using Shape = BVPiece::Shape;

Vector scalar(double x) { return Vector::Constant(1, x); }

BVPiece piece(double from, double to, double left, double right, Shape shape = Shape::Affine) {
    return {from, to, left, right, shape};
}

PotentialPair half_decay_pair() {
    return PotentialPair(PotentialPhi(phi_kind::Quadratic{1.0}, 1), PotentialPsi(psi_kind::Zero{}, 1));
}

PotentialPair l1_pair() {
    return PotentialPair(PotentialPhi(phi_kind::L1{1.0}, 1), PotentialPsi::centered_quadratic(1.0, scalar(2.0)));
}

// int_0^T |f - g| by the composite midpoint rule on a fine grid
template <class F, class G>
double midpoint_l1(F f, G g, double T, int cells) {
    double s = 0.0;
    const double h = T / cells;
    for (int i = 0; i < cells; ++i) {
        const double t = (i + 0.5) * h;
        s += std::abs(f(t) - g(t));
    }
    return s * h;
}

} // namespace

TEST_SUITE("bv") {

TEST_CASE("total variation examples") {
    CHECK(BVSchedule({piece(0, 2, 1.5, 1.5, Shape::Constant)}).total_variation() == 0.0);
    CHECK(BVSchedule::step(2.0, 1.0, 1.0, 2.0).total_variation() == doctest::Approx(1.0));
    const BVSchedule three({piece(0, 1, 1, 2), piece(1, 2, 1, 2)});
    CHECK(three.total_variation() == doctest::Approx(3.0));
    CHECK(three.inf() == 1.0);
    CHECK(three.sup() == 2.0);
    CHECK(three.value(0.5) == doctest::Approx(1.5));
    CHECK(three.value(1.0) == 1.0);
    CHECK(three.value(2.0) == 2.0);
    CHECK(three.extended_value(-3.0) == 1.0);
    CHECK(three.extended_value(5.0) == 2.0);
    REQUIRE(three.boundaries().size() == 1);
}

TEST_CASE("piece validation") {
    CHECK_THROWS_AS(BVSchedule({}), ArgumentError);
    CHECK_THROWS_AS(BVSchedule({piece(0.5, 1, 1, 1)}), ArgumentError);
    CHECK_THROWS_AS(BVSchedule({piece(0, 0, 1, 1)}), ArgumentError);
    CHECK_THROWS_AS(BVSchedule({piece(0, 1, 0, 1)}), ArgumentError);
    CHECK_THROWS_AS(BVSchedule({piece(0, 1, 1, -1)}), ArgumentError);
    CHECK_THROWS_AS(BVSchedule({piece(0, 1, 1, 2, Shape::Constant)}), ArgumentError);
    CHECK_THROWS_AS(BVSchedule({piece(0, 1, 1, 1), piece(1.5, 2, 1, 1)}), ArgumentError);
    CHECK_THROWS_AS(BVSchedule({piece(0, 1, 1, std::nan(""))}), ArgumentError);
}

TEST_CASE("sequence configuration") {
    MollifiedSequenceConfig cfg;
    CHECK(cfg.width(0, 2.0) == doctest::Approx(0.25));
    CHECK(cfg.width(3, 2.0) == doctest::Approx(2.0 / 64.0));
    CHECK_THROWS_AS(cfg.width(-1, 2.0), ArgumentError);
    cfg.widths = {0.1, 0.05};
    cfg.max_index = 1;
    CHECK_NOTHROW(cfg.validate(2.0));
    cfg.max_index = 2;
    CHECK_THROWS_AS(cfg.validate(2.0), ArgumentError);
    cfg.widths = {0.1, 0.1, 0.05};
    CHECK_THROWS_AS(cfg.validate(2.0), ArgumentError);
}

TEST_CASE("mollify width limits") {
    const auto s = BVSchedule::step(2.0, 1.0, 1.0, 2.0);
    CHECK_THROWS_AS(mollify(s, 0.0), ArgumentError);
    CHECK_THROWS_AS(mollify(s, 1.0), ArgumentError);
    CHECK_THROWS_AS(mollify(s, 1.5), ArgumentError);
    CHECK_NOTHROW(mollify(s, 0.99));
}

TEST_CASE("constant schedules are left unchanged") {
    const BVSchedule c({piece(0, 1, 0.7, 0.7, Shape::Constant), piece(1, 3, 0.7, 0.7)});
    const auto m = mollify(c, 0.3);
    for (double t : {0.0, 0.1, 1.0, 2.95, 3.0}) {
        CHECK(m.value(t) == 0.7);
        CHECK(m.derivative(t) == 0.0);
    }
}

TEST_CASE("affine schedule: exact in the interior, small gap near the ends") {
    const double T = 2.0;
    const BVSchedule a({piece(0, T, 2.0, 1.0)});
    const double slope = 0.5;
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto m = mollify(a, eps);
        for (double t = eps; t <= T - eps; t += 0.01) REQUIRE(m.value(t) == doctest::Approx(a.value(t)).epsilon(1e-12));
        const double gap = l1_gap(a, m);
        CHECK(gap <= slope * eps * T);
        CHECK(gap == doctest::Approx(midpoint_l1([&](double t) { return m.value(t); },
                                                 [&](double t) { return a.value(t); }, T, 200000))
                         .epsilon(1e-4));
    }
}

TEST_CASE("step: range, variation and derivative") {
    const double T = 2.0;
    const auto s = BVSchedule::step(2.0, 1.0, 1.0, T);
    for (double eps : {0.25, 0.05, 0.004}) {
        const auto m = mollify(s, eps);
        for (int i = 0; i <= 10000; ++i) {
            const double t = T * i / 10000.0;
            REQUIRE(m.value(t) >= 1.0 - 1e-12);
            REQUIRE(m.value(t) <= 2.0 + 1e-12);
        }
        CHECK(m.l1_derivative_norm(T) <= 1.0 + 1e-8);
        CHECK(m.l1_derivative_norm(T) >= 1.0 - 1e-8);
        // the mollified step is symmetric about the jump
        CHECK(m.value(1.0) == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(m.value(1.0 - 0.5 * eps) + m.value(1.0 + 0.5 * eps) == doctest::Approx(3.0).epsilon(1e-12));
        // derivative agrees with central differences of the value
        const double h = eps * 1e-4;
        for (double t : {1.0 - 0.7 * eps, 1.0 - 0.2 * eps, 1.0, 1.0 + 0.4 * eps}) {
            const double fd = (m.value(t + h) - m.value(t - h)) / (2.0 * h);
            CHECK(m.derivative(t) == doctest::Approx(fd).epsilon(1e-6));
        }
        CHECK(m.derivative(1.0 - 1.01 * eps) == 0.0);
    }
}

TEST_CASE("mixed schedule: derivative matches differences of the value") {
    const BVSchedule s({piece(0, 0.8, 1.0, 2.0), piece(0.8, 1.5, 0.6, 0.6, Shape::Constant), piece(1.5, 3.0, 1.2, 0.9)});
    const auto m = mollify(s, 0.1);
    for (double t = 0.0; t <= 3.0; t += 0.0137) {
        const double h = 1e-6;
        const double fd = (m.value(t + h) - m.value(t - h)) / (2.0 * h);
        REQUIRE(m.derivative(t) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        REQUIRE(m.value(t) >= s.inf() - 1e-12);
        REQUIRE(m.value(t) <= s.sup() + 1e-12);
    }
    CHECK(m.l1_derivative_norm(3.0) <= s.total_variation() + 1e-8);
}

TEST_CASE("L1 gaps of the mollified step halve with the width") {
    const double T = 2.0;
    const auto s = BVSchedule::step(2.0, 1.0, 1.0, T);
    MollifiedSequenceConfig cfg;
    double prev = 0.0;
    for (int n = 0; n <= 10; ++n) {
        const double gap = l1_gap(s, mollify(s, n, cfg));
        if (n > 0) {
            CHECK(gap < prev);
            CHECK(gap / prev == doctest::Approx(0.5).epsilon(1e-6));
        }
        prev = gap;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("check_mollification passes on the step") {
    const auto s = BVSchedule::step(2.0, 1.0, 1.0, 2.0);
    MollifiedSequenceConfig cfg;
    const auto checks = check_mollification(s, cfg);
    REQUIRE(checks.size() == 3);
    CHECK(checks[0].id == "lem4.1i");
    CHECK(checks[1].id == "lem4.1ii");
    CHECK(checks[2].id == "lem4.1iii");
    for (const auto& c : checks) CHECK_MESSAGE(c.pass, c.id << " measured " << c.measured);
}

TEST_CASE("bv solve on the step matches the piecewise closed form") {
    const auto s = BVSchedule::step(2.0, 1.0, 1.0, 2.0);
    const auto sol = bv_solve(half_decay_pair(), s, scalar(1.0), scalar(1.0), {});
    CHECK(sol.passed());
    CHECK_FALSE(sol.v0_is_zero);
    const double x1 = std::exp(-1.0 / 3.0);
    for (const auto& smp : sol.trajectory.samples()) {
        const double t = smp.t;
        const double exact = t < 1.0 ? std::exp(-t / 3.0) : x1 * std::exp(-(t - 1.0) / 2.0);
        REQUIRE(std::abs(smp.x(0) - exact) < 1e-4);
    }
    for (const auto& l : sol.levels)
        if (l.n > 0) CHECK(l.sup_gap_to_prev <= l.cauchy_bound + 1e-4);
}

TEST_CASE("bv solve through the l1 kink") {
    const BVSchedule s({piece(0, 0.3, 2, 2, Shape::Constant), piece(0.3, 2, 1, 1, Shape::Constant)});
    MollifiedSequenceConfig cfg;
    cfg.max_index = 14;
    const auto sol = bv_solve(l1_pair(), s, scalar(-1.0), scalar(-1.0), {}, cfg);
    CHECK(sol.passed());
    for (const auto& c : sol.checks) CHECK_MESSAGE(c.pass, c.id << " measured " << c.measured);
    CHECK(sol.levels.back().sup_gap_to_prev < 1e-5);
    // consecutive gaps shrink roughly by half once the kernel is narrow
    for (std::size_t i = 8; i < sol.levels.size(); ++i) {
        const double r = sol.levels[i].sup_gap_to_prev / sol.levels[i - 1].sup_gap_to_prev;
        CHECK(r < 0.75);
    }
}

TEST_CASE("constant bv schedule reproduces the smooth solver") {
    const BVSchedule s({piece(0, 3, 0.8, 0.8, Shape::Constant)});
    const auto sol = bv_solve(l1_pair(), s, scalar(-1.0), scalar(-1.0), {});
    const auto ref = integrate(FlowProblem(l1_pair(), LambdaSchedule::constant(0.8), scalar(-1.0), scalar(-1.0), 3.0), {});
    REQUIRE(sol.trajectory.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        REQUIRE(sol.trajectory.samples()[i].x(0) == doctest::Approx(ref.samples()[i].x(0)).epsilon(1e-12));
    }
    CHECK(sol.levels.size() == 2);
    CHECK(sol.levels.back().sup_gap_to_prev == 0.0);
}

TEST_CASE("v0 = 0 is flagged but solved") {
    const auto s = BVSchedule::step(2.0, 1.0, 1.0, 2.0);
    const auto sol = bv_solve(half_decay_pair(), s, scalar(0.0), scalar(0.0), {});
    CHECK(sol.v0_is_zero);
    CHECK(sol.passed());
}

TEST_CASE("too few levels raises NonConvergenceError with the levels so far") {
    const auto s = BVSchedule::step(2.0, 1.0, 1.0, 2.0);
    MollifiedSequenceConfig cfg;
    cfg.max_index = 2;
    BVSolveOptions opts;
    opts.tolerance = 1e-10;
    try {
        bv_solve(half_decay_pair(), s, scalar(1.0), scalar(1.0), {}, cfg, opts);
        FAIL("expected non-convergence");
    } catch (const NonConvergenceError& e) {
        CHECK(e.levels().size() == 3);
    }
    opts.tolerance = 0.0;
    CHECK_THROWS_AS(bv_solve(half_decay_pair(), s, scalar(1.0), scalar(1.0), {}, cfg, opts), ArgumentError);
}

} // TEST_SUITE
