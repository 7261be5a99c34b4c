#include "nflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace nflow::quad {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15)
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    double value;  // Kronrod estimate
    double error;  // |Kronrod - Gauss|
    double l1;     // Kronrod estimate of int |f|
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule15(const Fn& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = kWgk[7] * fc;
    double g = kWg[3] * fc;
    double l1 = kWgk[7] * std::abs(fc);
    for (int j = 0; j < 7; ++j) {
        const double f1 = f(c - h * kXgk[j]);
        const double f2 = f(c + h * kXgk[j]);
        k += kWgk[j] * (f1 + f2);
        l1 += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, k * h, std::abs((k - g) * h), l1 * std::abs(h)};
}

constexpr int kMaxSegments = 2000;

} // namespace

// Globally adaptive: bisect the segment with the largest error estimate until
// the summed estimate is below rel_tol times int |f|.
double integrate(const Fn& f, double a, double b, double rel_tol) {
    if (!(b > a)) return 0.0;
    std::priority_queue<Segment> heap;
    Segment first = rule15(f, a, b);
    double value = first.value, error = first.error, l1 = first.l1;
    heap.push(first);
    while (error > rel_tol * l1 && static_cast<int>(heap.size()) < kMaxSegments) {
        const Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) {
            heap.push(s);
            break;
        }
        const Segment lo = rule15(f, s.a, mid);
        const Segment hi = rule15(f, mid, s.b);
        value += lo.value + hi.value - s.value;
        error += lo.error + hi.error - s.error;
        l1 += lo.l1 + hi.l1 - s.l1;
        heap.push(lo);
        heap.push(hi);
    }
    // re-sum to shed accumulated update rounding
    double total = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        heap.pop();
    }
    (void)value;
    return total;
}

std::vector<double> partition(double a, double b, std::vector<double> breakpoints) {
    std::vector<double> pts{a};
    std::sort(breakpoints.begin(), breakpoints.end());
    const double eps = 1e-15 * std::max({1.0, std::abs(a), std::abs(b)});
    for (double p : breakpoints) {
        if (p > a + eps && p < b - eps && p > pts.back() + eps) pts.push_back(p);
    }
    pts.push_back(b);
    return pts;
}

double integrate_piecewise(const Fn& f, double a, double b, std::vector<double> breakpoints, double rel_tol) {
    const auto pts = partition(a, b, std::move(breakpoints));
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += integrate(f, pts[i], pts[i + 1], rel_tol);
    return s;
}

namespace {

double bisect_root(const Fn& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double integrate_abs(const Fn& f, double a, double b, std::vector<double> breakpoints, int scan, double rel_tol) {
    const auto pts = partition(a, b, std::move(breakpoints));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i];
        const double hi = pts[i + 1];
        // sample strictly inside the piece; f may be one-sided at its ends
        std::vector<double> cuts{lo};
        const double h = (hi - lo) / scan;
        double tprev = lo + 0.5 * h;
        double fprev = f(tprev);
        for (int k = 1; k < scan; ++k) {
            const double t = lo + (k + 0.5) * h;
            const double ft = f(t);
            if (fprev != 0.0 && ft != 0.0 && ((ft > 0) != (fprev > 0))) cuts.push_back(bisect_root(f, tprev, t, fprev));
            if (ft != 0.0) {
                tprev = t;
                fprev = ft;
            }
        }
        cuts.push_back(hi);
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            total += std::abs(integrate(f, cuts[j], cuts[j + 1], rel_tol));
        }
    }
    return total;
}

} // namespace nflow::quad
