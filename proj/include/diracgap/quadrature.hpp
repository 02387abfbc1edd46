#pragma once

#include <cmath>
#include <vector>

namespace diracgap {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Supported orders: 8, 10, 16, 20, 30.
const GaussRule& gauss_rule(int n);

/// Fixed-order Gauss-Legendre sum over `panels` equal pieces of [a, b].
template <class F>
double gauss_panels(F&& f, double a, double b, int panels, const GaussRule& rule) {
    double s = 0.0;
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * step;
        const double c = lo + 0.5 * step, r = 0.5 * step;
        double part = 0.0;
        for (std::size_t q = 0; q < rule.x.size(); ++q) part += rule.w[q] * f(c + r * rule.x[q]);
        s += r * part;
    }
    return s;
}

/// Gauss-Legendre on panels that shrink geometrically towards `a`
/// (ratio 1/2, `levels` panels); covers [a + (b-a)/2^levels, b].
template <class F>
double gauss_graded_left(F&& f, double a, double b, int levels, const GaussRule& rule) {
    double s = 0.0;
    double hi = b;
    for (int k = 0; k < levels; ++k) {
        const double lo = a + 0.5 * (hi - a);
        const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
        double part = 0.0;
        for (std::size_t q = 0; q < rule.x.size(); ++q) part += rule.w[q] * f(c + r * rule.x[q]);
        s += r * part;
        hi = lo;
    }
    return s;
}

/// Adaptive Gauss-Kronrod (boost) with an error estimate.
struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
};

AdaptiveResult integrate_adaptive(const std::vector<double>& breaks, double (*f)(double, const void*), const void* ctx,
                                  double rel_tol);

template <class F>
AdaptiveResult integrate(F&& f, const std::vector<double>& breaks, double rel_tol = 1e-12) {
    auto thunk = [](double x, const void* c) { return (*static_cast<const std::decay_t<F>*>(c))(x); };
    return integrate_adaptive(breaks, thunk, &f, rel_tol);
}

/// Composite 20-point Gauss with `panels` and 2 `panels` pieces per break interval; the error is their difference.
template <class F>
AdaptiveResult integrate_panels(F&& f, const std::vector<double>& breaks, int panels = 32) {
    const GaussRule& rule = gauss_rule(20);
    double coarse = 0.0, fine = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        coarse += gauss_panels(f, breaks[i], breaks[i + 1], panels, rule);
        fine += gauss_panels(f, breaks[i], breaks[i + 1], 2 * panels, rule);
    }
    return {fine, std::abs(fine - coarse)};
}

}  // namespace diracgap
