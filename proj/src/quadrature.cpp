#include "diracgap/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "diracgap/errors.hpp"

namespace diracgap {

namespace {

template <int N>
GaussRule build_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    GaussRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    // boost stores the non-negative half; mirror it
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        r.x.push_back(-a[i]);
        r.w.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
    }
    return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
    static const GaussRule r8 = build_rule<8>();
    static const GaussRule r10 = build_rule<10>();
    static const GaussRule r16 = build_rule<16>();
    static const GaussRule r20 = build_rule<20>();
    static const GaussRule r30 = build_rule<30>();
    switch (n) {
        case 8: return r8;
        case 10: return r10;
        case 16: return r16;
        case 20: return r20;
        case 30: return r30;
        default: fail(ErrorKind::DomainError, "unsupported Gauss order " + std::to_string(n));
    }
}

AdaptiveResult integrate_adaptive(const std::vector<double>& breaks, double (*f)(double, const void*), const void* ctx,
                                  double rel_tol) {
    AdaptiveResult out;
    auto g = [&](double x) { return f(x, ctx); };
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        double err = 0.0;
        const double v =
            boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, breaks[i], breaks[i + 1], 15, rel_tol, &err);
        out.value += v;
        out.error += err;
    }
    return out;
}

}  // namespace diracgap
