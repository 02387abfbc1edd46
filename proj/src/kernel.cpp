#include "diracgap/kernel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "diracgap/errors.hpp"
#include "diracgap/quadrature.hpp"

namespace diracgap {

namespace {

constexpr double kPi = std::numbers::pi;

void check_order(HalfInt j) {
    if (j.twice < -1) fail(ErrorKind::DomainError, "Q_j needs j >= -1/2");
}

// Large-argument hypergeometric expansion
// Q_j(z) = sqrt(pi) G(j+1) / (G(j+3/2) (2z)^(j+1)) 2F1((j+1)/2, (j+2)/2; j+3/2; z^-2).
double q_series(double j, double logz) {
    const double x = std::exp(-2.0 * logz);
    const double a = 0.5 * (j + 1.0), b = 0.5 * (j + 2.0), c = j + 1.5;
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 400; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    const double logpref = std::lgamma(j + 1.0) - std::lgamma(j + 1.5) + 0.5 * std::log(kPi) -
                           (j + 1.0) * (std::numbers::ln2 + logz);
    return std::exp(logpref) * sum;
}

// t = cos(theta) form of the defining integral:
// Q_j = 2^(-j-1) int_0^pi sin^(2j+1)(th) (w + 2 sin^2(th/2))^(-j-1) dth,
// geometrically graded towards th = 0 where the integrand peaks on the scale sqrt(w).
double q_theta(double j, double w) {
    const GaussRule& rule = gauss_rule(20);
    const double p = 2.0 * j + 1.0;
    auto f = [&](double th) {
        const double s = std::sin(0.5 * th);
        const double sp = p == 0.0 ? 1.0 : std::pow(std::sin(th), p);
        return sp * std::pow(w + 2.0 * s * s, -(j + 1.0));
    };
    const double th0 = 1e-6 * std::sqrt(w);
    // small-angle piece: sin^(2j+1) th ~ th^(2j+1), denominator ~ w^(j+1)
    double sum = std::pow(th0, 2.0 * j + 2.0) / ((2.0 * j + 2.0) * std::pow(w, j + 1.0));
    double lo = th0;
    while (lo < kPi) {
        const double hi = std::min(2.0 * lo, kPi);
        const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
        double part = 0.0;
        for (std::size_t q = 0; q < rule.x.size(); ++q) part += rule.w[q] * f(c + r * rule.x[q]);
        sum += r * part;
        lo = hi;
    }
    return std::pow(2.0, -(j + 1.0)) * sum;
}

double q_dispatch(HalfInt j, double w, double logz) {
    check_order(j);
    if (!(w > 0.0)) fail(ErrorKind::DomainError, "Q_j(z) needs z > 1");
    if (j.twice == 0) return 0.5 * std::log1p(2.0 / w);
    if (w >= 1.0) return q_series(j.value(), logz);
    if (j.twice == 2) {
        const double z = 1.0 + w;
        return z * 0.5 * std::log1p(2.0 / w) - 1.0;
    }
    return q_theta(j.value(), w);
}

}  // namespace

double legendre_q_w(HalfInt j, double w) { return q_dispatch(j, w, std::log1p(w)); }

double legendre_q(HalfInt j, double z) {
    if (!(z > 1.0)) fail(ErrorKind::DomainError, "Q_j(z) needs z > 1");
    return q_dispatch(j, z - 1.0, std::log(z));
}

double log_kernel(HalfInt j, double t) {
    const double a = std::abs(t);
    if (a == 0.0) fail(ErrorKind::DomainError, "kernel is singular at t = 0");
    const double s = std::sinh(0.5 * a);
    const double w = 2.0 * s * s;
    const double logz = a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    return q_dispatch(j, w, logz) / kPi;
}

double coulomb_kernel(HalfInt j, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) fail(ErrorKind::DomainError, "momenta must be positive");
    if (p == q) fail(ErrorKind::DomainError, "coulomb kernel is singular on the diagonal");
    return log_kernel(j, std::log(q / p));
}

double kato_constant(int dim) {
    if (dim != 2 && dim != 3) fail(ErrorKind::DomainError, "dimension must be 2 or 3");
    const double n = dim;
    const double g1 = std::tgamma((n + 1.0) / 4.0), g2 = std::tgamma((n - 1.0) / 4.0);
    return 2.0 * (4.0 - n) * g1 * g1 / (g2 * g2);
}

MomentumMesh MomentumMesh::geometric(double p_min, double p_max, int cells) {
    if (!(p_min > 0.0) || !(p_max > p_min) || cells < 1) fail(ErrorKind::DomainError, "invalid momentum mesh");
    MomentumMesh m;
    m.p_min = p_min;
    m.p_max = p_max;
    const double x0 = std::log(p_min);
    m.h = (std::log(p_max) - x0) / cells;
    const double sh = 2.0 * std::sinh(0.5 * m.h);
    for (int i = 0; i < cells; ++i) {
        const double p = std::exp(x0 + (i + 0.5) * m.h);
        m.nodes.push_back(p);
        m.weights.push_back(p * m.h);
        m.gram.push_back(p * sh);
    }
    return m;
}

std::vector<double> coulomb_toeplitz(HalfInt j, double h, std::size_t count) {
    check_order(j);
    const GaussRule& rule = gauss_rule(20);
    std::vector<double> T(count, 0.0);
    for (std::size_t d = 0; d < count; ++d) {
        const double dh = static_cast<double>(d) * h;
        auto f = [&](double s) { return (h - std::abs(s)) * log_kernel(j, dh + s); };
        double v;
        if (d == 0) {
            auto g = [&](double s) { return (h - s) * log_kernel(j, s); };
            v = 2.0 * gauss_graded_left(g, 0.0, h, 52, rule);
        } else if (d == 1) {
            // singular at s = -h, where the weight also vanishes
            auto g = [&](double u) { return f(u - h); };
            v = gauss_graded_left(g, 0.0, h, 52, rule) + gauss_panels(f, 0.0, h, 2, rule);
        } else {
            v = gauss_panels(f, -h, 0.0, 2, rule) + gauss_panels(f, 0.0, h, 2, rule);
        }
        T[d] = v;
        if (d > 8 && v < 1e-300) break;
    }
    return T;
}

FormMatrix assemble_coulomb_form(HalfInt j, const MomentumMesh& mesh) {
    if (!mesh.log_uniform()) fail(ErrorKind::DomainError, "coulomb form needs a log-uniform mesh");
    const std::size_t n = mesh.size();
    const std::vector<double> T = coulomb_toeplitz(j, mesh.h, n);
    FormMatrix F;
    F.order = j;
    F.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            const double v = mesh.nodes[a] * mesh.nodes[b] * T[b - a];
            F.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
            F.entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
        }
    return F;
}

FormMatrix assemble_p_form(const MomentumMesh& mesh) {
    const std::size_t n = mesh.size();
    FormMatrix F;
    F.kinetic = true;
    F.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        F.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = mesh.weights[i] * mesh.nodes[i];
    return F;
}

namespace {

std::string order_name(HalfInt j) {
    std::ostringstream os;
    os << "q_" << (j.twice % 2 == 0 ? std::to_string(j.twice / 2) : std::to_string(j.twice) + "/2");
    return os.str();
}

}  // namespace

KernelCheckReport kernel_check(const KernelCheckOptions& opt) {
    if (opt.samples < 0 || opt.jmax < 0 || opt.cells < 2) fail(ErrorKind::DomainError, "invalid kernel-check options");
    const MomentumMesh mesh = MomentumMesh::geometric(opt.p_min, opt.p_max, opt.cells);
    const FormMatrix P = assemble_p_form(mesh);
    const int top = 2 * opt.jmax + 2;
    std::vector<FormMatrix> q;
    for (int t = -1; t <= top; ++t) q.push_back(assemble_coulomb_form(HalfInt::from_twice(t), mesh));
    auto form = [&](int twice) -> const FormMatrix& { return q[static_cast<std::size_t>(twice + 1)]; };

    const auto n = static_cast<Eigen::Index>(mesh.size());
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Eigen::VectorXd> vs(static_cast<std::size_t>(opt.samples), Eigen::VectorXd(n));
    for (auto& v : vs)
        for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);

    KernelCheckReport rep;
    auto run = [&](InequalityCheck& c, auto lhs, auto rhs) {
        for (const auto& v : vs) {
            const double l = lhs(v), r = rhs(v), sc = P.quadratic(v);
            if (r > 0.0) c.max_ratio = std::max(c.max_ratio, l / r);
            c.max_violation = std::max(c.max_violation, (l - r) / sc);
        }
        c.passed = c.max_violation <= opt.slack;
    };
    for (int t = -1; t + 2 <= top; ++t) {
        InequalityCheck c;
        c.name = order_name(HalfInt::from_twice(t + 2)) + " <= " + order_name(HalfInt::from_twice(t));
        run(c, [&](const Eigen::VectorXd& v) { return form(t + 2).quadratic(v); },
            [&](const Eigen::VectorXd& v) { return form(t).quadratic(v); });
        rep.chain.push_back(c);
    }

    const double c3 = kato_constant(3), c2 = kato_constant(2);
    struct Bound {
        int twice;
        double constant;
        const char* name;
    };
    const Bound bounds[] = {{0, 1.0 / c3, "q_0 <= p/c_3"},
                            {2, c3, "q_1 <= c_3 p"},
                            {-1, 2.0 / c2, "q_-1/2 <= 2p/c_2"},
                            {1, 2.0 * c2, "q_1/2 <= 2c_2 p"}};
    // trial family: 1/p on centred windows of growing log-width
    std::vector<Eigen::VectorXd> trial;
    for (int w = 1; w <= 8; ++w) {
        const Eigen::Index half = n * w / 16;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = n / 2 - half; i < n / 2 + half; ++i) v[i] = 1.0 / mesh.nodes[static_cast<std::size_t>(i)];
        trial.push_back(v);
    }
    for (const Bound& b : bounds) {
        InequalityCheck c;
        c.name = b.name;
        const FormMatrix& f = form(b.twice);
        run(c, [&](const Eigen::VectorXd& v) { return f.quadratic(v); },
            [&](const Eigen::VectorXd& v) { return b.constant * P.quadratic(v); });
        for (const auto& v : trial) c.sharpness = std::max(c.sharpness, f.quadratic(v) / (b.constant * P.quadratic(v)));
        c.passed = c.passed && c.sharpness >= opt.sharpness;
        rep.kato.push_back(c);
    }
    for (const auto& c : rep.chain) rep.passed = rep.passed && c.passed;
    for (const auto& c : rep.kato) rep.passed = rep.passed && c.passed;
    return rep;
}

}  // namespace diracgap
