#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "diracgap/errors.hpp"
#include "diracgap/hardy.hpp"
#include "diracgap/minimax.hpp"
#include "diracgap/radial.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace diracgap;

namespace {

Channel ch3(int l, int s) { return make_channel(3, Index3{l, s}); }

BorderedTridiagonal random_bordered(std::mt19937_64& rng, int n, bool border) {
    std::normal_distribution<double> g(0.0, 1.0);
    BorderedTridiagonal t;
    for (int i = 0; i < n; ++i) t.diag.push_back(g(rng));
    for (int i = 0; i + 1 < n; ++i) t.off.push_back(g(rng));
    if (border) {
        for (int i = 0; i < n; ++i) t.border.push_back(g(rng));
        t.corner = g(rng);
    }
    return t;
}

}  // namespace

TEST_CASE("geometric mesh") {
    const RadialMesh m = RadialMesh::geometric(1e-6, 50.0, 200);
    REQUIRE(m.nodes.size() == 200);
    CHECK(m.r_min() == doctest::Approx(1e-6));
    CHECK(m.r_max() == doctest::Approx(50.0));
    const double q = m.nodes[1] / m.nodes[0];
    for (std::size_t i = 1; i < m.nodes.size(); ++i) CHECK(m.nodes[i] / m.nodes[i - 1] == doctest::Approx(q));
    const RadialMesh r = m.refined();
    CHECK(r.elements() == 2 * m.elements());
}

TEST_CASE("cutoff-graded mesh resolves [1, 2]") {
    const RadialMesh m = RadialMesh::cutoff_graded(1e-6, 80.0, 400);
    REQUIRE(m.nodes.size() == 400);
    std::size_t inside = 0;
    for (std::size_t i = 0; i + 1 < m.nodes.size(); ++i) {
        CHECK(m.nodes[i + 1] > m.nodes[i]);
        if (m.nodes[i] >= 1.0 - 1e-12 && m.nodes[i + 1] <= 2.0 + 1e-12) ++inside;
    }
    CHECK(inside >= m.elements() / 2 - 1);
    CHECK(default_r_max(3, 0.5) == doctest::Approx(80.0));
    CHECK(default_r_max(3, 0.9) == doctest::Approx(50.0));
}

TEST_CASE("bordered tridiagonal algebra against dense oracles") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const bool border = trial % 2 == 1;
        const BorderedTridiagonal t = random_bordered(rng, 30, border);
        const Eigen::MatrixXd d = t.dense();
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(t.negative_count() == oracle::dense_negative_count(d));
        const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(t.size()), -1.0, 2.0);
        CHECK((t.apply(x) - d * x).norm() <= 1e-12 * (1.0 + (d * x).norm()));
        CHECK(t.quadratic(x) == doctest::Approx(x.dot(d * x)));
    }
}

TEST_CASE("P1 Gram matrix is the textbook mass matrix") {
    const PotentialSpec pot = PotentialSpec::coulomb(0.3);
    const RadialMesh m = RadialMesh::geometric(1e-3, 10.0, 40);
    const RadialBasis b(ch3(1, -1), pot, m, false);
    const BorderedTridiagonal g = b.gram();
    REQUIRE(g.diag.size() == 38);
    for (std::size_t i = 0; i < g.diag.size(); ++i) {
        const double h0 = m.nodes[i + 1] - m.nodes[i], h1 = m.nodes[i + 2] - m.nodes[i + 1];
        CHECK(g.diag[i] == doctest::Approx((h0 + h1) / 3.0).epsilon(1e-12));
        if (i + 1 < g.diag.size()) CHECK(g.off[i] == doctest::Approx(h1 / 6.0).epsilon(1e-12));
    }
}

TEST_CASE("Schur form equals direct quadrature of its integrand") {
    const double nu = 0.4, lam = 0.3;
    const PotentialSpec pot = PotentialSpec::coulomb(nu);
    const RadialMesh m = RadialMesh::geometric(1e-4, 30.0, 120);
    const Channel c = ch3(1, 1);
    const RadialBasis b(c, pot, m, false);
    auto f = [](double r) { return r * r * std::exp(-r); };
    const Eigen::VectorXd coef = b.interpolate(f);
    const double k = c.kappa.value();
    double ref = 0.0;
    for (std::size_t e = 0; e + 1 < m.nodes.size(); ++e) {
        const double a = m.nodes[e], z = m.nodes[e + 1];
        const double fa = e == 0 ? 0.0 : f(a), fz = e + 2 == m.nodes.size() ? 0.0 : f(z);
        const double slope = (fz - fa) / (z - a);
        ref += oracle::gauss5(
            [&](double r) {
                const double u = fa + slope * (r - a), d = slope - k * u / r;
                return d * d / (1.0 + lam + nu / r) + (1.0 - lam - nu / r) * u * u;
            },
            a, z, 4);
    }
    CHECK(b.schur(lam).quadratic(coef) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("optimal lower component maximises the two-component functional") {
    const double nu = 0.5, lam = critical_lambda(3, nu);
    const PotentialSpec pot = PotentialSpec::coulomb(nu);
    const RadialMesh m = RadialMesh::geometric(1e-4, 40.0, 300);
    const RadialBasis b(ch3(0, 1), pot, m, false);
    const Eigen::VectorXd f = b.interpolate([](double r) { return r * std::exp(-0.7 * r); });
    const double k = b.channel().kappa.value();
    auto gopt = [&](double r) {
        const auto v = b.evaluate(f, r);
        return (v[1] - k * v[0] / r) / (1.0 + lam + nu / r);
    };
    const double j = hardy_J(b, f, lam);
    CHECK(hardy_functional(b, f, lam, gopt) == doctest::Approx(j).epsilon(1e-8));
    const double worse = hardy_functional(b, f, lam, [&](double r) { return gopt(r) + 0.1 * std::exp(-r); });
    CHECK(worse < j);
    const auto samples = optimal_lower(b, f, lam, {0.5, 1.0, 2.0});
    CHECK(samples[1] == doctest::Approx(gopt(1.0)));
}

TEST_CASE("extension solutions solve the zero-energy equation") {
    for (double nu : {0.3, 0.9}) {
        const Channel c = ch3(0, 1);
        const double k = c.kappa.value();
        for (int which : {1, 2})
            for (double r : {0.01, 0.1, 0.5}) {
                const double h = 1e-5 * r;
                const auto p = extension_solution(c, nu, which, r + h);
                const auto mm = extension_solution(c, nu, which, r - h);
                const auto v = extension_solution(c, nu, which, r);
                const double du = (p[0] - mm[0]) / (2 * h), dw = (p[1] - mm[1]) / (2 * h);
                const double s = std::abs(du) + std::abs(dw) + std::abs(v[0] / r) + std::abs(v[1] / r);
                CHECK(std::abs(du - k * v[0] / r - nu / r * v[1]) <= 1e-7 * s);
                CHECK(std::abs(-nu / r * v[0] - dw - k * v[1] / r) <= 1e-7 * s);
            }
    }
    CHECK(needs_extension(ch3(0, 1), 0.9));
    CHECK_FALSE(needs_extension(ch3(0, 1), 0.5));
    CHECK(extension_exponent(ch3(0, 1), 0.6) == doctest::Approx(0.8));
}

TEST_CASE("potential validation") {
    CHECK_THROWS_AS(PotentialSpec::coulomb(0.6).validate(2), Error);
    CHECK_NOTHROW(PotentialSpec::coulomb(1.0).validate(3));
    const PotentialSpec t = PotentialSpec::tabulated({0.5, 1.0, 2.0}, {-0.4, -0.3, -0.2}, 0.5);
    CHECK(t(0.75) == doctest::Approx(-0.35));
    CHECK(t(4.0) == doctest::Approx(-0.1));
    CHECK_NOTHROW(t.validate(3));
    try {
        PotentialSpec::tabulated({0.5, 1.0}, {0.1, -0.3}, 0.5).validate(3);
        FAIL("positive potential accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidPotential);
    }
    const std::string path = "diracgap_test_table.txt";
    {
        std::ofstream o(path);
        o << "# r v\n0.5, -0.4\n1.0 -0.3\n2.0 -0.2\n";
    }
    const PotentialSpec l = load_potential_table(path, 0.5);
    CHECK(l(1.5) == doctest::Approx(-0.25));
    std::remove(path.c_str());
}

TEST_CASE("cutoff functions") {
    CHECK(CutoffPair::xi(0.5) == 1.0);
    CHECK(CutoffPair::xi(2.5) == 0.0);
    CHECK(CutoffPair::xi(1.5) == doctest::Approx(0.5));
    CHECK(CutoffPair::step(0.5) == doctest::Approx(0.5));
    CHECK(CutoffPair::upsilon(0.2) == 0.0);
    for (double t : {1.2, 1.5, 1.8}) {
        const double h = 1e-6;
        CHECK(CutoffPair::xi_prime(t) ==
              doctest::Approx((CutoffPair::xi(t + h) - CutoffPair::xi(t - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK(CutoffPair::upsilon_k(8, 0.5) == 1.0);
}

TEST_CASE("Talman ground state in the gap") {
    TalmanOptions o;
    const auto r3 = talman_eigenvalue(1, 3, PotentialSpec::coulomb(0.5), o);
    CHECK(r3.kth(1).lambda == doctest::Approx(std::sqrt(0.75)).epsilon(1e-4));
    CHECK(r3.kth(1).channel.kappa.value() == 1.0);
    const auto r2 = talman_eigenvalue(1, 2, PotentialSpec::coulomb(0.25), o);
    CHECK(r2.kth(1).lambda == doctest::Approx(std::sqrt(0.75)).epsilon(1e-4));
    CHECK_THROWS_AS(talman_eigenvalue(1, 2, PotentialSpec::coulomb(0.0), o), Error);
}

TEST_CASE("Talman eigenvalues match the Sommerfeld formula") {
    TalmanOptions o;
    o.kappa_max = 2;
    const double nu = 0.5;
    const auto r = talman_spectrum(3, PotentialSpec::coulomb(nu), o);
    for (const auto& e : r.per_channel) {
        if (e.level > 2) continue;
        const double k = e.channel.kappa.value();
        const int nr = k > 0 ? e.level - 1 : e.level;
        CHECK(e.lambda == doctest::Approx(oracle::sommerfeld(nr, k, nu)).epsilon(1e-4));
    }
}

TEST_CASE("Galerkin eigenvalues in the gap are confirmed by the minimax count") {
    const PotentialSpec pot = PotentialSpec::coulomb(0.5);
    const Channel c = ch3(0, 1);
    const RadialMesh m = RadialMesh::geometric(1e-6, 80.0, 400);
    const auto g = galerkin_gap_eigenvalues(c, pot, m, false, 1e-3);
    bool found = false;
    for (const auto& e : g)
        if (std::abs(e.lambda - std::sqrt(0.75)) < 1e-3) found = found || e.confirmed;
    CHECK(found);
}

TEST_CASE("core branch and sequence bounds") {
    CHECK_FALSE(in_core_branch(3, 0.5));
    CHECK(in_core_branch(3, 0.9));
    CHECK_FALSE(in_core_branch(2, 0.0));
    CHECK(in_core_branch(2, 0.2));
    try {
        core_sequence(3, 0.5, 1, 4);
        FAIL("trivial branch accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfCoreBranch);
    }
    const CoreSequence s = core_sequence(3, 0.95, 1, 16);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(s.q[i] <= s.values[i] + 1e-8);
        CHECK(s.values[i] <= s.bound + 1e-8);
    }
}

TEST_CASE("analytic core bound against an independent quadrature") {
    auto h = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    auto step = [&](double s) { return s <= 0.0 ? 0.0 : s >= 1.0 ? 1.0 : h(s) / (h(s) + h(1.0 - s)); };
    auto xi = [&](double t) { return t <= 1.0 ? 1.0 : t >= 2.0 ? 0.0 : h(2.0 - t) / (h(2.0 - t) + h(t - 1.0)); };
    auto ups = [&](double t) { return xi(t) * step(4.0 * t - 1.0); };
    for (auto [dim, nu] : {std::pair{2, 0.3}, std::pair{3, 0.95}}) {
        const double c = 1.0 / (4.0 - dim), sigma = std::sqrt(c * c - nu * nu);
        auto a = [&](double t) {
            const double d = 1e-6;
            const double up = (ups(t + d) - ups(t - d)) / (2 * d);
            return up * up * std::pow(t, 2 * sigma + 1);
        };
        auto b = [&](double t) { return xi(t) * xi(t) * std::pow(t, 2 * sigma); };
        const double ref = oracle::gauss5(a, 0.25, 2.0, 4000) / nu + oracle::tanh_sinh(b, 0.0, 1.0) +
                           oracle::gauss5(b, 1.0, 2.0, 2000);
        CHECK(analytic_core_bound(dim, nu) == doctest::Approx(ref).epsilon(1e-6));
    }
}
