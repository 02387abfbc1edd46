#include <cmath>
#include <random>

#include "diracgap/errors.hpp"
#include "diracgap/kernel.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace diracgap;

TEST_CASE("Q_0 and Q_1 closed forms") {
    CHECK(legendre_q(HalfInt::from_int(0), 3.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-13));
    for (double z : {1.001, 1.3, 2.0, 7.5, 40.0}) {
        const double q0 = 0.5 * std::log((z + 1.0) / (z - 1.0));
        CHECK(legendre_q(HalfInt::from_int(0), z) == doctest::Approx(q0).epsilon(1e-12));
        CHECK(legendre_q(HalfInt::from_int(1), z) == doctest::Approx(z * q0 - 1.0).epsilon(1e-9));
    }
}

TEST_CASE("Q_j matches brute-force quadrature on a grid") {
    for (int t = -1; t <= 8; ++t)
        for (double z : {1.05, 1.5, 2.0, 4.0, 12.0}) {
            const double ref = oracle::legendre_q(0.5 * t, z);
            CHECK(legendre_q(HalfInt::from_twice(t), z) == doctest::Approx(ref).epsilon(1e-9));
        }
}

TEST_CASE("Q_j decreases in z and in j") {
    for (int t = -1; t <= 8; ++t) {
        double prev = INFINITY;
        for (double z = 1.01; z < 50.0; z *= 1.7) {
            const double q = legendre_q(HalfInt::from_twice(t), z);
            CHECK(q > 0.0);
            CHECK(q < prev);
            prev = q;
        }
        CHECK(legendre_q(HalfInt::from_twice(t + 1), 2.5) < legendre_q(HalfInt::from_twice(t), 2.5));
    }
    CHECK(legendre_q(HalfInt::from_int(0), 1e8) < 1e-7);
}

TEST_CASE("Q_j domain") {
    CHECK_THROWS_AS(legendre_q(HalfInt::from_int(0), 1.0), Error);
    CHECK_THROWS_AS(legendre_q(HalfInt::from_int(1), 0.5), Error);
}

TEST_CASE("Coulomb kernel values and symmetry") {
    CHECK(coulomb_kernel(HalfInt::from_int(0), 1.0, 2.0) == doctest::Approx(0.5 * std::log(9.0) / M_PI).epsilon(1e-12));
    CHECK(coulomb_kernel(HalfInt::from_twice(1), 0.3, 1.7) == doctest::Approx(coulomb_kernel(HalfInt::from_twice(1), 1.7, 0.3)));
    CHECK_THROWS_AS(coulomb_kernel(HalfInt::from_int(0), 1.0, 1.0), Error);
    // logarithmic growth towards the diagonal
    const double a = coulomb_kernel(HalfInt::from_int(1), 1.0, 1.0 + 1e-4);
    const double b = coulomb_kernel(HalfInt::from_int(1), 1.0, 1.0 + 1e-6);
    CHECK((b - a) == doctest::Approx(std::log(100.0) / M_PI).epsilon(1e-3));
}

TEST_CASE("Kato constants") {
    CHECK(kato_constant(3) == doctest::Approx(2.0 / M_PI).epsilon(1e-14));
    const double g = std::tgamma(0.75) / std::tgamma(0.25);
    CHECK(kato_constant(2) == doctest::Approx(4.0 * g * g).epsilon(1e-14));
    CHECK(kato_constant(2) == doctest::Approx(0.45694658).epsilon(1e-8));
    CHECK(kato_constant(2) < 1.0);
    CHECK(kato_constant(3) < 1.0);
}

TEST_CASE("momentum mesh") {
    const MomentumMesh m = MomentumMesh::geometric(1e-2, 1e2, 40);
    REQUIRE(m.size() == 40);
    double span = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(m.nodes[i] > m.p_min);
        CHECK(m.nodes[i] < m.p_max);
        if (i) CHECK(m.nodes[i] > m.nodes[i - 1]);
        span += m.gram[i];
    }
    // int b_i^2 equals the cell length, so the cells tile [p_min, p_max]
    CHECK(span == doctest::Approx(m.p_max - m.p_min).epsilon(1e-12));
}

TEST_CASE("p form is diagonal with int p b_i^2") {
    const MomentumMesh m = MomentumMesh::geometric(0.5, 8.0, 12);
    const FormMatrix p = assemble_p_form(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double lo = m.nodes[i] * std::exp(-0.5 * m.h), hi = m.nodes[i] * std::exp(0.5 * m.h);
        const double ref = oracle::gauss5([&](double x) { return x * (m.nodes[i] / x) * (m.nodes[i] / x); }, lo, hi, 8);
        CHECK(p.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == doctest::Approx(ref).epsilon(1e-12));
    }
    CHECK(p.entries.sum() == doctest::Approx(p.entries.trace()));
    // coefficients 1/p_i represent 1/p exactly: p[1/p] = ln(p_max/p_min)
    Eigen::VectorXd v(static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) v[static_cast<Eigen::Index>(i)] = 1.0 / m.nodes[i];
    CHECK(p.quadratic(v) == doctest::Approx(std::log(16.0)).epsilon(1e-12));
}

TEST_CASE("Coulomb form entries match a tensor Gauss oracle away from the diagonal") {
    const MomentumMesh m = MomentumMesh::geometric(0.1, 10.0, 20);
    for (int t : {-1, 0, 1, 2, 5}) {
        const HalfInt j = HalfInt::from_twice(t);
        const FormMatrix f = assemble_coulomb_form(j, m);
        for (auto [a, b] : {std::pair{2, 5}, std::pair{0, 19}, std::pair{7, 10}}) {
            auto cell = [&](int i) {
                return std::pair{m.nodes[i] * std::exp(-0.5 * m.h), m.nodes[i] * std::exp(0.5 * m.h)};
            };
            const auto [a0, a1] = cell(a);
            const auto [b0, b1] = cell(b);
            const double ref = oracle::gauss5(
                [&](double p) {
                    return oracle::gauss5(
                        [&](double q) {
                            const double z = 0.5 * (q / p + p / q);
                            return (m.nodes[a] / p) * (m.nodes[b] / q) * oracle::legendre_q(0.5 * t, z) / M_PI;
                        },
                        b0, b1, 4);
                },
                a0, a1, 4);
            CHECK(f.entries(a, b) == doctest::Approx(ref).epsilon(1e-7));
            CHECK(f.entries(a, b) == f.entries(b, a));
        }
    }
}

TEST_CASE("Coulomb forms are symmetric and positive semidefinite") {
    const MomentumMesh m = MomentumMesh::geometric(1e-3, 1e3, 80);
    for (int t = -1; t <= 6; ++t) {
        const FormMatrix f = assemble_coulomb_form(HalfInt::from_twice(t), m);
        CHECK((f.entries - f.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.entries, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
    }
}

TEST_CASE("chain and Kato bounds on random vectors") {
    KernelCheckOptions o;
    o.samples = 40;
    o.cells = 120;
    const KernelCheckReport r = kernel_check(o);
    CHECK(r.passed);
    REQUIRE(r.kato.size() == 4);
    for (const auto& c : r.chain) CHECK(c.max_violation <= 1e-8);
    for (const auto& c : r.kato) {
        CHECK(c.max_violation <= 1e-8);
        CHECK(c.sharpness >= 0.8);
        CHECK(c.sharpness <= 1.0 + 1e-8);
    }
}

TEST_CASE("zero vector gives zero forms") {
    const MomentumMesh m = MomentumMesh::geometric(1e-2, 1e2, 30);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(30);
    CHECK(assemble_coulomb_form(HalfInt::from_int(0), m).quadratic(z) == 0.0);
    CHECK(assemble_p_form(m).quadratic(z) == 0.0);
}
