#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "diracgap/channels.hpp"

namespace diracgap {

/// Legendre function of the second kind Q_j(z), j in {-1/2, 0, 1/2, 1, ...}, z > 1.
double legendre_q(HalfInt j, double z);

/// Same, parametrised by w = z - 1 > 0 (accurate near the singular point).
double legendre_q_w(HalfInt j, double w);

/// pi^-1 Q_j((q/p + p/q)/2); throws DomainError when p == q.
double coulomb_kernel(HalfInt j, double p, double q);

/// Kernel in logarithmic variables: pi^-1 Q_j(cosh t), t != 0.
double log_kernel(HalfInt j, double t);

/// c_n = 2(4-n) Gamma((n+1)/4)^2 / Gamma((n-1)/4)^2.
double kato_constant(int dim);

/// Log-uniform momentum cells. Node p_i is the geometric centre of cell i; the
/// basis function of cell i is p_i/p on the cell, so a coefficient equals the
/// function value at its node.
struct MomentumMesh {
    double p_min = 0.0, p_max = 0.0;
    double h = 0.0;                 // cell width in ln p
    std::vector<double> nodes;      // p_i
    std::vector<double> weights;    // w_i = p_i h
    std::vector<double> gram;       // int b_i^2 dp = 2 p_i sinh(h/2)

    static MomentumMesh geometric(double p_min, double p_max, int cells);
    std::size_t size() const { return nodes.size(); }
    bool log_uniform() const { return h > 0.0; }
};

struct FormMatrix {
    HalfInt order;          // j of q_j; ignored for the kinetic form
    bool kinetic = false;   // true for p[.]
    Eigen::MatrixXd entries;

    double quadratic(const Eigen::VectorXd& v) const { return v.dot(entries * v); }
};

/// T(d) = int int_{cells 0, d} k_j(x - y) dx dy for d = 0..count-1.
std::vector<double> coulomb_toeplitz(HalfInt j, double h, std::size_t count);

FormMatrix assemble_coulomb_form(HalfInt j, const MomentumMesh& mesh);
FormMatrix assemble_p_form(const MomentumMesh& mesh);

struct KernelCheckOptions {
    double p_min = 1e-4, p_max = 1e4;
    int cells = 200;
    int samples = 100;
    std::uint64_t seed = 20240611ULL;
    int jmax = 5;              // chain runs over orders -1/2, 0, ..., jmax + 1
    double slack = 1e-8;       // relative to p[zeta]
    double sharpness = 0.8;
};

/// One inequality lhs <= rhs over the random vectors and the trial family.
struct InequalityCheck {
    std::string name;
    double max_violation = 0.0;  // max (lhs - rhs) / p[zeta], clipped below at 0
    double max_ratio = 0.0;      // max lhs / rhs over random vectors
    double sharpness = 0.0;      // Kato bounds only: best lhs / rhs over the trial family
    bool passed = true;
};

struct KernelCheckReport {
    std::vector<InequalityCheck> chain;
    std::vector<InequalityCheck> kato;
    bool passed = true;
};

/// Chain q_{j+1} <= q_j and the four Kato bounds on seeded random vectors; sharpness from
/// windowed 1/p profiles.
KernelCheckReport kernel_check(const KernelCheckOptions& opt);

}  // namespace diracgap
