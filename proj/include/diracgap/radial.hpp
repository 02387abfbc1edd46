#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "diracgap/channels.hpp"

namespace diracgap {

// ---------------------------------------------------------------- meshes

struct RadialMesh {
    std::vector<double> nodes;  // strictly increasing, nodes.front() = r_min, nodes.back() = r_max

    static RadialMesh geometric(double r_min, double r_max, int n_nodes);
    /// Geometric outside [1, 2]; half of the elements uniform on [1, 2] where the
    /// enrichment cutoff switches off.
    static RadialMesh cutoff_graded(double r_min, double r_max, int n_nodes);
    /// Every element split at its geometric midpoint; the hat space grows.
    RadialMesh refined() const;

    double r_min() const { return nodes.front(); }
    double r_max() const { return nodes.back(); }
    std::size_t elements() const { return nodes.size() - 1; }
};

struct RadialMeshSpec {
    double r_min = 1e-6;
    double r_max = 0.0;  // 0 selects default_r_max
    int nodes = 1000;
};

/// max(50, 40/((4-n) nu)); the ground state decays like exp(-(4-n) nu r).
double default_r_max(int dim, double nu);

// ---------------------------------------------------------------- potentials

struct PotentialSpec {
    enum class Kind { Coulomb, Tabulated };
    Kind kind = Kind::Coulomb;
    double nu = 0.0;  // Coulomb coupling, or the bound nu with 0 >= v >= -nu/r
    std::vector<double> r, v;

    static PotentialSpec coulomb(double nu);
    /// Linear interpolation; constant below the first sample, Coulomb tail v_N r_N / r above the last.
    static PotentialSpec tabulated(std::vector<double> r, std::vector<double> v, double nu_bound);

    bool is_coulomb() const { return kind == Kind::Coulomb; }
    double operator()(double x) const;
    /// Checks 0 >= v >= -nu/r on samples and midpoints and nu <= 1/(4-n); throws InvalidPotential.
    void validate(int dim) const;
};

/// Two-column text table "r v" (comma or whitespace separated, '#' comments).
PotentialSpec load_potential_table(const std::string& path, double nu_bound);

// ---------------------------------------------------------------- cutoffs

/// xi: 1 on (0,1], 0 on [2,inf); upsilon = xi(t) g(4t-1), vanishing on (0,1/4].
struct CutoffPair {
    static double h(double s);
    static double xi(double t);
    static double xi_prime(double t);
    static double step(double s);  // smooth step rising on (0,1)
    static double step_prime(double s);
    static double upsilon(double t);
    static double upsilon_prime(double t);
    /// Three-piece mollifier: upsilon(k r) on (0,1/k], 1 on (1/k,1], xi beyond.
    static double upsilon_k(int k, double r);
    static double upsilon_k_prime(int k, double r);
};

// ---------------------------------------------------------------- extension solutions

bool needs_extension(const Channel& ch, double nu);
/// phi_{j,1} (which=1) or phi_{j,2} (which=2) at r: solutions of d^{j,nu} phi = 0.
std::array<double, 2> extension_solution(const Channel& ch, double nu, int which, double r);
/// sqrt(kappa^2 - nu^2)
double extension_exponent(const Channel& ch, double nu);

/// Max relative residual of a three-point stencil of d^{j,nu} applied to sampled
/// phi_{j,which} at interior nodes within [r_lo, r_hi].
double null_solution_residual(const Channel& ch, double nu, int which, const RadialMesh& mesh, double r_lo,
                              double r_hi);

// ---------------------------------------------------------------- discretisation

/// Symmetric tridiagonal matrix with an optional dense last row/column.
struct BorderedTridiagonal {
    std::vector<double> diag, off;  // off[i] couples i and i+1
    std::vector<double> border;     // empty when not bordered
    double corner = 0.0;

    std::size_t size() const { return diag.size() + (border.empty() ? 0 : 1); }
    bool bordered() const { return !border.empty(); }
    double quadratic(const Eigen::VectorXd& f) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
    Eigen::MatrixXd dense() const;
    /// Number of negative eigenvalues (Sylvester inertia via LDL^T and the border's Schur complement).
    int negative_count() const;
    /// Solves (A - shift B) x = y for same-shape B; used by inverse iteration.
    Eigen::VectorXd solve_shifted(const BorderedTridiagonal& B, double shift, const Eigen::VectorXd& y) const;
};

/// P1 hats at interior mesh nodes, optionally augmented by the upper component of
/// xi * phi_{j,1} (Coulomb potentials only).
class RadialBasis {
public:
    RadialBasis(const Channel& ch, const PotentialSpec& pot, RadialMesh mesh, bool enrich);

    const Channel& channel() const { return ch_; }
    const PotentialSpec& potential() const { return pot_; }
    const RadialMesh& mesh() const { return mesh_; }
    bool enriched() const { return enriched_; }
    std::size_t hats() const { return mesh_.nodes.size() - 2; }
    std::size_t size() const { return hats() + (enriched_ ? 1 : 0); }
    double gamma() const { return gamma_; }

    /// b_lambda[f] = int |f' - kappa f/r|^2/(1+lambda-v) + (1-lambda+v)|f|^2 dr.
    BorderedTridiagonal schur(double lambda) const;
    BorderedTridiagonal gram() const;
    /// Scale norm int |f'-kappa f/r|^2/(2+nu/r) + (1+nu/r)|f|^2 dr.
    BorderedTridiagonal scale_form() const;

    /// Full two-component Galerkin pair (H, G); lower component uses the same hats.
    struct Operator {
        Eigen::MatrixXd H, G;
        Eigen::MatrixXd D;  // int h_i h_j' dr, hat block only
    };
    Operator channel_operator() const;

    /// Value and derivative of the profile sum c_i h_i (+ c_e e) at r.
    std::array<double, 2> evaluate(const Eigen::VectorXd& c, double r) const;
    /// Upper enrichment profile nu xi(r) r^gamma and its derivative.
    std::array<double, 2> enrichment(double r) const;
    /// Lowest-order interpolation of f into hat coefficients (enrichment coefficient zero).
    Eigen::VectorXd interpolate(const std::function<double(double)>& f) const;

private:
    struct QPoint {
        double r, w, phiL, phiR, dL, dR, v;
        double e, ep;         // enrichment upper component nu xi r^gamma and derivative
        double xi, xip, rg;   // cutoff, its derivative, r^gamma
    };
    BorderedTridiagonal assemble(const std::function<void(const QPoint&, double&, double&)>& weights,
                                 double tail_corner) const;
    double enrichment_tail_schur(double lambda) const;
    double enrichment_tail_scale() const;
    double enrichment_tail_gram() const;
    std::size_t element_of(double r) const;

    Channel ch_;
    PotentialSpec pot_;
    RadialMesh mesh_;
    bool enriched_;
    double kappa_, gamma_ = 0.0;
    std::vector<QPoint> q_;  // Q points per element, element-major
    int qn_;
};

struct ChannelOperator {
    Eigen::MatrixXd H, G;
    std::size_t hats = 0;
    bool enriched = false;
};

/// Galerkin matrix of [[1-nu/r, -d/dr-kappa/r],[d/dr-kappa/r, -1-nu/r]] (general v in place of
/// -nu/r) and its Gram matrix.
ChannelOperator assemble_channel_operator(const Channel& ch, const PotentialSpec& pot, const RadialMesh& mesh,
                                          bool enrich);

// ---------------------------------------------------------------- core functions

struct RadialSpinor {
    Channel channel;
    std::vector<double> r, upper, lower;
};

/// Channel carrying the radial part of zeta_{n,m}: two_m is 2m (2D) or 2 m_2 (3D).
Channel core_channel(int dim, int two_m);
bool in_core_branch(int dim, double nu);
/// sqrt((4-n)^-2 - nu^2)
double core_exponent(int dim, double nu);

RadialSpinor zeta_channel_profile(int dim, double nu, int two_m, const std::vector<double>& r);
/// upsilon_k(r) r^sigma sampled at r.
std::vector<double> varsigma_profile(int dim, double nu, int two_m, int k, const std::vector<double>& r);

/// A radial upper profile given by closed-form callables, supported in [breaks.front(), breaks.back()].
struct Profile {
    std::function<double(double)> f, fp;
    std::vector<double> breaks;
};
Profile varsigma_function(int dim, double nu, int k);

/// q^nu_n restricted to one channel, evaluated by adaptive quadrature.
double q_nu_channel(const Channel& ch, double nu, const Profile& f);
/// Same on a mesh profile; hat and enrichment coefficients.
double q_nu_channel(const RadialBasis& basis, const Eigen::VectorXd& coeffs);

double analytic_core_bound(int dim, double nu);

struct CoreSequence {
    int dim = 3;
    double nu = 0.0;
    int two_m = 1;
    double bound = 0.0;
    std::vector<double> values;  // right-hand side of the kinetic estimate on varsigma_k
    std::vector<double> q;       // q^nu_n on varsigma_k
};
CoreSequence core_sequence(int dim, double nu, int two_m, int kmax);

}  // namespace diracgap
