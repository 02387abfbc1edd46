#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "diracgap/channels.hpp"
#include "diracgap/kernel.hpp"
#include "diracgap/radial.hpp"

namespace diracgap {

// ---------------------------------------------------------------- results

struct ChannelEigenvalue {
    Channel channel;
    int level = 1;  // 1-based index within the channel
    double lambda = 0.0;
    double residual = 0.0;  // half-width of the final bisection bracket
    int iterations = 0;
};

struct MergedEigenvalue {
    double lambda = 0.0;
    double residual = 0.0;
    Channel channel;
    int level = 1;
};

struct GapSpectrumResult {
    std::string method;  // "talman" or "esteban-sere"
    int dim = 3;
    double nu = 0.0;
    std::vector<ChannelEigenvalue> per_channel;
    std::vector<MergedEigenvalue> merged;  // ascending, each value repeated by channel degeneracy
    double trusted_below = 1.0;            // merged values below this are unaffected by the channel cut
    std::string mesh;                      // human-readable mesh metadata

    /// k-th merged value (1-based); throws NoEigenvalueInGap when fewer exist.
    const MergedEigenvalue& kth(int k) const;
};

/// Expands per-channel results by degeneracy, sorts them and sets trusted_below.
void finalize_spectrum(GapSpectrumResult& res, double kappa_max);

struct RootOptions {
    double tol = 1e-10;
    int scan = 64;
    double edge = 1e-3;  // scan covers (-1 + edge, 1 - edge)
    int max_iter = 200;
};

/// Roots mu_k = inf{lambda : count(lambda) >= k} of a count that is non-decreasing in lambda:
/// scan on opt.scan uniform samples, then bisection on each level.
std::vector<ChannelEigenvalue> count_roots(const Channel& ch, const std::function<int(double)>& count,
                                           const RootOptions& opt, int max_levels);

// ---------------------------------------------------------------- Talman

struct SchurForm {
    double lambda = 0.0;
    Channel channel;
    BorderedTridiagonal matrix;

    double quadratic(const Eigen::VectorXd& f) const { return matrix.quadratic(f); }
    Eigen::MatrixXd dense() const { return matrix.dense(); }
    /// Number of negative generalised eigenvalues of (matrix, Gram).
    int negative_count() const { return matrix.negative_count(); }
};

SchurForm talman_schur(const RadialBasis& basis, double lambda);
SchurForm talman_schur(const Channel& ch, const PotentialSpec& pot, const RadialMesh& mesh, double lambda,
                       bool enrich = true);

/// Mesh used for a channel: cutoff-graded when the enrichment is active, geometric otherwise.
RadialMesh channel_mesh(const RadialMeshSpec& spec, const Channel& ch, const PotentialSpec& pot, bool enrich);

/// Gap eigenvalues of one channel: mu_k = inf{lambda : #negative(b_lambda) >= k}, bisection on the count.
std::vector<ChannelEigenvalue> talman_channel_eigenvalues(const RadialBasis& basis, const RootOptions& opt,
                                                          int max_levels = 1 << 20);

struct TalmanOptions {
    RadialMeshSpec mesh;
    bool enrich = true;
    double kappa_max = 1.0;
    int threads = 0;  // 0 selects default_threads()
    int levels = 0;   // levels resolved per channel, 0 for all
    RootOptions root;
};

GapSpectrumResult talman_spectrum(int dim, const PotentialSpec& pot, const TalmanOptions& opt);
/// Merged k-th eigenvalue; NoEigenvalueInGap when the gap holds fewer than k.
GapSpectrumResult talman_eigenvalue(int k, int dim, const PotentialSpec& pot, const TalmanOptions& opt);

/// Gap eigenpairs of the full two-component Galerkin problem, each flagged by whether a Talman
/// eigenvalue of the same channel lies within `match_tol`; unmatched ones are suspected pollution.
struct GalerkinEigenvalue {
    double lambda = 0.0;
    bool confirmed = false;
};
std::vector<GalerkinEigenvalue> galerkin_gap_eigenvalues(const Channel& ch, const PotentialSpec& pot,
                                                         const RadialMesh& mesh, bool enrich, double match_tol);

/// Ground profile of a channel: eigenvector of b_lambda at the lowest root, by inverse iteration.
struct GroundProfile {
    double lambda = 0.0;
    Eigen::VectorXd coeffs;
};
GroundProfile talman_ground_profile(const RadialBasis& basis, const RootOptions& opt);

// ---------------------------------------------------------------- Esteban-Sere

struct MomentumBlockOperator {
    Channel upper, lower;  // (j, T j)
    MomentumMesh mesh;
    Eigen::VectorXd energy;  // sqrt(1 + pbar^2) per cell
    Eigen::MatrixXd App, Amm, Apm;
    Eigen::MatrixXd Gpp, Gmm;  // identities: coordinates are Gram-orthonormal

    Eigen::MatrixXd full() const;
    /// S(lambda) = App - lambda - Apm (Amm - lambda)^-1 Apm^T.
    Eigen::MatrixXd schur(double lambda) const;
    int negative_count(double lambda) const;
};

struct EstebanSereOptions {
    double p_min = 1e-6, p_max = 1e10;
    int cells = 600;
    double kappa_max = 1.0;
    int threads = 0;
    int levels = 0;
    RootOptions root;
};

MomentumBlockOperator esteban_sere_assemble(const Channel& ch, const PotentialSpec& pot, const MomentumMesh& mesh);
std::vector<ChannelEigenvalue> esteban_sere_channel_eigenvalues(const MomentumBlockOperator& op,
                                                                const RootOptions& opt, int max_levels = 1 << 20);
GapSpectrumResult esteban_sere_spectrum(int dim, const PotentialSpec& pot, const EstebanSereOptions& opt);
GapSpectrumResult esteban_sere_eigenvalue(int k, int dim, const PotentialSpec& pot, const EstebanSereOptions& opt);

// ---------------------------------------------------------------- trial maps and certificates

/// Momentum-channel profiles indexed by channel (all on one mesh).
struct ChannelProfiles {
    int dim = 3;
    std::vector<Channel> channels;
    std::vector<Eigen::VectorXd> values;  // nodal values per channel
};

/// L_n: channel j's profile moves to channel T j, scaled by c_{n,T j}.
ChannelProfiles apply_L(const ChannelProfiles& in);

/// Positive free-subspace amplitudes a_j(p): the spinor a_j(p) e_+(p) in the pair (j, T j).
struct PositiveAmplitudes {
    int dim = 3;
    std::vector<Channel> channels;  // upper channels j
    std::vector<Eigen::VectorXd> values;
};

/// Multiplier of E_n in channel j: (1 - c p + E)/(c + p + c E), E = sqrt(1+p^2).
double e_multiplier(double c, double p);

/// G_n applied to positive amplitudes: per cell the two-spinor (upper in j, lower in T j), lying
/// in the negative free subspace.
struct SpinorSamples {
    Eigen::VectorXd upper, lower;
};
std::vector<SpinorSamples> apply_G(const PositiveAmplitudes& in, const MomentumMesh& mesh);

/// Worst violation data for the Talman lower-bound certificate.
struct CertificateValue {
    double residual = 0.0;
    double scale = 0.0;
};

/// Caches the kernel forms needed by talman_certificate on one mesh.
class CertificateContext {
public:
    CertificateContext(int dim, MomentumMesh mesh);
    const MomentumMesh& mesh() const { return mesh_; }
    int dim() const { return dim_; }
    const FormMatrix& coulomb(HalfInt order);

private:
    int dim_;
    MomentumMesh mesh_;
    std::vector<std::pair<HalfInt, FormMatrix>> forms_;
};

/// d_n[(phi, L phi)] - (4-n)^-1 Coulomb[(phi, L phi)] - (c^2-1)/(c^2+1) |(phi, L phi)|^2.
CertificateValue talman_certificate(const ChannelProfiles& phi, CertificateContext& ctx);

struct RelationCheck {
    double residual = 0.0;        // |L(phi + G phi)_1 - (phi + G phi)_2| / |phi|
    double ratio_deviation = 0.0;  // max |lower/upper - c_{T j}| after (1 + E_n)
    double orthogonality = 0.0;    // max overlap of G phi with e_+
};
RelationCheck es_relation_check(const PositiveAmplitudes& phi, const MomentumMesh& mesh);

struct CertificateCheckOptions {
    double p_min = 1e-3, p_max = 1e3;
    int cells = 200;
    int samples = 100;
    std::uint64_t seed = 20240611ULL;
    double kappa_max = 3.0;
    double slack = 1e-8;             // talman_certificate >= -slack * scale
    double relation_tol = 1e-10;
    double ratio_tol = 1e-12;
};

struct CertificateReport {
    int dim = 3;
    double min_ratio = 0.0;  // min residual / scale over the samples
    RelationCheck worst;     // componentwise maxima
    bool certificate_passed = true;
    bool relation_passed = true;
};

/// talman_certificate and es_relation_check on seeded random multi-channel vectors.
CertificateReport certificate_check(int dim, const CertificateCheckOptions& opt);

}  // namespace diracgap
