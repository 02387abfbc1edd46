#include <algorithm>
#include <cmath>
#include <sstream>

#include "diracgap/errors.hpp"
#include "diracgap/minimax.hpp"
#include "diracgap/parallel.hpp"

namespace diracgap {

const MergedEigenvalue& GapSpectrumResult::kth(int k) const {
    if (k < 1) fail(ErrorKind::DomainError, "k must be positive");
    if (static_cast<std::size_t>(k) > merged.size()) {
        std::ostringstream os;
        os << "only " << merged.size() << " eigenvalue(s) found in (-1, 1), k = " << k << " requested";
        fail(ErrorKind::NoEigenvalueInGap, os.str());
    }
    return merged[static_cast<std::size_t>(k) - 1];
}

SchurForm talman_schur(const RadialBasis& basis, double lambda) {
    SchurForm s;
    s.lambda = lambda;
    s.channel = basis.channel();
    s.matrix = basis.schur(lambda);
    return s;
}

SchurForm talman_schur(const Channel& ch, const PotentialSpec& pot, const RadialMesh& mesh, double lambda,
                       bool enrich) {
    return talman_schur(RadialBasis(ch, pot, mesh, enrich), lambda);
}

RadialMesh channel_mesh(const RadialMeshSpec& spec, const Channel& ch, const PotentialSpec& pot, bool enrich) {
    const double r_max = spec.r_max > 0.0 ? spec.r_max : default_r_max(ch.dim, pot.nu);
    const bool active = enrich && pot.is_coulomb() && pot.nu > 0.0 && extension_exponent(ch, pot.nu) > 0.0 &&
                        needs_extension(ch, pot.nu);
    if (active) return RadialMesh::cutoff_graded(spec.r_min, r_max, spec.nodes);
    return RadialMesh::geometric(spec.r_min, r_max, spec.nodes);
}

std::vector<ChannelEigenvalue> count_roots(const Channel& ch, const std::function<int(double)>& count,
                                           const RootOptions& opt, int max_levels) {
    if (!(opt.tol > 0.0) || opt.scan < 2) fail(ErrorKind::DomainError, "invalid root-finding options");
    const double a = -1.0 + opt.edge, b = 1.0 - opt.edge;
    std::vector<double> lam(static_cast<std::size_t>(opt.scan));
    std::vector<int> cnt(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) {
        lam[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(opt.scan - 1);
        cnt[i] = count(lam[i]);
    }
    const int levels = std::min(cnt.back(), max_levels);
    std::vector<ChannelEigenvalue> out;
    for (int k = 1; k <= levels; ++k) {
        std::size_t i = 0;
        while (cnt[i] < k) ++i;
        double lo = i == 0 ? -1.0 + 1e-12 : lam[i - 1];
        double hi = lam[i];
        if (i == 0 && count(lo) >= k) fail(ErrorKind::ConvergenceFailure, "eigenvalue at the lower gap edge");
        int it = 0;
        while (hi - lo > 2.0 * opt.tol) {
            if (++it > opt.max_iter) fail(ErrorKind::ConvergenceFailure, "bisection exceeded the iteration cap");
            const double mid = 0.5 * (lo + hi);
            if (count(mid) >= k)
                hi = mid;
            else
                lo = mid;
        }
        ChannelEigenvalue e;
        e.channel = ch;
        e.level = k;
        e.lambda = 0.5 * (lo + hi);
        e.residual = 0.5 * (hi - lo);
        e.iterations = it;
        out.push_back(e);
    }
    return out;
}

namespace {

// smallest |kappa| strictly above kappa_max
double next_kappa(int dim, double kappa_max) {
    if (dim == 3) return std::floor(kappa_max) + 1.0;
    return std::floor(kappa_max - 0.5) + 1.5;
}

}  // namespace

std::vector<ChannelEigenvalue> talman_channel_eigenvalues(const RadialBasis& basis, const RootOptions& opt,
                                                          int max_levels) {
    return count_roots(
        basis.channel(), [&](double l) { return basis.schur(l).negative_count(); }, opt, max_levels);
}

void finalize_spectrum(GapSpectrumResult& res, double kappa_max) {
    for (const auto& e : res.per_channel)
        for (int d = 0; d < e.channel.degeneracy; ++d) res.merged.push_back({e.lambda, e.residual, e.channel, e.level});
    std::stable_sort(res.merged.begin(), res.merged.end(),
                     [](const MergedEigenvalue& x, const MergedEigenvalue& y) { return x.lambda < y.lambda; });
    const double kn = next_kappa(res.dim, kappa_max);
    res.trusted_below = res.nu < kn ? std::sqrt(1.0 - (res.nu / kn) * (res.nu / kn)) : -1.0;
}

namespace {
void check_eigen_nu(int dim, const PotentialSpec& pot) {
    pot.validate(dim);
    if (!(pot.nu < 1.0 / (4.0 - dim))) fail(ErrorKind::DomainError, "eigenvalue solvers need nu < 1/(4-n)");
}
}  // namespace

GapSpectrumResult talman_spectrum(int dim, const PotentialSpec& pot, const TalmanOptions& opt) {
    check_eigen_nu(dim, pot);
    const std::vector<Channel> chans = enumerate_channels(dim, opt.kappa_max);
    std::vector<std::vector<ChannelEigenvalue>> parts(chans.size());
    parallel_for(chans.size(), opt.threads, [&](std::size_t i) {
        const RadialBasis basis(chans[i], pot, channel_mesh(opt.mesh, chans[i], pot, opt.enrich), opt.enrich);
        parts[i] = talman_channel_eigenvalues(basis, opt.root, opt.levels > 0 ? opt.levels : 1 << 20);
    });
    GapSpectrumResult res;
    res.method = "talman";
    res.dim = dim;
    res.nu = pot.nu;
    for (auto& p : parts) res.per_channel.insert(res.per_channel.end(), p.begin(), p.end());
    finalize_spectrum(res, opt.kappa_max);
    std::ostringstream os;
    os << "radial P1, nodes=" << opt.mesh.nodes << ", r_min=" << opt.mesh.r_min
       << ", r_max=" << (opt.mesh.r_max > 0.0 ? opt.mesh.r_max : default_r_max(dim, pot.nu))
       << ", enrich=" << (opt.enrich ? "on" : "off");
    res.mesh = os.str();
    return res;
}

GapSpectrumResult talman_eigenvalue(int k, int dim, const PotentialSpec& pot, const TalmanOptions& opt) {
    TalmanOptions o = opt;
    if (k > 0 && (o.levels <= 0 || o.levels > k)) o.levels = k;
    GapSpectrumResult res = talman_spectrum(dim, pot, o);
    res.kth(k);
    return res;
}

std::vector<GalerkinEigenvalue> galerkin_gap_eigenvalues(const Channel& ch, const PotentialSpec& pot,
                                                         const RadialMesh& mesh, bool enrich, double match_tol) {
    const ChannelOperator op = assemble_channel_operator(ch, pot, mesh, enrich);
    const Eigen::VectorXd s = op.G.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd H = s.asDiagonal() * op.H * s.asDiagonal();
    const Eigen::MatrixXd G = s.asDiagonal() * op.G * s.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(H, G, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorKind::SingularGram, "Gram matrix is not positive definite");
    const RadialBasis basis(ch, pot, mesh, enrich);
    RootOptions ro;
    const auto ref = talman_channel_eigenvalues(basis, ro);
    std::vector<GalerkinEigenvalue> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()[i];
        if (!(l > -1.0 && l < 1.0)) continue;
        GalerkinEigenvalue g;
        g.lambda = l;
        for (const auto& r : ref)
            if (std::abs(r.lambda - l) <= match_tol) g.confirmed = true;
        out.push_back(g);
    }
    return out;
}

GroundProfile talman_ground_profile(const RadialBasis& basis, const RootOptions& opt) {
    const auto roots = talman_channel_eigenvalues(basis, opt, 1);
    if (roots.empty()) fail(ErrorKind::NoEigenvalueInGap, "channel " + basis.channel().label() + " has no gap eigenvalue");
    GroundProfile gp;
    gp.lambda = roots.front().lambda;
    const BorderedTridiagonal S = basis.schur(gp.lambda);
    const BorderedTridiagonal M = basis.gram();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(basis.size()));
    for (int it = 0; it < 30; ++it) {
        x = S.solve_shifted(M, 0.0, M.apply(x));
        x /= std::sqrt(M.quadratic(x));
    }
    if (x.sum() < 0.0) x = -x;
    gp.coeffs = x;
    return gp;
}

}  // namespace diracgap
