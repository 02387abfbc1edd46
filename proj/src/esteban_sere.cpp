#include <lapacke.h>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "diracgap/errors.hpp"
#include "diracgap/minimax.hpp"
#include "diracgap/parallel.hpp"

namespace diracgap {

namespace {

// Cell data of the Gram-orthonormal free spinors e_+ = (a, b), e_- = (-b, a).
struct FreeCell {
    double energy, a, b;
};

FreeCell free_cell(const MomentumMesh& mesh, std::size_t i) {
    const double pbar = mesh.nodes[i] * mesh.nodes[i] * mesh.h / mesh.gram[i];  // int p b_i^2 / int b_i^2
    const double e = std::sqrt(1.0 + pbar * pbar);
    const double t = pbar / (1.0 + e);
    const double a = 1.0 / (std::sqrt(1.0 + t * t) * std::sqrt(mesh.gram[i]));
    return {e, a, t * a};
}

// Inertia of a symmetric matrix from its Bunch-Kaufman factorisation.
int negative_inertia(Eigen::MatrixXd S) {
    const lapack_int n = static_cast<lapack_int>(S.rows());
    std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, S.data(), n, ipiv.data());
    if (info < 0) fail(ErrorKind::ConvergenceFailure, "dsytrf rejected its arguments");
    int neg = 0;
    for (lapack_int i = 0; i < n;) {
        if (ipiv[static_cast<std::size_t>(i)] > 0) {
            neg += S(i, i) < 0.0;
            ++i;
        } else {
            const double a = S(i, i), c = S(i + 1, i + 1), b = S(i + 1, i);
            const double det = a * c - b * b;
            if (det < 0.0)
                neg += 1;
            else if (a + c < 0.0)
                neg += 2;
            i += 2;
        }
    }
    return neg;
}

}  // namespace

Eigen::MatrixXd MomentumBlockOperator::full() const {
    const Eigen::Index n = App.rows();
    Eigen::MatrixXd A(2 * n, 2 * n);
    A << App, Apm, Apm.transpose(), Amm;
    return A;
}

Eigen::MatrixXd MomentumBlockOperator::schur(double lambda) const {
    const Eigen::Index n = App.rows();
    Eigen::MatrixXd M = -Amm;
    M.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::NegativeBlockNotDefinite, "A_mm - lambda is not negative definite; refine the momentum mesh");
    const Eigen::MatrixXd X = llt.matrixL().solve(Apm.transpose());
    Eigen::MatrixXd S = App;
    S.diagonal().array() -= lambda;
    S.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0);
    S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
    (void)n;
    return S;
}

int MomentumBlockOperator::negative_count(double lambda) const { return negative_inertia(schur(lambda)); }

namespace {

MomentumBlockOperator assemble_with(const Channel& ch, const PotentialSpec& pot, const MomentumMesh& mesh,
                                    const FormMatrix* ku, const FormMatrix* kl) {
    MomentumBlockOperator op;
    op.upper = ch;
    op.lower = make_channel(ch.dim, apply_T(ch.dim, ch.index));
    op.mesh = mesh;
    const auto n = static_cast<Eigen::Index>(mesh.size());
    Eigen::VectorXd a(n), b(n);
    op.energy.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const FreeCell c = free_cell(mesh, static_cast<std::size_t>(i));
        op.energy[i] = c.energy;
        a[i] = c.a;
        b[i] = c.b;
    }
    op.App = op.energy.asDiagonal();
    op.Amm = -op.App;
    op.Apm = Eigen::MatrixXd::Zero(n, n);
    if (pot.nu > 0.0) {
        const Eigen::MatrixXd aa = a * a.transpose(), bb = b * b.transpose(), ab = a * b.transpose();
        const Eigen::MatrixXd& U = ku->entries;
        const Eigen::MatrixXd& L = kl->entries;
        op.App -= pot.nu * (aa.cwiseProduct(U) + bb.cwiseProduct(L));
        op.Amm -= pot.nu * (bb.cwiseProduct(U) + aa.cwiseProduct(L));
        op.Apm = -pot.nu * (-ab.cwiseProduct(U) + ab.transpose().cwiseProduct(L));
    }
    op.Gpp = Eigen::MatrixXd::Identity(n, n);
    op.Gmm = op.Gpp;
    return op;
}

void check_momentum_potential(int dim, const PotentialSpec& pot) {
    if (!pot.is_coulomb())
        fail(ErrorKind::InvalidPotential, "the momentum-space solver needs a Coulomb potential");
    pot.validate(dim);
}

}  // namespace

MomentumBlockOperator esteban_sere_assemble(const Channel& ch, const PotentialSpec& pot, const MomentumMesh& mesh) {
    check_momentum_potential(ch.dim, pot);
    const Channel low = make_channel(ch.dim, apply_T(ch.dim, ch.index));
    if (pot.nu == 0.0) return assemble_with(ch, pot, mesh, nullptr, nullptr);
    const FormMatrix ku = assemble_coulomb_form(coulomb_order(ch), mesh);
    const FormMatrix kl = assemble_coulomb_form(coulomb_order(low), mesh);
    return assemble_with(ch, pot, mesh, &ku, &kl);
}

namespace {

// Eigenvalues of the full block matrix inside (lo, hi), ascending.
std::vector<double> full_eigenvalues_in(const MomentumBlockOperator& op, double lo, double hi) {
    Eigen::MatrixXd A = op.full();
    const lapack_int n = static_cast<lapack_int>(A.rows());
    lapack_int found = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'V', 'L', n, A.data(), n, lo, hi, 0, 0, 0.0, &found,
                                           w.data(), nullptr, 1, isuppz.data());
    if (info != 0) fail(ErrorKind::ConvergenceFailure, "dsyevr failed on the block operator");
    w.resize(static_cast<std::size_t>(found));
    return w;
}

}  // namespace

std::vector<ChannelEigenvalue> esteban_sere_channel_eigenvalues(const MomentumBlockOperator& op,
                                                                const RootOptions& opt, int max_levels) {
    auto count = [&](double l) { return op.negative_count(l); };
    const double a = -1.0 + opt.edge, b = 1.0 - opt.edge;
    // count(a) == 0 also establishes A_mm - lambda < 0 on the whole window
    if (count(a) != 0) return count_roots(op.upper, count, opt, max_levels);
    // full-matrix eigenvalues are only accurate to eps * max energy, so they seed brackets for the Schur count
    const std::vector<double> cand = full_eigenvalues_in(op, a, b);
    const int levels = std::min(static_cast<int>(cand.size()), max_levels);
    std::vector<ChannelEigenvalue> out;
    for (int k = 1; k <= levels; ++k) {
        const double c = cand[static_cast<std::size_t>(k) - 1];
        double lo = c, hi = c, d = 1e-8;
        while (lo > a && count(lo) >= k) {
            lo = std::max(a, c - d);
            d *= 8.0;
        }
        d = 1e-8;
        while (hi < b && count(hi) < k) {
            hi = std::min(b, c + d);
            d *= 8.0;
        }
        if (count(lo) >= k || count(hi) < k) return count_roots(op.upper, count, opt, max_levels);
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
        e.channel = op.upper;
        e.level = k;
        e.lambda = 0.5 * (lo + hi);
        e.residual = 0.5 * (hi - lo);
        e.iterations = it;
        out.push_back(e);
    }
    return out;
}

GapSpectrumResult esteban_sere_spectrum(int dim, const PotentialSpec& pot, const EstebanSereOptions& opt) {
    check_momentum_potential(dim, pot);
    if (!(pot.nu < 1.0 / (4.0 - dim))) fail(ErrorKind::DomainError, "eigenvalue solvers need nu < 1/(4-n)");
    const MomentumMesh mesh = MomentumMesh::geometric(opt.p_min, opt.p_max, opt.cells);
    const std::vector<Channel> chans = enumerate_channels(dim, opt.kappa_max);

    // each kernel order is assembled once and shared between channel pairs
    std::map<int, FormMatrix> forms;
    if (pot.nu > 0.0) {
        std::vector<HalfInt> orders;
        for (const auto& c : chans) {
            orders.push_back(coulomb_order(c));
            orders.push_back(coulomb_order(make_channel(dim, apply_T(dim, c.index))));
        }
        for (HalfInt o : orders) forms.emplace(o.twice, FormMatrix{});
        std::vector<int> keys;
        for (auto& kv : forms) keys.push_back(kv.first);
        std::vector<FormMatrix> built(keys.size());
        parallel_for(keys.size(), opt.threads,
                     [&](std::size_t i) { built[i] = assemble_coulomb_form(HalfInt::from_twice(keys[i]), mesh); });
        for (std::size_t i = 0; i < keys.size(); ++i) forms[keys[i]] = std::move(built[i]);
    }

    std::vector<std::vector<ChannelEigenvalue>> parts(chans.size());
    parallel_for(chans.size(), opt.threads, [&](std::size_t i) {
        const Channel& c = chans[i];
        const Channel low = make_channel(dim, apply_T(dim, c.index));
        const FormMatrix* ku = pot.nu > 0.0 ? &forms.at(coulomb_order(c).twice) : nullptr;
        const FormMatrix* kl = pot.nu > 0.0 ? &forms.at(coulomb_order(low).twice) : nullptr;
        parts[i] = esteban_sere_channel_eigenvalues(assemble_with(c, pot, mesh, ku, kl), opt.root,
                                                   opt.levels > 0 ? opt.levels : 1 << 20);
    });

    GapSpectrumResult res;
    res.method = "esteban-sere";
    res.dim = dim;
    res.nu = pot.nu;
    for (auto& p : parts) res.per_channel.insert(res.per_channel.end(), p.begin(), p.end());
    finalize_spectrum(res, opt.kappa_max);
    std::ostringstream os;
    os << "momentum cells=" << opt.cells << ", p_min=" << opt.p_min << ", p_max=" << opt.p_max;
    res.mesh = os.str();
    return res;
}

GapSpectrumResult esteban_sere_eigenvalue(int k, int dim, const PotentialSpec& pot, const EstebanSereOptions& opt) {
    EstebanSereOptions o = opt;
    if (k > 0 && (o.levels <= 0 || o.levels > k)) o.levels = k;
    GapSpectrumResult res = esteban_sere_spectrum(dim, pot, o);
    res.kth(k);
    return res;
}

}  // namespace diracgap
