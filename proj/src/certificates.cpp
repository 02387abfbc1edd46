#include <cmath>
#include <random>

#include "diracgap/errors.hpp"
#include "diracgap/minimax.hpp"

namespace diracgap {

namespace {

void check_profiles(int dim, const std::vector<Channel>& ch, std::size_t nvals, std::size_t mesh_size) {
    if (ch.size() != nvals) fail(ErrorKind::DomainError, "one profile per channel expected");
    for (const auto& c : ch)
        if (c.dim != dim) fail(ErrorKind::DomainError, "channel dimension mismatch");
    (void)mesh_size;
}

}  // namespace

ChannelProfiles apply_L(const ChannelProfiles& in) {
    check_profiles(in.dim, in.channels, in.values.size(), 0);
    ChannelProfiles out;
    out.dim = in.dim;
    for (std::size_t i = 0; i < in.channels.size(); ++i) {
        const Channel t = make_channel(in.dim, apply_T(in.dim, in.channels[i].index));
        out.channels.push_back(t);
        out.values.push_back(coupling_c(in.dim, t.index) * in.values[i]);
    }
    return out;
}

double e_multiplier(double c, double p) {
    const double e = std::sqrt(1.0 + p * p);
    return (1.0 - c * p + e) / (c + p + c * e);
}

std::vector<SpinorSamples> apply_G(const PositiveAmplitudes& in, const MomentumMesh& mesh) {
    check_profiles(in.dim, in.channels, in.values.size(), mesh.size());
    std::vector<SpinorSamples> out;
    for (std::size_t j = 0; j < in.channels.size(); ++j) {
        const double c = coupling_c(in.dim, in.channels[j].index);
        const Eigen::VectorXd& a = in.values[j];
        SpinorSamples s;
        s.upper.resize(a.size());
        s.lower.resize(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double p = mesh.nodes[static_cast<std::size_t>(i)];
            const double t = p / (1.0 + std::sqrt(1.0 + p * p)), n = std::sqrt(1.0 + t * t);
            const double m = e_multiplier(c, p);
            // rotation [[0,-1],[1,0]] of the positive spinor (1, t)/n
            s.upper[i] = -m * t * a[i] / n;
            s.lower[i] = m * a[i] / n;
        }
        out.push_back(std::move(s));
    }
    return out;
}

CertificateContext::CertificateContext(int dim, MomentumMesh mesh) : dim_(dim), mesh_(std::move(mesh)) {
    if (dim != 2 && dim != 3) fail(ErrorKind::DomainError, "dimension must be 2 or 3");
}

const FormMatrix& CertificateContext::coulomb(HalfInt order) {
    for (const auto& f : forms_)
        if (f.first == order) return f.second;
    forms_.emplace_back(order, assemble_coulomb_form(order, mesh_));
    return forms_.back().second;
}

CertificateValue talman_certificate(const ChannelProfiles& phi, CertificateContext& ctx) {
    check_profiles(ctx.dim(), phi.channels, phi.values.size(), ctx.mesh().size());
    const MomentumMesh& mesh = ctx.mesh();
    const double cn = kato_constant(ctx.dim());
    const double coupling = 1.0 / (4.0 - ctx.dim());
    const double lower = (cn * cn - 1.0) / (cn * cn + 1.0);
    CertificateValue out;
    double d = 0.0, coul = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < phi.channels.size(); ++j) {
        const Channel& ch = phi.channels[j];
        const Channel t = make_channel(ctx.dim(), apply_T(ctx.dim(), ch.index));
        const double ct = coupling_c(ctx.dim(), t.index);
        const Eigen::VectorXd& v = phi.values[j];
        if (v.size() != static_cast<Eigen::Index>(mesh.size())) fail(ErrorKind::DomainError, "profile length mismatch");
        double g = 0.0, p = 0.0;
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double x = v[static_cast<Eigen::Index>(i)];
            g += mesh.gram[i] * x * x;
            p += mesh.weights[i] * mesh.nodes[i] * x * x;
        }
        const double qu = ctx.coulomb(coulomb_order(ch)).quadratic(v);
        const double ql = ctx.coulomb(coulomb_order(t)).quadratic(v);
        d += (1.0 - ct * ct) * g + 2.0 * ct * p;
        coul += qu + ct * ct * ql;
        norm += (1.0 + ct * ct) * g;
        out.scale += g + p;
    }
    out.residual = d - coupling * coul - lower * norm;
    return out;
}

RelationCheck es_relation_check(const PositiveAmplitudes& phi, const MomentumMesh& mesh) {
    check_profiles(phi.dim, phi.channels, phi.values.size(), mesh.size());
    const std::vector<SpinorSamples> g = apply_G(phi, mesh);
    RelationCheck out;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < phi.channels.size(); ++j) {
        const Channel t = make_channel(phi.dim, apply_T(phi.dim, phi.channels[j].index));
        const double ct = coupling_c(phi.dim, t.index);
        const Eigen::VectorXd& a = phi.values[j];
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            const double p = mesh.nodes[k];
            const double tt = p / (1.0 + std::sqrt(1.0 + p * p)), n = std::sqrt(1.0 + tt * tt);
            const double up = a[i] / n + g[j].upper[i];
            const double lo = tt * a[i] / n + g[j].lower[i];
            const double r = ct * up - lo;
            num += mesh.gram[k] * r * r;
            den += mesh.gram[k] * a[i] * a[i];
            if (a[i] != 0.0) {
                out.ratio_deviation = std::max(out.ratio_deviation, std::abs(lo / up - ct) / ct);
                const double gn = std::hypot(g[j].upper[i], g[j].lower[i]);
                if (gn > 0.0) {
                    const double overlap = (g[j].upper[i] + tt * g[j].lower[i]) / n;
                    out.orthogonality = std::max(out.orthogonality, std::abs(overlap) / gn);
                }
            }
        }
    }
    out.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return out;
}

CertificateReport certificate_check(int dim, const CertificateCheckOptions& opt) {
    if (opt.samples < 0) fail(ErrorKind::DomainError, "samples must be non-negative");
    CertificateContext ctx(dim, MomentumMesh::geometric(opt.p_min, opt.p_max, opt.cells));
    const MomentumMesh& mesh = ctx.mesh();
    const std::vector<Channel> chans = enumerate_channels(dim, opt.kappa_max);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double lo = std::log(opt.p_min), hi = std::log(opt.p_max);
    CertificateReport rep;
    rep.dim = dim;
    for (int s = 0; s < opt.samples; ++s) {
        ChannelProfiles phi;
        phi.dim = dim;
        for (const auto& c : chans) {
            if (unif(rng) < 0.5 && !(phi.channels.empty() && &c == &chans.back())) continue;
            // log-normal bump plus cell noise
            const double amp = gauss(rng), centre = lo + (hi - lo) * unif(rng), width = 0.3 + 3.0 * unif(rng);
            Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.size()));
            for (std::size_t i = 0; i < mesh.size(); ++i) {
                const double x = (std::log(mesh.nodes[i]) - centre) / width;
                v[static_cast<Eigen::Index>(i)] = amp * std::exp(-0.5 * x * x) + 0.1 * gauss(rng);
            }
            phi.channels.push_back(c);
            phi.values.push_back(std::move(v));
        }
        const CertificateValue cv = talman_certificate(phi, ctx);
        const double ratio = cv.residual / cv.scale;
        if (s == 0 || ratio < rep.min_ratio) rep.min_ratio = ratio;
        if (cv.residual < -opt.slack * cv.scale) rep.certificate_passed = false;

        PositiveAmplitudes pa;
        pa.dim = dim;
        pa.channels = phi.channels;
        pa.values = phi.values;
        const RelationCheck rc = es_relation_check(pa, mesh);
        rep.worst.residual = std::max(rep.worst.residual, rc.residual);
        rep.worst.ratio_deviation = std::max(rep.worst.ratio_deviation, rc.ratio_deviation);
        rep.worst.orthogonality = std::max(rep.worst.orthogonality, rc.orthogonality);
    }
    rep.relation_passed = rep.worst.residual <= opt.relation_tol && rep.worst.ratio_deviation <= opt.ratio_tol;
    return rep;
}

}  // namespace diracgap
