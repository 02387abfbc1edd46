#include "diracgap/radial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "diracgap/errors.hpp"
#include "diracgap/quadrature.hpp"

namespace diracgap {

namespace {

constexpr int kElementRule = 10;
constexpr int kTailLevels = 80;

double inv_core(int dim) { return 1.0 / (4.0 - dim); }

void check_dim(int dim) {
    if (dim != 2 && dim != 3) fail(ErrorKind::DomainError, "dimension must be 2 or 3");
}

std::vector<double> geomspace(double a, double b, int cells) {
    std::vector<double> x(static_cast<std::size_t>(cells) + 1);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i <= cells; ++i) x[i] = std::exp(la + (lb - la) * i / cells);
    x.front() = a;
    x.back() = b;
    return x;
}

// int_0^{r_min} f with f ~ c r^(2 gamma - 1) near 0: graded panels plus the analytic remainder
template <class F>
double singular_tail(F&& f, double r_min, double gamma, double c) {
    const double v = gauss_graded_left(f, 0.0, r_min, kTailLevels, gauss_rule(kElementRule));
    const double eps = std::ldexp(r_min, -kTailLevels);
    return v + c * std::pow(eps, 2.0 * gamma) / (2.0 * gamma);
}

}  // namespace

// ---------------------------------------------------------------- meshes

RadialMesh RadialMesh::geometric(double r_min, double r_max, int n_nodes) {
    if (!(r_min > 0.0) || !(r_max > r_min) || n_nodes < 3) fail(ErrorKind::DomainError, "invalid radial mesh");
    return RadialMesh{geomspace(r_min, r_max, n_nodes - 1)};
}

RadialMesh RadialMesh::cutoff_graded(double r_min, double r_max, int n_nodes) {
    if (!(r_min > 0.0) || !(r_min < 1.0) || !(r_max > 2.0) || n_nodes < 8)
        fail(ErrorKind::DomainError, "cutoff-graded mesh needs r_min < 1 < 2 < r_max and at least 8 nodes");
    const int cells = n_nodes - 1;
    const int mid = cells / 2;
    const int rest = cells - mid;
    const double l1 = -std::log(r_min), l2 = std::log(0.5 * r_max);
    int n1 = static_cast<int>(std::lround(rest * l1 / (l1 + l2)));
    n1 = std::clamp(n1, 1, rest - 1);
    const int n2 = rest - n1;
    RadialMesh m;
    m.nodes = geomspace(r_min, 1.0, n1);
    for (int i = 1; i <= mid; ++i) m.nodes.push_back(1.0 + static_cast<double>(i) / mid);
    const std::vector<double> outer = geomspace(2.0, r_max, n2);
    m.nodes.insert(m.nodes.end(), outer.begin() + 1, outer.end());
    return m;
}

RadialMesh RadialMesh::refined() const {
    RadialMesh m;
    m.nodes.reserve(2 * nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        m.nodes.push_back(nodes[i]);
        m.nodes.push_back(std::sqrt(nodes[i] * nodes[i + 1]));
    }
    m.nodes.push_back(nodes.back());
    return m;
}

double default_r_max(int dim, double nu) {
    check_dim(dim);
    if (!(nu > 0.0)) return 50.0;
    return std::max(50.0, 40.0 / ((4.0 - dim) * nu));
}

// ---------------------------------------------------------------- potentials

PotentialSpec PotentialSpec::coulomb(double nu) {
    PotentialSpec p;
    p.kind = Kind::Coulomb;
    p.nu = nu;
    return p;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> r, std::vector<double> v, double nu_bound) {
    PotentialSpec p;
    p.kind = Kind::Tabulated;
    p.nu = nu_bound;
    p.r = std::move(r);
    p.v = std::move(v);
    return p;
}

double PotentialSpec::operator()(double x) const {
    if (kind == Kind::Coulomb) return -nu / x;
    if (x <= r.front()) return v.front();
    if (x >= r.back()) return v.back() * r.back() / x;
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
    const double t = (x - r[i]) / (r[i + 1] - r[i]);
    return (1.0 - t) * v[i] + t * v[i + 1];
}

void PotentialSpec::validate(int dim) const {
    check_dim(dim);
    if (!(nu >= 0.0) || nu > inv_core(dim) * (1.0 + 1e-15))
        fail(ErrorKind::InvalidPotential, "nu must lie in [0, 1/(4-n)]");
    if (kind == Kind::Coulomb) return;
    if (r.size() < 2 || r.size() != v.size()) fail(ErrorKind::InvalidPotential, "table needs at least two samples");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i]) || !std::isfinite(v[i]) || !(r[i] > 0.0))
            fail(ErrorKind::InvalidPotential, "table entries must be finite with r > 0");
        if (i > 0 && !(r[i] > r[i - 1])) fail(ErrorKind::InvalidPotential, "table radii must increase strictly");
    }
    auto check = [&](double x) {
        const double val = (*this)(x);
        const double lo = -nu / x;
        const double slack = 1e-12 * std::abs(lo);
        if (val > slack || val < lo - slack) {
            std::ostringstream os;
            os << "v(" << x << ") = " << val << " violates 0 >= v >= -nu/r";
            fail(ErrorKind::InvalidPotential, os.str());
        }
    };
    for (std::size_t i = 0; i < r.size(); ++i) {
        check(r[i]);
        if (i + 1 < r.size()) check(0.5 * (r[i] + r[i + 1]));
    }
}

PotentialSpec load_potential_table(const std::string& path, double nu_bound) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open potential table " + path);
    std::vector<double> r, v;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a)) continue;
        if (!(ls >> b)) fail(ErrorKind::InvalidPotential, "malformed table line: " + line);
        r.push_back(a);
        v.push_back(b);
    }
    return PotentialSpec::tabulated(std::move(r), std::move(v), nu_bound);
}

// ---------------------------------------------------------------- cutoffs

double CutoffPair::h(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

namespace {
double h_prime(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }
}  // namespace

double CutoffPair::xi(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double a = h(2.0 - t), b = h(t - 1.0);
    return a / (a + b);
}

double CutoffPair::xi_prime(double t) {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    const double a = h(2.0 - t), b = h(t - 1.0);
    const double s = a + b;
    return (-h_prime(2.0 - t) * b - a * h_prime(t - 1.0)) / (s * s);
}

double CutoffPair::step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = h(s), b = h(1.0 - s);
    return a / (a + b);
}

double CutoffPair::step_prime(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = h(s), b = h(1.0 - s);
    const double d = a + b;
    return (h_prime(s) * b + a * h_prime(1.0 - s)) / (d * d);
}

double CutoffPair::upsilon(double t) { return xi(t) * step(4.0 * t - 1.0); }

double CutoffPair::upsilon_prime(double t) {
    return xi_prime(t) * step(4.0 * t - 1.0) + 4.0 * xi(t) * step_prime(4.0 * t - 1.0);
}

double CutoffPair::upsilon_k(int k, double r) {
    if (r <= 1.0 / k) return upsilon(k * r);
    if (r <= 1.0) return 1.0;
    return xi(r);
}

double CutoffPair::upsilon_k_prime(int k, double r) {
    if (r <= 1.0 / k) return k * upsilon_prime(k * r);
    if (r <= 1.0) return 0.0;
    return xi_prime(r);
}

// ---------------------------------------------------------------- extension solutions

bool needs_extension(const Channel& ch, double nu) {
    const double k = ch.kappa.value();
    return k * k - nu * nu < 0.25;
}

double extension_exponent(const Channel& ch, double nu) {
    const double k = ch.kappa.value();
    return std::sqrt(std::max(0.0, k * k - nu * nu));
}

std::array<double, 2> extension_solution(const Channel& ch, double nu, int which, double r) {
    if (!(r > 0.0)) fail(ErrorKind::DomainError, "extension solutions need r > 0");
    if (which != 1 && which != 2) fail(ErrorKind::DomainError, "which must be 1 or 2");
    const double k = ch.kappa.value();
    if (nu == 0.0) {
        if (which == 1) return {std::pow(r, k), 0.0};
        return {0.0, std::pow(r, -k)};
    }
    const double gap = k * k - nu * nu;
    const double g = extension_exponent(ch, nu);
    if (which == 1) {
        const double p = std::pow(r, g);
        return {nu * p, (g - k) * p};
    }
    if (gap <= 4.0 * std::numeric_limits<double>::epsilon() * k * k) {
        const double l = std::log(r);
        return {nu * l, 1.0 - k * l};
    }
    const double p = std::pow(r, -g);
    return {nu * p, (-g - k) * p};
}

double null_solution_residual(const Channel& ch, double nu, int which, const RadialMesh& mesh, double r_lo,
                              double r_hi) {
    const double k = ch.kappa.value();
    const auto& x = mesh.nodes;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] < r_lo || x[i] > r_hi) continue;
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        const auto a = extension_solution(ch, nu, which, x[i - 1]);
        const auto b = extension_solution(ch, nu, which, x[i]);
        const auto c = extension_solution(ch, nu, which, x[i + 1]);
        double d[2];
        for (int comp = 0; comp < 2; ++comp)
            d[comp] = (-h1 / (h0 * (h0 + h1))) * a[comp] + ((h1 - h0) / (h0 * h1)) * b[comp] +
                      (h0 / (h1 * (h0 + h1))) * c[comp];
        const double r = x[i];
        const double res1 = -nu / r * b[0] - d[1] - k * b[1] / r;
        const double res2 = d[0] - k * b[0] / r - nu / r * b[1];
        const double n1 = std::abs(nu / r * b[0]) + std::abs(d[1]) + std::abs(k * b[1] / r);
        const double n2 = std::abs(d[0]) + std::abs(k * b[0] / r) + std::abs(nu / r * b[1]);
        if (n1 > 0.0) worst = std::max(worst, std::abs(res1) / n1);
        if (n2 > 0.0) worst = std::max(worst, std::abs(res2) / n2);
    }
    return worst;
}

// ---------------------------------------------------------------- bordered tridiagonal

double BorderedTridiagonal::quadratic(const Eigen::VectorXd& f) const { return f.dot(apply(f)); }

Eigen::VectorXd BorderedTridiagonal::apply(const Eigen::VectorXd& f) const {
    const std::size_t m = diag.size();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < m; ++i) {
        double s = diag[i] * f[i];
        if (i > 0) s += off[i - 1] * f[i - 1];
        if (i + 1 < m) s += off[i] * f[i + 1];
        y[i] = s;
    }
    if (bordered()) {
        const double fe = f[static_cast<Eigen::Index>(m)];
        double s = corner * fe;
        for (std::size_t i = 0; i < m; ++i) {
            y[i] += border[i] * fe;
            s += border[i] * f[i];
        }
        y[static_cast<Eigen::Index>(m)] = s;
    }
    return y;
}

Eigen::MatrixXd BorderedTridiagonal::dense() const {
    const auto n = static_cast<Eigen::Index>(size());
    const auto m = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        A(i, i) = diag[i];
        if (i + 1 < m) A(i, i + 1) = A(i + 1, i) = off[i];
    }
    if (bordered()) {
        for (Eigen::Index i = 0; i < m; ++i) A(i, m) = A(m, i) = border[i];
        A(m, m) = corner;
    }
    return A;
}

namespace {

// LDL^T of a symmetric tridiagonal matrix without pivoting; zero pivots nudged.
struct TriLdl {
    std::vector<double> d, l;

    TriLdl(const std::vector<double>& a, const std::vector<double>& b) : d(a.size()), l(a.size(), 0.0) {
        const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
        for (std::size_t i = 0; i < a.size(); ++i) {
            double di = a[i];
            if (i > 0) {
                l[i] = b[i - 1] / d[i - 1];
                di -= l[i] * b[i - 1];
            }
            if (di == 0.0) di = -tiny;
            d[i] = di;
        }
    }

    int negatives() const {
        int c = 0;
        for (double x : d) c += x < 0.0;
        return c;
    }

    std::vector<double> solve(std::vector<double> y) const {
        for (std::size_t i = 1; i < y.size(); ++i) y[i] -= l[i] * y[i - 1];
        for (std::size_t i = 0; i < y.size(); ++i) y[i] /= d[i];
        for (std::size_t i = y.size(); i-- > 1;) y[i - 1] -= l[i] * y[i];
        return y;
    }
};

}  // namespace

int BorderedTridiagonal::negative_count() const {
    const TriLdl f(diag, off);
    int count = f.negatives();
    if (bordered()) {
        const std::vector<double> z = f.solve(border);
        double s = corner;
        for (std::size_t i = 0; i < z.size(); ++i) s -= border[i] * z[i];
        count += s < 0.0;
    }
    return count;
}

Eigen::VectorXd BorderedTridiagonal::solve_shifted(const BorderedTridiagonal& B, double shift,
                                                   const Eigen::VectorXd& y) const {
    const std::size_t m = diag.size();
    std::vector<double> a(m), b(off.size());
    for (std::size_t i = 0; i < m; ++i) a[i] = diag[i] - shift * B.diag[i];
    for (std::size_t i = 0; i < off.size(); ++i) b[i] = off[i] - shift * B.off[i];
    const TriLdl f(a, b);
    std::vector<double> yt(y.data(), y.data() + m);
    Eigen::VectorXd x(static_cast<Eigen::Index>(size()));
    if (!bordered()) {
        const auto s = f.solve(yt);
        for (std::size_t i = 0; i < m; ++i) x[i] = s[i];
        return x;
    }
    std::vector<double> c(m);
    for (std::size_t i = 0; i < m; ++i) c[i] = border[i] - shift * B.border[i];
    const double cc = corner - shift * B.corner;
    const auto zc = f.solve(c);
    const auto zy = f.solve(yt);
    double den = cc, num = y[static_cast<Eigen::Index>(m)];
    for (std::size_t i = 0; i < m; ++i) {
        den -= c[i] * zc[i];
        num -= c[i] * zy[i];
    }
    const double xe = num / den;
    for (std::size_t i = 0; i < m; ++i) x[i] = zy[i] - zc[i] * xe;
    x[static_cast<Eigen::Index>(m)] = xe;
    return x;
}

// ---------------------------------------------------------------- radial basis

RadialBasis::RadialBasis(const Channel& ch, const PotentialSpec& pot, RadialMesh mesh, bool enrich)
    : ch_(ch), pot_(pot), mesh_(std::move(mesh)), enriched_(false), kappa_(ch.kappa.value()), qn_(kElementRule) {
    pot_.validate(ch.dim);
    if (mesh_.nodes.size() < 3) fail(ErrorKind::DomainError, "radial mesh needs at least three nodes");
    gamma_ = extension_exponent(ch, pot.nu);
    enriched_ = enrich && pot_.is_coulomb() && pot_.nu > 0.0 && gamma_ > 0.0 && needs_extension(ch, pot_.nu);
    const GaussRule& rule = gauss_rule(qn_);
    q_.reserve(mesh_.elements() * rule.x.size());
    for (std::size_t e = 0; e < mesh_.elements(); ++e) {
        const double a = mesh_.nodes[e], b = mesh_.nodes[e + 1];
        const double len = b - a, c = 0.5 * (a + b);
        for (std::size_t k = 0; k < rule.x.size(); ++k) {
            QPoint p{};
            p.r = c + 0.5 * len * rule.x[k];
            p.w = 0.5 * len * rule.w[k];
            p.phiL = (b - p.r) / len;
            p.phiR = (p.r - a) / len;
            p.dL = -1.0 / len;
            p.dR = 1.0 / len;
            p.v = pot_(p.r);
            if (enriched_) {
                p.xi = CutoffPair::xi(p.r);
                p.xip = CutoffPair::xi_prime(p.r);
                p.rg = std::pow(p.r, gamma_);
                p.e = pot_.nu * p.xi * p.rg;
                p.ep = pot_.nu * (p.xip * p.rg + p.xi * gamma_ * p.rg / p.r);
            }
            q_.push_back(p);
        }
    }
}

std::size_t RadialBasis::element_of(double r) const {
    const auto& x = mesh_.nodes;
    if (r <= x.front()) return 0;
    if (r >= x.back()) return x.size() - 2;
    return static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin()) - 1;
}

BorderedTridiagonal RadialBasis::assemble(const std::function<void(const QPoint&, double&, double&)>& weights,
                                          double tail_corner) const {
    const std::size_t nh = hats();
    BorderedTridiagonal T;
    T.diag.assign(nh, 0.0);
    T.off.assign(nh > 0 ? nh - 1 : 0, 0.0);
    if (enriched_) T.border.assign(nh, 0.0);
    T.corner = tail_corner;
    const std::size_t ne = mesh_.elements();
    for (std::size_t e = 0; e < ne; ++e) {
        const bool hasL = e >= 1, hasR = e + 1 <= nh;
        const std::size_t iL = e - 1, iR = e;  // hat indices of the element's end nodes
        double LL = 0, RR = 0, LR = 0, LE = 0, RE = 0, EE = 0;
        for (int k = 0; k < qn_; ++k) {
            const QPoint& p = q_[e * qn_ + k];
            double wk, wm;
            weights(p, wk, wm);
            const double kL = p.dL - kappa_ * p.phiL / p.r;
            const double kR = p.dR - kappa_ * p.phiR / p.r;
            LL += wk * kL * kL + wm * p.phiL * p.phiL;
            RR += wk * kR * kR + wm * p.phiR * p.phiR;
            LR += wk * kL * kR + wm * p.phiL * p.phiR;
            if (enriched_) {
                const double kE = p.ep - kappa_ * p.e / p.r;
                LE += wk * kL * kE + wm * p.phiL * p.e;
                RE += wk * kR * kE + wm * p.phiR * p.e;
                EE += wk * kE * kE + wm * p.e * p.e;
            }
        }
        if (hasL) T.diag[iL] += LL;
        if (hasR) T.diag[iR] += RR;
        if (hasL && hasR) T.off[iL] += LR;
        if (enriched_) {
            if (hasL) T.border[iL] += LE;
            if (hasR) T.border[iR] += RE;
            T.corner += EE;
        }
    }
    return T;
}

double RadialBasis::enrichment_tail_schur(double lambda) const {
    const double nu = pot_.nu, g = gamma_, k = kappa_;
    auto f = [&](double r) {
        const double r2g1 = std::pow(r, 2.0 * g - 1.0);
        return nu * nu *
               (r2g1 * (2.0 * g * (g - k) - nu * (1.0 + lambda) * r) / ((1.0 + lambda) * r + nu) +
                (1.0 - lambda) * r2g1 * r);
    };
    return singular_tail(f, mesh_.r_min(), g, 2.0 * nu * g * (g - k));
}

double RadialBasis::enrichment_tail_scale() const {
    const double nu = pot_.nu, g = gamma_, k = kappa_;
    auto f = [&](double r) {
        const double r2g1 = std::pow(r, 2.0 * g - 1.0);
        return nu * nu * ((g - k) * (g - k) * r2g1 / (2.0 * r + nu) + r2g1 * r + nu * r2g1);
    };
    return singular_tail(f, mesh_.r_min(), g, nu * ((g - k) * (g - k) + nu * nu));
}

double RadialBasis::enrichment_tail_gram() const {
    const double a = mesh_.r_min();
    return pot_.nu * pot_.nu * std::pow(a, 2.0 * gamma_ + 1.0) / (2.0 * gamma_ + 1.0);
}

BorderedTridiagonal RadialBasis::schur(double lambda) const {
    for (const QPoint& p : q_)
        if (!(1.0 + lambda - p.v > 0.0)) fail(ErrorKind::DenominatorSignError, "1 + lambda - v <= 0 on the mesh");
    if (!(1.0 + lambda > 0.0)) fail(ErrorKind::DenominatorSignError, "1 + lambda - v <= 0 near r = 0");
    return assemble(
        [lambda](const QPoint& p, double& wk, double& wm) {
            wk = p.w / (1.0 + lambda - p.v);
            wm = p.w * (1.0 - lambda + p.v);
        },
        enriched_ ? enrichment_tail_schur(lambda) : 0.0);
}

BorderedTridiagonal RadialBasis::gram() const {
    return assemble(
        [](const QPoint& p, double& wk, double& wm) {
            wk = 0.0;
            wm = p.w;
        },
        enriched_ ? enrichment_tail_gram() : 0.0);
}

BorderedTridiagonal RadialBasis::scale_form() const {
    return assemble(
        [](const QPoint& p, double& wk, double& wm) {
            wk = p.w / (2.0 - p.v);
            wm = p.w * (1.0 - p.v);
        },
        enriched_ ? enrichment_tail_scale() : 0.0);
}

std::array<double, 2> RadialBasis::enrichment(double r) const {
    if (!enriched_) return {0.0, 0.0};
    const double rg = std::pow(r, gamma_);
    const double x = CutoffPair::xi(r), xp = CutoffPair::xi_prime(r);
    return {pot_.nu * x * rg, pot_.nu * (xp * rg + x * gamma_ * rg / r)};
}

std::array<double, 2> RadialBasis::evaluate(const Eigen::VectorXd& c, double r) const {
    std::array<double, 2> out{0.0, 0.0};
    if (enriched_) {
        const auto e = enrichment(r);
        const double ce = c[static_cast<Eigen::Index>(hats())];
        out[0] += ce * e[0];
        out[1] += ce * e[1];
    }
    if (r < mesh_.r_min() || r > mesh_.r_max()) return out;
    const std::size_t e = element_of(r);
    const double a = mesh_.nodes[e], b = mesh_.nodes[e + 1], len = b - a;
    const double cl = e >= 1 ? c[static_cast<Eigen::Index>(e - 1)] : 0.0;
    const double cr = e + 1 <= hats() ? c[static_cast<Eigen::Index>(e)] : 0.0;
    out[0] += cl * (b - r) / len + cr * (r - a) / len;
    out[1] += (cr - cl) / len;
    return out;
}

Eigen::VectorXd RadialBasis::interpolate(const std::function<double(double)>& f) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < hats(); ++i) c[static_cast<Eigen::Index>(i)] = f(mesh_.nodes[i + 1]);
    return c;
}

RadialBasis::Operator RadialBasis::channel_operator() const {
    const auto nh = static_cast<Eigen::Index>(hats());
    const Eigen::Index n = 2 * nh + (enriched_ ? 1 : 0);
    Operator op;
    op.H = Eigen::MatrixXd::Zero(n, n);
    op.G = Eigen::MatrixXd::Zero(n, n);
    op.D = Eigen::MatrixXd::Zero(nh, nh);
    const Eigen::Index E = 2 * nh;
    const double nu = pot_.nu, gk = gamma_ - kappa_;
    for (std::size_t e = 0; e < mesh_.elements(); ++e) {
        Eigen::Index idx[2];
        bool has[2];
        has[0] = e >= 1;
        has[1] = e + 1 <= hats();
        idx[0] = static_cast<Eigen::Index>(e) - 1;
        idx[1] = static_cast<Eigen::Index>(e);
        for (int k = 0; k < qn_; ++k) {
            const QPoint& p = q_[e * qn_ + k];
            const double phi[2] = {p.phiL, p.phiR}, dphi[2] = {p.dL, p.dR};
            double u1 = 0, u2 = 0;  // xi * phi_{j,1}
            if (enriched_) {
                u1 = nu * p.rg;
                u2 = gk * p.rg;
            }
            for (int a = 0; a < 2; ++a) {
                if (!has[a]) continue;
                const Eigen::Index ia = idx[a];
                for (int b = 0; b < 2; ++b) {
                    if (!has[b]) continue;
                    const Eigen::Index ib = idx[b];
                    const double mm = p.w * phi[a] * phi[b];
                    op.G(ia, ib) += mm;
                    op.G(nh + ia, nh + ib) += mm;
                    op.H(ia, ib) += (1.0 + p.v) * mm;
                    op.H(nh + ia, nh + ib) += (-1.0 + p.v) * mm;
                    op.H(ia, nh + ib) += p.w * phi[a] * (-dphi[b] - kappa_ * phi[b] / p.r);
                    op.D(ia, ib) += p.w * phi[a] * dphi[b];
                }
                if (enriched_) {
                    op.G(ia, E) += p.w * phi[a] * p.xi * u1;
                    op.G(nh + ia, E) += p.w * phi[a] * p.xi * u2;
                    op.H(ia, E) += p.w * phi[a] * (-p.xip * u2 + p.xi * u1);
                    op.H(nh + ia, E) += p.w * phi[a] * (p.xip * u1 - p.xi * u2);
                }
            }
            if (enriched_) {
                const double x2 = p.xi * p.xi;
                op.G(E, E) += p.w * x2 * (u1 * u1 + u2 * u2);
                op.H(E, E) += p.w * x2 * (u1 * u1 - u2 * u2);
            }
        }
    }
    op.H.block(nh, 0, nh, nh) = op.H.block(0, nh, nh, nh).transpose();
    if (enriched_) {
        const double a = mesh_.r_min(), pw = std::pow(a, 2.0 * gamma_ + 1.0) / (2.0 * gamma_ + 1.0);
        op.G(E, E) += (nu * nu + gk * gk) * pw;
        op.H(E, E) += (nu * nu - gk * gk) * pw;
        op.G.row(E).head(E) = op.G.col(E).head(E).transpose();
        op.H.row(E).head(E) = op.H.col(E).head(E).transpose();
    }
    return op;
}

ChannelOperator assemble_channel_operator(const Channel& ch, const PotentialSpec& pot, const RadialMesh& mesh,
                                          bool enrich) {
    if (enrich && !(pot.is_coulomb() && pot.nu > 0.0 && needs_extension(ch, pot.nu)))
        fail(ErrorKind::DomainError, "enrichment needs a Coulomb potential with nu > 0 in an extension channel");
    const RadialBasis basis(ch, pot, mesh, enrich);
    auto op = basis.channel_operator();
    ChannelOperator out;
    out.hats = basis.hats();
    out.enriched = basis.enriched();
    if (out.enriched) {
        // independence of the enrichment column from the hat span: its Gram Schur complement
        const BorderedTridiagonal g = basis.gram();
        const Eigen::Index nh = static_cast<Eigen::Index>(out.hats), E = 2 * nh;
        const TriLdl f(g.diag, g.off);
        double rest = op.G(E, E);
        for (int comp = 0; comp < 2; ++comp) {
            std::vector<double> col(out.hats);
            for (Eigen::Index i = 0; i < nh; ++i) col[i] = op.G(comp * nh + i, E);
            const auto z = f.solve(col);
            for (Eigen::Index i = 0; i < nh; ++i) rest -= col[i] * z[i];
        }
        if (!(rest > 1e-13 * op.G(E, E))) fail(ErrorKind::SingularGram, "enrichment function lies in the hat span");
    }
    out.H = std::move(op.H);
    out.G = std::move(op.G);
    return out;
}

// ---------------------------------------------------------------- core functions

Channel core_channel(int dim, int two_m) {
    check_dim(dim);
    if (two_m != 1 && two_m != -1) fail(ErrorKind::DomainError, "m label must be +1/2 or -1/2");
    if (dim == 2) return make_channel(2, Index2{two_m < 0 ? 0 : -1});
    return make_channel(3, two_m < 0 ? Index3{0, 1} : Index3{1, -1});
}

bool in_core_branch(int dim, double nu) {
    check_dim(dim);
    if (dim == 2) return nu > 0.0 && nu <= 0.5;
    return nu > std::sqrt(3.0) / 2.0 && nu <= 1.0;
}

double core_exponent(int dim, double nu) {
    const double a = inv_core(dim);
    return std::sqrt(std::max(0.0, a * a - nu * nu));
}

namespace {
void require_core_branch(int dim, double nu) {
    check_dim(dim);
    if (nu < 0.0 || nu > inv_core(dim)) fail(ErrorKind::DomainError, "nu outside [0, 1/(4-n)]");
    if (!in_core_branch(dim, nu))
        fail(ErrorKind::OutOfCoreBranch, "trivial branch: the core reduces to {0} for this (n, nu)");
}
}  // namespace

RadialSpinor zeta_channel_profile(int dim, double nu, int two_m, const std::vector<double>& r) {
    require_core_branch(dim, nu);
    RadialSpinor s;
    s.channel = core_channel(dim, two_m);
    const double sigma = core_exponent(dim, nu), k = s.channel.kappa.value();
    s.r = r;
    for (double x : r) {
        const double p = CutoffPair::xi(x) * std::pow(x, sigma);
        s.upper.push_back(nu * p);
        s.lower.push_back((sigma - k) * p);
    }
    return s;
}

std::vector<double> varsigma_profile(int dim, double nu, int two_m, int k, const std::vector<double>& r) {
    require_core_branch(dim, nu);
    core_channel(dim, two_m);
    if (k < 1) fail(ErrorKind::DomainError, "k must be positive");
    const double sigma = core_exponent(dim, nu);
    std::vector<double> out;
    out.reserve(r.size());
    for (double x : r) out.push_back(CutoffPair::upsilon_k(k, x) * std::pow(x, sigma));
    return out;
}

Profile varsigma_function(int dim, double nu, int k) {
    require_core_branch(dim, nu);
    if (k < 1) fail(ErrorKind::DomainError, "k must be positive");
    const double sigma = core_exponent(dim, nu);
    Profile p;
    p.f = [k, sigma](double r) { return CutoffPair::upsilon_k(k, r) * std::pow(r, sigma); };
    p.fp = [k, sigma](double r) {
        const double rs = std::pow(r, sigma);
        return CutoffPair::upsilon_k_prime(k, r) * rs + CutoffPair::upsilon_k(k, r) * sigma * rs / r;
    };
    const double a = 1.0 / k;
    p.breaks = {0.25 * a, 0.5 * a, a};
    if (a < 1.0) p.breaks.push_back(1.0);
    p.breaks.push_back(1.5);
    p.breaks.push_back(2.0);
    return p;
}

namespace {
double ground_lambda(int dim, double nu) {
    const double x = (4.0 - dim) * nu;
    return std::sqrt(std::max(0.0, 1.0 - x * x));
}
}  // namespace

double q_nu_channel(const Channel& ch, double nu, const Profile& f) {
    if (nu < 0.0 || nu > inv_core(ch.dim)) fail(ErrorKind::DomainError, "nu outside [0, 1/(4-n)]");
    if (f.breaks.size() < 2 || !(f.breaks.front() > 0.0))
        fail(ErrorKind::QuadratureFailure, "profile must vanish on a neighbourhood of r = 0");
    const double lam = ground_lambda(ch.dim, nu), k = ch.kappa.value();
    auto g = [&](double r) {
        const double u = f.f(r), d = f.fp(r) - k * u / r;
        return d * d / (1.0 + lam + nu / r) + (1.0 - lam - nu / r) * u * u;
    };
    auto s = [&](double r) {
        const double u = f.f(r), d = f.fp(r) - k * u / r;
        return d * d + (1.0 + nu / r) * u * u;
    };
    const AdaptiveResult v = integrate_panels(g, f.breaks);
    const AdaptiveResult sc = integrate_panels(s, f.breaks);
    if (!std::isfinite(v.value) || v.error > 1e-9 * (std::abs(v.value) + sc.value))
        fail(ErrorKind::QuadratureFailure, "q^nu quadrature did not converge");
    return v.value;
}

double q_nu_channel(const RadialBasis& basis, const Eigen::VectorXd& coeffs) {
    const PotentialSpec& pot = basis.potential();
    if (!pot.is_coulomb()) fail(ErrorKind::InvalidPotential, "q^nu is defined for Coulomb potentials");
    if (coeffs.size() != static_cast<Eigen::Index>(basis.size()))
        fail(ErrorKind::DomainError, "coefficient vector does not match the basis");
    return basis.schur(ground_lambda(basis.channel().dim, pot.nu)).quadratic(coeffs);
}

double analytic_core_bound(int dim, double nu) {
    require_core_branch(dim, nu);
    const double sigma = core_exponent(dim, nu);
    auto a = [&](double t) {
        const double u = CutoffPair::upsilon_prime(t);
        return u * u * std::pow(t, 2.0 * sigma + 1.0);
    };
    auto b = [&](double t) {
        const double x = CutoffPair::xi(t);
        return x * x * std::pow(t, 2.0 * sigma);
    };
    const AdaptiveResult ra = integrate_panels(a, {0.25, 0.5, 1.0, 1.5, 2.0}, 256);
    const AdaptiveResult rb = integrate_panels(b, {0.0, 1.0, 1.5, 2.0}, 256);
    return ra.value / nu + rb.value;
}

CoreSequence core_sequence(int dim, double nu, int two_m, int kmax) {
    require_core_branch(dim, nu);
    if (kmax < 1) fail(ErrorKind::DomainError, "kmax must be positive");
    CoreSequence out;
    out.dim = dim;
    out.nu = nu;
    out.two_m = two_m;
    out.bound = analytic_core_bound(dim, nu);
    const Channel ch = core_channel(dim, two_m);
    const double sigma = core_exponent(dim, nu), a = sigma - inv_core(dim);
    for (int k = 1; k <= kmax; ++k) {
        const Profile p = varsigma_function(dim, nu, k);
        auto g = [&](double t) {
            const double u = CutoffPair::upsilon_k(k, t), up = CutoffPair::upsilon_k_prime(k, t);
            const double d = up * std::pow(t, a) + a * u * std::pow(t, a - 1.0);
            return std::pow(t, dim) / nu * d * d - nu * u * u * std::pow(t, 2.0 * sigma - 1.0) +
                   u * u * std::pow(t, 2.0 * sigma);
        };
        out.values.push_back(integrate_panels(g, p.breaks).value);
        out.q.push_back(q_nu_channel(ch, nu, p));
    }
    return out;
}

}  // namespace diracgap
