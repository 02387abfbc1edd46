#include "diracgap/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "diracgap/errors.hpp"
#include "diracgap/kernel.hpp"

namespace diracgap {

std::string HalfInt::str() const {
    if (is_integer()) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

const char* parity_name(Parity p) { return p == Parity::plus ? "plus" : "minus"; }

void validate_index(int dim, const ChannelIndex& idx) {
    if (dim == 2) {
        if (!std::holds_alternative<Index2>(idx)) fail(ErrorKind::InvalidChannel, "2D channel needs an integer index k");
        return;
    }
    if (dim != 3) fail(ErrorKind::InvalidChannel, "dimension must be 2 or 3");
    const auto* i3 = std::get_if<Index3>(&idx);
    if (!i3) fail(ErrorKind::InvalidChannel, "3D channel needs an index (l, s)");
    if (i3->two_s != 1 && i3->two_s != -1) fail(ErrorKind::InvalidChannel, "s must be +1/2 or -1/2");
    if (i3->l < 0) fail(ErrorKind::InvalidChannel, "l must be non-negative");
    if (i3->l == 0 && i3->two_s == -1) fail(ErrorKind::InvalidChannel, "(l=0, s=-1/2) is not a channel");
}

HalfInt kappa_of(int dim, const ChannelIndex& idx) {
    validate_index(dim, idx);
    if (dim == 2) return HalfInt::from_twice(2 * std::get<Index2>(idx).k + 1);
    const auto& i = std::get<Index3>(idx);
    // 2sl + s + 1/2, doubled
    return HalfInt::from_twice(2 * i.two_s * i.l + i.two_s + 1);
}

ChannelIndex apply_T(int dim, const ChannelIndex& idx) {
    validate_index(dim, idx);
    if (dim == 2) return Index2{std::get<Index2>(idx).k + 1};
    const auto& i = std::get<Index3>(idx);
    return Index3{i.l + i.two_s, -i.two_s};
}

ChannelIndex apply_T_inverse(int dim, const ChannelIndex& idx) {
    validate_index(dim, idx);
    if (dim == 2) return Index2{std::get<Index2>(idx).k - 1};
    const auto& i = std::get<Index3>(idx);
    return Index3{i.l + i.two_s, -i.two_s};
}

Parity parity_of(int dim, const ChannelIndex& idx) {
    validate_index(dim, idx);
    if (dim == 2) return (std::get<Index2>(idx).k % 2 == 0) ? Parity::plus : Parity::minus;
    return std::get<Index3>(idx).two_s == 1 ? Parity::plus : Parity::minus;
}

double coupling_c(int dim, const ChannelIndex& idx) {
    const double c = kato_constant(dim);
    return parity_of(dim, idx) == Parity::plus ? c : 1.0 / c;
}

Channel make_channel(int dim, const ChannelIndex& idx) {
    Channel ch;
    ch.dim = dim;
    ch.index = idx;
    ch.kappa = kappa_of(dim, idx);
    ch.parity = parity_of(dim, idx);
    ch.degeneracy = dim == 2 ? 1 : std::abs(ch.kappa.twice);
    return ch;
}

Channel channel_from_kappa(int dim, HalfInt kappa) {
    if (dim == 2) {
        if (kappa.is_integer()) fail(ErrorKind::InvalidChannel, "2D kappa must be a half-odd integer");
        return make_channel(2, Index2{(kappa.twice - 1) / 2});
    }
    if (dim != 3) fail(ErrorKind::InvalidChannel, "dimension must be 2 or 3");
    if (!kappa.is_integer() || kappa.twice == 0) fail(ErrorKind::InvalidChannel, "3D kappa must be a nonzero integer");
    const int kv = kappa.twice / 2;
    if (kv > 0) return make_channel(3, Index3{kv - 1, 1});
    return make_channel(3, Index3{-kv, -1});
}

std::vector<Channel> enumerate_channels(int dim, double kappa_max) {
    const double lo = dim == 2 ? 0.5 : 1.0;
    if (dim != 2 && dim != 3) fail(ErrorKind::InvalidChannel, "dimension must be 2 or 3");
    if (!(kappa_max >= lo)) fail(ErrorKind::DomainError, "kappa_max below the smallest |kappa|");
    std::vector<Channel> out;
    const int start = dim == 2 ? 1 : 2;  // doubled |kappa|
    const int lim = static_cast<int>(std::floor(2.0 * kappa_max + 1e-9));
    for (int t = start; t <= lim; t += 2) {
        out.push_back(channel_from_kappa(dim, HalfInt::from_twice(-t)));
        out.push_back(channel_from_kappa(dim, HalfInt::from_twice(t)));
    }
    return out;
}

HalfInt coulomb_order(const Channel& ch) {
    if (ch.dim == 2) {
        const int k = std::get<Index2>(ch.index).k;
        return HalfInt::from_twice(2 * std::abs(k) - 1);
    }
    return HalfInt::from_int(std::get<Index3>(ch.index).l);
}

std::string Channel::label() const {
    if (dim == 2) return "k=" + std::to_string(std::get<Index2>(index).k);
    const auto& i = std::get<Index3>(index);
    return "l=" + std::to_string(i.l) + ",s=" + (i.two_s > 0 ? "+1/2" : "-1/2");
}

}  // namespace diracgap
