#pragma once

#include <compare>
#include <string>
#include <variant>
#include <vector>

namespace diracgap {

/// Exact half-integer, stored as twice its value.
struct HalfInt {
    int twice = 0;

    static constexpr HalfInt from_twice(int t) { return HalfInt{t}; }
    static constexpr HalfInt from_int(int v) { return HalfInt{2 * v}; }
    constexpr double value() const { return 0.5 * twice; }
    constexpr bool is_integer() const { return twice % 2 == 0; }
    constexpr HalfInt abs() const { return HalfInt{twice < 0 ? -twice : twice}; }
    constexpr HalfInt operator-() const { return HalfInt{-twice}; }
    friend constexpr auto operator<=>(HalfInt, HalfInt) = default;
    std::string str() const;
};

enum class Parity { plus, minus };
const char* parity_name(Parity p);

struct Index2 {
    int k = 0;
    friend constexpr bool operator==(Index2, Index2) = default;
};

/// 3D sector (l, s); the magnetic label m is a pure degeneracy and is dropped.
struct Index3 {
    int l = 0;
    int two_s = 1;  // +1 or -1
    friend constexpr bool operator==(Index3, Index3) = default;
};

using ChannelIndex = std::variant<Index2, Index3>;

struct Channel {
    int dim = 3;
    ChannelIndex index;
    HalfInt kappa;
    Parity parity = Parity::plus;
    int degeneracy = 1;

    std::string label() const;
    friend bool operator==(const Channel& a, const Channel& b) { return a.dim == b.dim && a.index == b.index; }
};

void validate_index(int dim, const ChannelIndex& idx);
HalfInt kappa_of(int dim, const ChannelIndex& idx);
ChannelIndex apply_T(int dim, const ChannelIndex& idx);
ChannelIndex apply_T_inverse(int dim, const ChannelIndex& idx);
Parity parity_of(int dim, const ChannelIndex& idx);
double coupling_c(int dim, const ChannelIndex& idx);

Channel make_channel(int dim, const ChannelIndex& idx);
Channel channel_from_kappa(int dim, HalfInt kappa);

/// Channels with |kappa| <= kappa_max ordered by |kappa|, negative sign first.
std::vector<Channel> enumerate_channels(int dim, double kappa_max);

/// Order j of the momentum Coulomb form q_j acting on this channel: |k|-1/2 in 2D, l in 3D.
HalfInt coulomb_order(const Channel& ch);

}  // namespace diracgap
