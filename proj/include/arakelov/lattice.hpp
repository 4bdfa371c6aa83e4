#pragma once

// Low-rank Euclidean lattice algorithms: Fincke-Pohst enumeration, Lagrange
// (Gauss) reduction, rank-2 closest vectors, and the integral tail bound for
// Gaussian lattice sums.

#include "arakelov/error.hpp"
#include "arakelov/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <type_traits>
#include <vector>

namespace arakelov {

template <std::size_t Rank>
using IntVec = std::array<std::int64_t, Rank>;

template <std::size_t Rank>
struct Lattice {
    static_assert(Rank == 2 || Rank == 3, "only ranks 2 and 3 are supported");
    using Gram = std::array<std::array<double, Rank>, Rank>;
    using ExactGram = std::array<std::array<std::int64_t, Rank>, Rank>;

    std::array<Vec3, Rank> basis{};  // basis vectors in R^3 (zero when built from a Gram matrix)
    Gram gram{};
    std::optional<ExactGram> exact_gram;  // integer Gram matrix when the lattice has one

    static Lattice from_basis(const std::array<Vec3, Rank>& b) {
        Lattice l;
        l.basis = b;
        for (std::size_t i = 0; i < Rank; ++i)
            for (std::size_t j = 0; j < Rank; ++j) l.gram[i][j] = dot(b[i], b[j]);
        return l;
    }

    static Lattice from_gram(const Gram& g) {
        Lattice l;
        l.gram = g;
        return l;
    }

    static Lattice from_exact_gram(const ExactGram& g) {
        Lattice l;
        l.exact_gram = g;
        for (std::size_t i = 0; i < Rank; ++i)
            for (std::size_t j = 0; j < Rank; ++j) l.gram[i][j] = static_cast<double>(g[i][j]);
        return l;
    }

    /// Squared length of the lattice vector with the given coordinates. Exact
    /// (then rounded once) when an integer Gram matrix is present.
    double sq_length(const IntVec<Rank>& x) const {
        if (exact_gram) {
            __int128 s = 0;
            for (std::size_t i = 0; i < Rank; ++i)
                for (std::size_t j = 0; j < Rank; ++j)
                    s += static_cast<__int128>(x[i]) * (*exact_gram)[i][j] * x[j];
            return static_cast<double>(s);
        }
        long double s = 0;
        for (std::size_t i = 0; i < Rank; ++i)
            for (std::size_t j = 0; j < Rank; ++j)
                s += static_cast<long double>(x[i]) * gram[i][j] * static_cast<long double>(x[j]);
        return static_cast<double>(s);
    }

    Vec3 vector(const IntVec<Rank>& x) const {
        Vec3 v{};
        for (std::size_t i = 0; i < Rank; ++i) v = v + static_cast<double>(x[i]) * basis[i];
        return v;
    }

    double determinant() const {
        if constexpr (Rank == 2) {
            return gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
        } else {
            const auto& g = gram;
            return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                   g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                   g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
        }
    }

    double covolume() const { return std::sqrt(determinant()); }
};

template <std::size_t Rank>
struct ShortVector {
    IntVec<Rank> coords{};
    double sq_length = 0.0;
};

/// Every nonzero lattice vector with squared length <= bound, one per +-pair
/// (first nonzero coordinate positive), sorted by squared length.
template <std::size_t Rank>
struct ShortVectorList {
    double bound = 0.0;
    std::vector<ShortVector<Rank>> entries;
};

namespace detail {

// Quadratic-form decomposition Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2.
template <std::size_t Rank>
std::array<std::array<long double, Rank>, Rank> fincke_pohst_form(
    const std::array<std::array<double, Rank>, Rank>& gram) {
    std::array<std::array<long double, Rank>, Rank> q{};
    for (std::size_t i = 0; i < Rank; ++i)
        for (std::size_t j = 0; j < Rank; ++j) q[i][j] = gram[i][j];
    for (std::size_t i = 0; i < Rank; ++i) {
        if (!(q[i][i] > 0)) throw DegenerateLatticeError("Gram matrix is not positive definite");
        for (std::size_t j = i + 1; j < Rank; ++j) {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for (std::size_t k = i + 1; k < Rank; ++k)
            for (std::size_t l = k; l < Rank; ++l) q[k][l] -= q[k][i] * q[i][l];
    }
    return q;
}

template <std::size_t Rank>
bool canonical_sign(const IntVec<Rank>& x) {
    for (auto c : x) {
        if (c > 0) return true;
        if (c < 0) return false;
    }
    return false;  // zero vector
}

template <std::size_t Rank>
void enumerate_level(const std::array<std::array<long double, Rank>, Rank>& q, std::size_t level,
                     long double remaining, IntVec<Rank>& x, std::vector<IntVec<Rank>>& out) {
    long double center = 0;
    for (std::size_t j = level + 1; j < Rank; ++j) center -= q[level][j] * static_cast<long double>(x[j]);
    const long double radius = std::sqrt(std::max<long double>(remaining, 0) / q[level][level]);
    const long double slack = 1e-9L * (1 + radius);
    const auto lo = static_cast<std::int64_t>(std::ceil(center - radius - slack));
    const auto hi = static_cast<std::int64_t>(std::floor(center + radius + slack));
    for (std::int64_t xi = lo; xi <= hi; ++xi) {
        x[level] = xi;
        const long double t = static_cast<long double>(xi) - center;
        const long double rest = remaining - q[level][level] * t * t;
        if (rest < -1e-9L * (1 + remaining)) continue;
        if (level == 0) {
            if (canonical_sign(x)) out.push_back(x);
        } else {
            enumerate_level(q, level - 1, rest, x, out);
        }
    }
    x[level] = 0;
}

} // namespace detail

/// Fincke-Pohst enumeration of all nonzero vectors with squared length at most
/// bound * (1 + 1e-12).
template <std::size_t Rank>
ShortVectorList<Rank> enumerate_short(const Lattice<Rank>& lat, double bound) {
    if (!std::isfinite(bound)) throw DomainError("enumeration bound must be finite");
    ShortVectorList<Rank> result;
    result.bound = bound;
    if (bound <= 0) {
        (void)detail::fincke_pohst_form<Rank>(lat.gram);
        return result;
    }
    const auto q = detail::fincke_pohst_form<Rank>(lat.gram);
    std::vector<IntVec<Rank>> raw;
    IntVec<Rank> x{};
    const long double search = static_cast<long double>(bound) * (1 + 1e-9L);
    detail::enumerate_level<Rank>(q, Rank - 1, search, x, raw);

    const double accept = bound * (1 + 1e-12);
    result.entries.reserve(raw.size());
    for (const auto& v : raw) {
        const double s = lat.sq_length(v);
        if (s <= accept) result.entries.push_back({v, s});
    }
    std::sort(result.entries.begin(), result.entries.end(), [](const auto& a, const auto& b) {
        if (a.sq_length != b.sq_length) return a.sq_length < b.sq_length;
        return a.coords < b.coords;
    });
    return result;
}

// ---------------------------------------------------------------------------
// Rank-2 reduction

/// Result of Lagrange reduction: the reduced Gram matrix and the integer
/// transform, new_b[k] = sum_j transform[k][j] * old_b[j].
template <typename T>
struct LagrangeResult {
    std::array<std::array<T, 2>, 2> gram{};
    std::array<std::array<std::int64_t, 2>, 2> transform{{{1, 0}, {0, 1}}};
};

namespace detail {

// Nearest integer to num/den (den > 0), ties toward zero.
inline std::int64_t round_ties_to_zero(std::int64_t num, std::int64_t den) {
    if (2 * (num < 0 ? -num : num) <= den) return 0;
    const __int128 n2 = 2 * static_cast<__int128>(num) + den;
    const __int128 d2 = 2 * static_cast<__int128>(den);
    __int128 q = n2 / d2;
    if (n2 % d2 != 0 && ((n2 < 0) != (d2 < 0))) --q;
    return static_cast<std::int64_t>(q);
}

inline std::int64_t round_ties_to_zero(double num, double den) {
    if (2 * std::fabs(num) <= den) return 0;
    const double r = num / den;
    double m = std::round(r);
    if (std::fabs(r - std::trunc(r)) == 0.5) m = std::trunc(r);
    return static_cast<std::int64_t>(m);
}

} // namespace detail

/// Lagrange-Gauss reduction on a 2x2 Gram matrix. Works on exact integer
/// Gram matrices as well as floating ones.
template <typename T>
LagrangeResult<T> lagrange_reduce_gram(std::array<std::array<T, 2>, 2> g) {
    const auto det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if constexpr (std::is_floating_point_v<T>) {
        if (!(g[0][0] > 0) || !(g[1][1] > 0) || !(det > 1e-13 * g[0][0] * g[1][1]))
            throw DegenerateLatticeError("dependent rank-2 basis");
    } else {
        if (g[0][0] <= 0 || g[1][1] <= 0 || det <= 0) throw DegenerateLatticeError("dependent rank-2 basis");
    }
    LagrangeResult<T> r;
    auto& t = r.transform;
    for (int iter = 0; iter < 10000; ++iter) {
        if (g[0][0] > g[1][1]) {
            std::swap(g[0][0], g[1][1]);
            std::swap(t[0], t[1]);
        }
        const std::int64_t mu = detail::round_ties_to_zero(g[0][1], g[0][0]);
        if (mu == 0) break;
        const T m = static_cast<T>(mu);
        g[1][1] = g[1][1] - 2 * m * g[0][1] + m * m * g[0][0];
        g[0][1] = g[0][1] - m * g[0][0];
        g[1][0] = g[0][1];
        t[1][0] -= mu * t[0][0];
        t[1][1] -= mu * t[0][1];
    }
    g[1][0] = g[0][1];
    r.gram = g;
    return r;
}

template <std::size_t D>
struct ReducedPair {
    std::array<double, D> b1{};
    std::array<double, D> b2{};
    std::array<std::array<std::int64_t, 2>, 2> transform{};
};

/// Lagrange reduction of two real vectors: ||b1|| <= ||b2|| <= ||b2 +- b1||.
template <std::size_t D>
ReducedPair<D> lagrange_reduce(const std::array<double, D>& b1, const std::array<double, D>& b2) {
    std::array<std::array<double, 2>, 2> g{{{dot(b1, b1), dot(b1, b2)}, {dot(b1, b2), dot(b2, b2)}}};
    const auto red = lagrange_reduce_gram(g);
    ReducedPair<D> out;
    out.transform = red.transform;
    const auto& t = red.transform;
    out.b1 = static_cast<double>(t[0][0]) * b1 + static_cast<double>(t[0][1]) * b2;
    out.b2 = static_cast<double>(t[1][0]) * b1 + static_cast<double>(t[1][1]) * b2;
    return out;
}

struct ClosestVector {
    std::array<std::int64_t, 2> coeffs{};
    Vec3 vector{};
    double distance = 0.0;
};

/// Closest lattice vector to target for a reduced rank-2 lattice. The
/// candidates are the integer points around the rounded real coordinates;
/// exact distance ties go to the lexicographically smaller coefficient pair.
inline ClosestVector closest_vector_rank2(const Lattice<2>& lat, const Vec3& target) {
    const auto& g = lat.gram;
    const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if (!(det > 0)) throw DegenerateLatticeError("rank-2 lattice is degenerate");
    const double r0 = dot(lat.basis[0], target);
    const double r1 = dot(lat.basis[1], target);
    const double c0 = (g[1][1] * r0 - g[0][1] * r1) / det;
    const double c1 = (g[0][0] * r1 - g[1][0] * r0) / det;
    const auto k0 = static_cast<std::int64_t>(std::floor(c0));
    const auto k1 = static_cast<std::int64_t>(std::floor(c1));

    ClosestVector best;
    bool have = false;
    for (std::int64_t d0 = -1; d0 <= 2; ++d0) {
        for (std::int64_t d1 = -1; d1 <= 2; ++d1) {
            const std::array<std::int64_t, 2> k{k0 + d0, k1 + d1};
            const Vec3 v = static_cast<double>(k[0]) * lat.basis[0] + static_cast<double>(k[1]) * lat.basis[1];
            const double dist = norm(target - v);
            if (!have || dist < best.distance || (dist == best.distance && k < best.coeffs)) {
                best = {k, v, dist};
                have = true;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Gaussian tail bound

struct TailBoundParams {
    double alpha = 0.0;  // Gaussian exponent
    double M = 0.0;      // squared-length cutoff
    double a = 0.0;      // lower bound on the shortest vector length
};

namespace detail {

// Upper incomplete gamma Gamma(s, x) for s in {3/2, 2, 5/2}.
inline long double upper_gamma_3_2(long double x) {
    return std::sqrt(x) * std::exp(-x) + std::sqrt(std::numbers::pi_v<long double>) / 2 * std::erfc(std::sqrt(x));
}
inline long double upper_gamma_2(long double x) { return (1 + x) * std::exp(-x); }
inline long double upper_gamma_5_2(long double x) {
    return x * std::sqrt(x) * std::exp(-x) + 1.5L * upper_gamma_3_2(x);
}

} // namespace detail

/// alpha * int_M^inf ((2 sqrt(t)/a + 1)^3 - (2 sqrt(M)/a - 1)^3) e^{-alpha t} dt
/// in closed form. For any rank-3 lattice whose nonzero vectors have length
/// at least a (and M >= shortest squared length), this bounds
/// sum_{||x||^2 >= M} e^{-alpha ||x||^2}.
inline double tail_bound(const TailBoundParams& p) {
    if (!(p.alpha > 0) || !(p.a > 0) || !(p.M >= p.a * p.a) || !std::isfinite(p.M))
        throw DomainError("tail bound requires alpha > 0 and M >= a^2 > 0");
    const long double al = p.alpha;
    const long double a = p.a;
    const long double x = al * static_cast<long double>(p.M);
    const long double c = std::pow(2 * std::sqrt(static_cast<long double>(p.M)) / a - 1, 3);
    // (2 sqrt(t)/a + 1)^3 = 8 t^{3/2}/a^3 + 12 t/a^2 + 6 sqrt(t)/a + 1, and
    // alpha * int_M^inf t^s e^{-alpha t} dt = alpha^{-s} Gamma(s + 1, alpha M).
    const long double v = 8 / (a * a * a) * std::pow(al, -1.5L) * detail::upper_gamma_5_2(x) +
                          12 / (a * a) / al * detail::upper_gamma_2(x) +
                          6 / a / std::sqrt(al) * detail::upper_gamma_3_2(x) + (1 - c) * std::exp(-x);
    return static_cast<double>(v);
}

/// Smallest cutoff M (to bisection precision) with tail_bound(alpha, M, a) <= tol.
inline double tail_cutoff(double alpha, double a, double tol) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    double lo = a * a;
    if (tail_bound({alpha, lo, a}) <= tol) return lo;
    double hi = std::max(2 * lo, 1.0);
    while (tail_bound({alpha, hi, a}) > tol) {
        lo = hi;
        hi *= 2;
        if (hi > 1e12) throw DomainError("tolerance too small for tail cutoff");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail_bound({alpha, mid, a}) <= tol ? hi : lo) = mid;
    }
    return hi;
}

} // namespace arakelov
