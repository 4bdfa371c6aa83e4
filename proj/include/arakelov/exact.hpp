#pragma once

// Exact integer / rational helpers. Everything here that decides a
// mathematical fact (integrality, norms, polynomial identities) runs on
// arbitrary precision integers.

#include "arakelov/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace arakelov {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
                                              boost::multiprecision::et_off>;

template <typename T>
using Mat3Of = std::array<std::array<T, 3>, 3>;

using IntMat3 = Mat3Of<std::int64_t>;
using RatMat3 = Mat3Of<Rational>;

inline std::int64_t to_int64(const BigInt& v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw NumericPrecisionError("integer does not fit in 64 bits");
    return static_cast<std::int64_t>(v);
}

inline long double to_long_double(const Rational& r) {
    return boost::multiprecision::numerator(r).convert_to<long double>() /
           boost::multiprecision::denominator(r).convert_to<long double>();
}

inline bool is_integer(const Rational& r) {
    return boost::multiprecision::denominator(r) == 1;
}

inline BigInt integer_part(const Rational& r) {
    return boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
}

/// Floor of the square root, exact.
inline BigInt isqrt(const BigInt& n) {
    if (n < 0) throw DomainError("isqrt of negative number");
    return boost::multiprecision::sqrt(n);
}

inline bool is_perfect_square(const BigInt& n) {
    if (n < 0) return false;
    BigInt r = isqrt(n);
    return r * r == n;
}

template <typename T>
T det3(const Mat3Of<T>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <typename T>
Mat3Of<T> adjugate3(const Mat3Of<T>& m) {
    Mat3Of<T> a;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            a[i][j] = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        }
    }
    return a;
}

inline RatMat3 inverse3(const RatMat3& m) {
    const Rational d = det3(m);
    if (d == 0) throw DegenerateLatticeError("singular 3x3 matrix");
    RatMat3 a = adjugate3(m);
    for (auto& row : a)
        for (auto& x : row) x /= d;
    return a;
}

template <typename T>
std::array<T, 3> mat_vec(const Mat3Of<T>& m, const std::array<T, 3>& v) {
    std::array<T, 3> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i] += m[i][j] * v[j];
    return r;
}

template <typename T>
Mat3Of<T> mat_mul(const Mat3Of<T>& a, const Mat3Of<T>& b) {
    Mat3Of<T> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

/// Best rational approximation of x with denominator at most max_den
/// (continued-fraction convergents).
inline Rational rationalize(long double x, std::int64_t max_den) {
    BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    long double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        const long double a = std::floor(r);
        if (std::fabs(a) > 1e18L) break;
        const BigInt ai = static_cast<long long>(a);
        BigInt p2 = ai * p1 + p0;
        BigInt q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const long double frac = r - a;
        const long double approx = p1.convert_to<long double>() / q1.convert_to<long double>();
        if (frac < 1e-30L || std::fabs(approx - x) <= 1e-17L * (1.0L + std::fabs(x))) break;
        r = 1.0L / frac;
    }
    if (q1 == 0) return Rational(static_cast<long long>(std::llround(x)));
    return Rational(p1, q1);
}

/// Polynomials over Q as coefficient vectors, lowest degree first.
using RatPoly = std::vector<Rational>;

inline RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
    if (a.empty() || b.empty()) return {};
    RatPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

/// Reduce modulo the monic cubic X^3 + c2 X^2 + c1 X + c0; result has 3 coefficients.
inline std::array<Rational, 3> poly_mod_cubic(RatPoly a, const std::array<std::int64_t, 3>& c) {
    for (std::size_t d = a.size(); d-- > 3;) {
        const Rational lead = a[d];
        if (lead == 0) continue;
        // X^d = X^(d-3) * X^3 = -X^(d-3) (c2 X^2 + c1 X + c0)
        a[d - 1] -= lead * c[0];
        a[d - 2] -= lead * c[1];
        a[d - 3] -= lead * c[2];
        a[d] = 0;
    }
    a.resize(3);
    return {a[0], a[1], a[2]};
}

/// Evaluate g(h(X)) mod the cubic, where g is given by its coefficients.
inline std::array<Rational, 3> compose_mod_cubic(const RatPoly& g, const std::array<Rational, 3>& h,
                                                 const std::array<std::int64_t, 3>& c) {
    const RatPoly hp(h.begin(), h.end());
    std::array<Rational, 3> acc{0, 0, 0};
    for (std::size_t d = g.size(); d-- > 0;) {
        // Horner: acc = acc * h + g[d]
        RatPoly prod = poly_mul(RatPoly(acc.begin(), acc.end()), hp);
        prod.resize(std::max<std::size_t>(prod.size(), 1));
        prod[0] += g[d];
        acc = poly_mod_cubic(prod, c);
    }
    return acc;
}

/// Column Hermite-style triangularization: returns an upper triangular integer
/// basis (columns) of the lattice spanned by the given full-rank generators.
/// Column k has zero entries below row k; diagonal entries are positive and
/// off-diagonal entries of each row are reduced into [0, diagonal).
inline Mat3Of<BigInt> hermite_upper(std::vector<std::array<BigInt, 3>> gens) {
    Mat3Of<BigInt> h{};
    std::vector<std::array<BigInt, 3>> pool = std::move(gens);
    for (int row = 2; row >= 0; --row) {
        // Euclid on the entries of this row across the pool.
        for (;;) {
            std::size_t best = pool.size();
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (pool[i][row] == 0) continue;
                if (best == pool.size() || abs(pool[i][row]) < abs(pool[best][row])) best = i;
            }
            if (best == pool.size()) throw DegenerateLatticeError("generators do not span a full-rank lattice");
            bool reduced_any = false;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (i == best || pool[i][row] == 0) continue;
                const BigInt q = pool[i][row] / pool[best][row];
                for (int k = 0; k < 3; ++k) pool[i][k] -= q * pool[best][k];
                reduced_any = true;
            }
            bool others_zero = true;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (i != best && pool[i][row] != 0) others_zero = false;
            if (others_zero) {
                auto pivot = pool[best];
                if (pivot[row] < 0)
                    for (auto& x : pivot) x = -x;
                for (int k = 0; k < 3; ++k) h[k][row] = pivot[k];
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
                break;
            }
            if (!reduced_any) throw NumericPrecisionError("hermite reduction stalled");
        }
    }
    // Reduce entries above the diagonal.
    for (int col = 1; col < 3; ++col) {
        for (int row = col - 1; row >= 0; --row) {
            BigInt q = h[row][col] / h[row][row];
            if (h[row][col] - q * h[row][row] < 0) q -= 1;
            for (int k = 0; k < 3; ++k) h[k][col] -= q * h[k][row];
        }
    }
    return h;
}

/// Prime factors (without multiplicity) of |n|, by trial division.
inline std::vector<std::int64_t> prime_factors(std::int64_t n) {
    std::vector<std::int64_t> out;
    std::uint64_t m = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % p != 0) continue;
        out.push_back(static_cast<std::int64_t>(p));
        while (m % p == 0) m /= p;
    }
    if (m > 1) out.push_back(static_cast<std::int64_t>(m));
    return out;
}

} // namespace arakelov
