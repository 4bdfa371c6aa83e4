#pragma once

// Unit log-lattice of a totally real cubic order: fundamental units by
// norm-one search, the reduced basis (b1, b2), the fundamental domain F and
// the short-unit ball B(w).

#include "arakelov/error.hpp"
#include "arakelov/field.hpp"
#include "arakelov/lattice.hpp"
#include "arakelov/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace arakelov {

struct UnitLattice {
    FieldElement eps1;
    FieldElement eps2;
    Vec3 b1{};  // log |Phi(eps1)|
    Vec3 b2{};  // log |Phi(eps2)|
    double lambda1 = 0.0;
    bool hexagonal = false;
    double search_bound = 0.0;  // last squared-length radius of the unit search

    Lattice<2> lattice() const { return Lattice<2>::from_basis({b1, b2}); }
};

/// A point w of the trace-zero plane, reduced into F = {a1 b1 + a2 b2 : ai in (-1/2, 1/2]}.
struct TorusPoint {
    Vec3 w{};                              // reduced representative
    std::array<double, 2> alpha{};         // coordinates in (b1, b2)
    std::array<std::int64_t, 2> shift{};  // original w = w + shift[0] b1 + shift[1] b2
};

struct BallUnit {
    FieldElement unit;
    std::array<std::int64_t, 2> exponents{};  // unit = sign * eps1^e0 * eps2^e1
    int sign = 1;
    double distance = 0.0;  // ||log|unit| - w||
};

namespace detail {

struct LogUnit {
    FieldElement unit;
    Vec3 log{};
};

inline LogUnit make_log_unit(const OrderBasis& ob, const FieldElement& u) { return {u, log_embedding(ob, u)}; }

inline LogUnit combine(const OrderBasis& ob, const LogUnit& a, std::int64_t ka, const LogUnit& b, std::int64_t kb) {
    const FieldElement u = mul(ob, unit_power(ob, a.unit, ka), unit_power(ob, b.unit, kb));
    return make_log_unit(ob, u);
}

constexpr double kLogZero = 1e-7;

inline bool independent(const Vec3& a, const Vec3& b) {
    return norm(cross(a, b)) > 1e-7 * norm(a) * norm(b);
}

// Basis (rank 0, 1 or 2) of the subgroup of the log lattice generated by gens.
// Each round takes the two shortest independent generators, reduces them, and
// replaces every other generator by its remainder modulo their span; the
// remainders are strictly shorter than the second basis vector, so the
// multiset of lengths decreases and the loop terminates.
inline std::vector<LogUnit> generate_log_lattice(const OrderBasis& ob, std::vector<LogUnit> gens) {
    for (int round = 0; round < 1000; ++round) {
        gens.erase(std::remove_if(gens.begin(), gens.end(), [](const LogUnit& g) { return norm(g.log) < kLogZero; }),
                   gens.end());
        if (gens.empty()) return {};
        std::stable_sort(gens.begin(), gens.end(),
                         [](const LogUnit& a, const LogUnit& b) { return dot(a.log, a.log) < dot(b.log, b.log); });
        const LogUnit first = gens.front();
        std::optional<std::size_t> second;
        for (std::size_t i = 1; i < gens.size(); ++i)
            if (independent(first.log, gens[i].log)) {
                second = i;
                break;
            }

        std::vector<LogUnit> rest;
        bool changed = false;
        if (!second) {
            // Rank one: Euclid along the common line.
            const double gg = dot(first.log, first.log);
            for (std::size_t i = 1; i < gens.size(); ++i) {
                const auto k = static_cast<std::int64_t>(std::llround(dot(gens[i].log, first.log) / gg));
                const LogUnit r = k == 0 ? gens[i] : combine(ob, gens[i], 1, first, -k);
                if (norm(r.log) >= kLogZero) {
                    rest.push_back(r);
                    changed = true;
                }
            }
            if (!changed) return {first};
            rest.push_back(first);
            gens = std::move(rest);
            continue;
        }

        const auto red = lagrange_reduce(first.log, gens[*second].log);
        const auto& t = red.transform;
        LogUnit b1 = combine(ob, first, t[0][0], gens[*second], t[0][1]);
        LogUnit b2 = combine(ob, first, t[1][0], gens[*second], t[1][1]);
        const auto lat = Lattice<2>::from_basis({b1.log, b2.log});
        for (std::size_t i = 1; i < gens.size(); ++i) {
            if (i == *second) continue;
            const auto cv = closest_vector_rank2(lat, gens[i].log);
            if (norm(gens[i].log - cv.vector) < kLogZero) continue;
            const FieldElement r = mul(ob, gens[i].unit,
                                       mul(ob, unit_power(ob, b1.unit, -cv.coeffs[0]), unit_power(ob, b2.unit, -cv.coeffs[1])));
            rest.push_back(make_log_unit(ob, r));
            changed = true;
        }
        if (!changed) return {b1, b2};
        rest.push_back(b1);
        rest.push_back(b2);
        gens = std::move(rest);
    }
    throw NumericPrecisionError("unit lattice generation did not converge");
}

inline bool same_lattice(const std::vector<LogUnit>& a, const std::vector<LogUnit>& b) {
    if (a.size() != 2 || b.size() != 2) return false;
    const auto la = Lattice<2>::from_basis({a[0].log, a[1].log});
    const auto lb = Lattice<2>::from_basis({b[0].log, b[1].log});
    if (std::fabs(la.covolume() - lb.covolume()) > 1e-9 * la.covolume()) return false;
    for (const auto& v : b)
        if (closest_vector_rank2(la, v.log).distance > 1e-7) return false;
    return true;
}

inline bool lex_greater(const Vec3& a, const Vec3& b) {
    for (int i = 0; i < 3; ++i) {
        if (std::fabs(a[i] - b[i]) <= 1e-9) continue;
        return a[i] > b[i];
    }
    return false;
}

inline bool is_hexagonal(const Vec3& b1, const Vec3& b2) {
    const double l1 = norm(b1), l2 = norm(b2);
    return std::fabs(l1 - l2) < 1e-9 && (std::fabs(norm(b2 - b1) - l1) < 1e-9 || std::fabs(norm(b2 + b1) - l1) < 1e-9);
}

} // namespace detail

/// Fundamental units: enumerate O_F with a growing radius, keep elements of
/// exact norm +-1, and stop once the generated log lattice has rank 2 and has
/// not changed over two further doublings.
inline UnitLattice find_units(const OrderBasis& ob) {
    const double scale = ob.conductor ? static_cast<double>(*ob.conductor) : std::round(ob.covolume);
    const double cap = 1024 * scale;
    const auto lat = ob.lattice();

    std::vector<detail::LogUnit> seeds;
    for (std::int64_t k = -2; k <= 2; ++k) {
        const FieldElement c = from_power_basis(ob, {Rational(-k), Rational(1), Rational(0)});  // theta - k
        if (abs(elem_norm_exact(ob, c)) == 1) seeds.push_back(detail::make_log_unit(ob, c));
    }

    std::vector<detail::LogUnit> previous;
    int stable = 0;
    double radius = 2 * scale + 2;
    for (;;) {
        std::vector<detail::LogUnit> gens = seeds;
        gens.insert(gens.end(), previous.begin(), previous.end());
        for (const auto& e : enumerate_short(lat, radius).entries) {
            const FieldElement f{e.coords};
            if (f == one()) continue;
            if (abs(elem_norm_exact(ob, f)) == 1) gens.push_back(detail::make_log_unit(ob, f));
        }
        auto basis = detail::generate_log_lattice(ob, std::move(gens));
        if (basis.size() == 2) {
            stable = detail::same_lattice(previous, basis) ? stable + 1 : 0;
            previous = basis;
            if (stable >= 2) break;
        }
        if (2 * radius > cap) {
            if (previous.size() == 2) break;
            throw SearchExhaustedError("unit search did not reach rank 2");
        }
        radius *= 2;
    }

    detail::LogUnit e1 = previous[0], e2 = previous[1];
    UnitLattice ul;
    ul.search_bound = radius;
    ul.hexagonal = detail::is_hexagonal(e1.log, e2.log);
    if (ul.hexagonal) {
        if (dot(e1.log, e2.log) < 0) e2 = detail::make_log_unit(ob, unit_inverse(ob, e2.unit));
        // The six minimal vectors, in the cyclic order b1, b2, b2 - b1, -b1, -b2, b1 - b2.
        const FieldElement i1 = unit_inverse(ob, e1.unit), i2 = unit_inverse(ob, e2.unit);
        const std::array<detail::LogUnit, 6> six{
            e1, e2, detail::make_log_unit(ob, mul(ob, e2.unit, i1)), detail::make_log_unit(ob, i1),
            detail::make_log_unit(ob, i2), detail::make_log_unit(ob, mul(ob, e1.unit, i2))};
        std::size_t best = 0;
        for (std::size_t i = 1; i < 6; ++i)
            if (detail::lex_greater(six[i].log, six[best].log)) best = i;
        const auto& next = six[(best + 1) % 6];
        const auto& prev = six[(best + 5) % 6];
        e1 = six[best];
        e2 = detail::lex_greater(prev.log, next.log) ? prev : next;
    } else {
        if (detail::lex_greater(-e1.log, e1.log)) e1 = detail::make_log_unit(ob, unit_inverse(ob, e1.unit));
        if (dot(e1.log, e2.log) < 0) e2 = detail::make_log_unit(ob, unit_inverse(ob, e2.unit));
    }
    ul.eps1 = e1.unit;
    ul.eps2 = e2.unit;
    ul.b1 = e1.log;
    ul.b2 = e2.log;
    ul.lambda1 = std::min(norm(ul.b1), norm(ul.b2));
    return ul;
}

/// Fold w into F. Coefficients exactly -1/2 go to +1/2.
inline TorusPoint reduce_to_domain(const UnitLattice& ul, const Vec3& w) {
    const double s = w[0] + w[1] + w[2];
    if (std::fabs(s) > 1e-9 * (1 + norm(w))) throw DomainError("w must have component sum 0");
    const auto lat = ul.lattice();
    const auto& g = lat.gram;
    const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    const double r0 = dot(ul.b1, w), r1 = dot(ul.b2, w);
    const std::array<double, 2> c{(g[1][1] * r0 - g[0][1] * r1) / det, (g[0][0] * r1 - g[1][0] * r0) / det};
    TorusPoint tp;
    for (int i = 0; i < 2; ++i) {
        double k = std::ceil(c[i] - 0.5);
        double a = c[i] - k;
        if (a <= -0.5 + 1e-12) {
            a += 1;
            k -= 1;
        }
        tp.alpha[i] = a;
        tp.shift[i] = static_cast<std::int64_t>(k);
    }
    tp.w = tp.alpha[0] * ul.b1 + tp.alpha[1] * ul.b2;
    return tp;
}

/// The point of F with the given coordinates.
inline TorusPoint torus_point(const UnitLattice& ul, std::array<double, 2> alpha) {
    TorusPoint tp;
    tp.alpha = alpha;
    tp.w = alpha[0] * ul.b1 + alpha[1] * ul.b2;
    return tp;
}

/// B(w): all units x (both signs) with ||log|x| - w|| < lambda1, sorted by distance.
inline std::vector<BallUnit> ball_units(const OrderBasis& ob, const UnitLattice& ul, const TorusPoint& tp) {
    std::vector<BallUnit> out;
    const auto k1 = static_cast<std::int64_t>(std::llround(tp.alpha[0]));
    const auto k2 = static_cast<std::int64_t>(std::llround(tp.alpha[1]));
    for (std::int64_t e0 = k1 - 2; e0 <= k1 + 2; ++e0)
        for (std::int64_t e1 = k2 - 2; e1 <= k2 + 2; ++e1) {
            const Vec3 v = static_cast<double>(e0) * ul.b1 + static_cast<double>(e1) * ul.b2;
            const double d = norm(v - tp.w);
            if (!(d < ul.lambda1 * (1 - 1e-12))) continue;
            const FieldElement u = mul(ob, unit_power(ob, ul.eps1, e0), unit_power(ob, ul.eps2, e1));
            out.push_back({u, {e0, e1}, 1, d});
            out.push_back({negate(u), {e0, e1}, -1, d});
        }
    std::sort(out.begin(), out.end(), [](const BallUnit& a, const BallUnit& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        if (a.exponents != b.exponents) return a.exponents < b.exponents;
        return a.sign > b.sign;
    });
    return out;
}

} // namespace arakelov
