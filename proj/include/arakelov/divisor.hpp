#pragma once

// Arakelov divisors D = (I, u), the theta sum k0(D) = sum_{f in I} exp(-pi ||u f||^2)
// with a certified truncation interval, h0 = log k0, the S1/S2 split and scans
// of h0 over the torus H / Lambda.

#include "arakelov/error.hpp"
#include "arakelov/exact.hpp"
#include "arakelov/field.hpp"
#include "arakelov/lattice.hpp"
#include "arakelov/linalg.hpp"
#include "arakelov/parallel.hpp"
#include "arakelov/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace arakelov {

/// Full-rank sublattice of O_F: columns of mat / den, in order-basis coordinates.
struct IdealBasis {
    IntMat3 mat{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    std::int64_t den = 1;
};

struct ArakelovDivisor {
    IdealBasis ideal;
    Rational ideal_norm{1};  // |det mat| / den^3
    Vec3 u{1.0, 1.0, 1.0};
    double degree = 0.0;  // log(N(u) N(I))
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
    double mid() const { return 0.5 * (lower + upper); }
};

struct ThetaValue {
    double partial = 0.0;  // 1 + sum over enumerated nonzero vectors
    double cutoff = 0.0;   // squared-length truncation radius
    double tail = 0.0;     // certified bound on the omitted terms
    double lower = 0.0;
    double upper = 0.0;
    std::size_t terms = 0;  // enumerated +- pairs
};

struct S1S2Split {
    double s1 = 0.0;  // vectors with ||u f||^2 < 3 * 2^(2/3)
    Interval s2;      // the remaining nonzero vectors
    double s2_bound = 0.0;  // tail bound from the AM-GM floor alone
    std::size_t s1_terms = 0;
};

inline const double kS1Threshold = 3 * std::cbrt(4.0);

inline double divisor_degree(const Rational& ideal_norm, const Vec3& u) {
    for (double x : u)
        if (!(x > 0) || !std::isfinite(x)) throw DomainError("u must be a triple of positive reals");
    const double lognorm =
        std::log(boost::multiprecision::numerator(ideal_norm).convert_to<double>()) -
        std::log(boost::multiprecision::denominator(ideal_norm).convert_to<double>());
    return std::log(u[0]) + std::log(u[1]) + std::log(u[2]) + lognorm;
}

inline ArakelovDivisor make_divisor(const IdealBasis& ideal, const Vec3& u) {
    if (ideal.den <= 0) throw DomainError("ideal denominator must be positive");
    Mat3Of<BigInt> m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = ideal.mat[i][j];
    const BigInt d = abs(det3(m));
    if (d == 0) throw DegenerateLatticeError("ideal basis is singular");
    const BigInt den = ideal.den;
    ArakelovDivisor div;
    div.ideal = ideal;
    div.ideal_norm = Rational(d, den * den * den);
    div.u = u;
    div.degree = divisor_degree(div.ideal_norm, u);
    return div;
}

/// D_w = (O_F, exp(-w)).
inline ArakelovDivisor principal_divisor(const Vec3& w) {
    return make_divisor(IdealBasis{}, {std::exp(-w[0]), std::exp(-w[1]), std::exp(-w[2])});
}

/// Sublattice generated by the products g * b_j of the given elements with the order basis.
inline IdealBasis ideal_from_generators(const OrderBasis& ob, const std::vector<FieldElement>& gens) {
    std::vector<std::array<BigInt, 3>> cols;
    for (const auto& g : gens)
        for (int j = 0; j < 3; ++j) {
            FieldElement bj{};
            bj.coords[j] = 1;
            const auto p = mul(ob, g, bj);
            cols.push_back({p.coords[0], p.coords[1], p.coords[2]});
        }
    const auto h = hermite_upper(cols);
    IdealBasis ib;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ib.mat[i][j] = to_int64(h[i][j]);
    return ib;
}

/// Rescale u by (N(u) N(I))^(-1/3) so that the degree is 0.
inline ArakelovDivisor degree_zero_scaling(const ArakelovDivisor& d) {
    const double c = std::exp(-d.degree / 3);
    ArakelovDivisor r = d;
    r.u = c * d.u;
    r.degree = divisor_degree(r.ideal_norm, r.u);
    return r;
}

/// The lattice u I in R^3.
inline Lattice<3> divisor_lattice(const OrderBasis& ob, const ArakelovDivisor& d) {
    std::array<Vec3, 3> basis{};
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            long double s = 0;
            for (int k = 0; k < 3; ++k) s += ob.embed_precise[i][k] * static_cast<long double>(d.ideal.mat[k][j]);
            basis[j][i] = static_cast<double>(static_cast<long double>(d.u[i]) * s / d.ideal.den);
        }
    auto lat = Lattice<3>::from_basis(basis);
    if (d.u == Vec3{1.0, 1.0, 1.0} && d.ideal.den == 1) {
        Lattice<3>::ExactGram g{};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                __int128 s = 0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        s += static_cast<__int128>(d.ideal.mat[i][a]) * ob.exact_gram[i][j] * d.ideal.mat[j][b];
                g[a][b] = static_cast<std::int64_t>(s);
            }
        lat.exact_gram = g;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) lat.gram[a][b] = static_cast<double>(g[a][b]);
    }
    return lat;
}

namespace detail {

// Leaves room for rounding in partial + tail.
inline double tail_budget(double tol) { return tol * (1 - 1e-3); }

// Shortest-length floor for the tail bound: sqrt(3) by AM-GM for ideals of a
// degree-0 divisor, smaller if the lattice has shorter vectors.
inline double length_floor(const Lattice<3>& lat) {
    const auto shortest = enumerate_short(lat, 3.0);
    if (shortest.entries.empty()) return std::sqrt(3.0);
    return std::min(std::sqrt(3.0), std::sqrt(shortest.entries.front().sq_length) * (1 - 1e-12));
}

// 1 + 2 sum exp(-pi s), summed from the smallest terms up.
inline long double theta_partial(const std::vector<double>& sq_lengths) {
    long double s = 0;
    for (auto it = sq_lengths.rbegin(); it != sq_lengths.rend(); ++it)
        s += std::exp(-std::numbers::pi_v<long double> * static_cast<long double>(*it));
    return 1 + 2 * s;
}

} // namespace detail

/// k0 of the degree-0 rescaling of d, as a certified interval of width <= tol.
inline ThetaValue k0(const OrderBasis& ob, const ArakelovDivisor& d, double tol = 1e-12) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    const auto d0 = degree_zero_scaling(d);
    const auto lat = divisor_lattice(ob, d0);
    const double a = detail::length_floor(lat);
    const double cutoff = tail_cutoff(std::numbers::pi, a, detail::tail_budget(tol));
    const auto list = enumerate_short(lat, cutoff);
    std::vector<double> sq;
    sq.reserve(list.entries.size());
    for (const auto& e : list.entries) sq.push_back(e.sq_length);
    ThetaValue tv;
    tv.partial = static_cast<double>(detail::theta_partial(sq));
    tv.cutoff = cutoff;
    tv.tail = tail_bound({std::numbers::pi, cutoff, a});
    tv.lower = tv.partial;
    tv.upper = tv.partial + tv.tail;
    tv.terms = sq.size();
    return tv;
}

inline Interval h0(const OrderBasis& ob, const ArakelovDivisor& d, double tol = 1e-12) {
    const auto tv = k0(ob, d, tol);
    return {std::log(tv.lower), std::log(tv.upper)};
}

inline S1S2Split s1_s2_split(const OrderBasis& ob, const ArakelovDivisor& d, double tol = 1e-12) {
    const auto d0 = degree_zero_scaling(d);
    const auto lat = divisor_lattice(ob, d0);
    const double a = detail::length_floor(lat);
    const double cutoff = std::max(tail_cutoff(std::numbers::pi, a, detail::tail_budget(tol)), kS1Threshold);
    const auto list = enumerate_short(lat, cutoff);
    std::vector<double> small, large;
    for (const auto& e : list.entries) (e.sq_length < kS1Threshold ? small : large).push_back(e.sq_length);
    S1S2Split r;
    r.s1 = static_cast<double>(detail::theta_partial(small) - 1);
    r.s1_terms = small.size();
    r.s2.lower = static_cast<double>(detail::theta_partial(large) - 1);
    r.s2.upper = r.s2.lower + tail_bound({std::numbers::pi, cutoff, a});
    r.s2_bound = tail_bound({std::numbers::pi, kS1Threshold, a});
    return r;
}

// ---------------------------------------------------------------------------
// Principal divisors D_w = (O_F, exp(-w)) from one pre-enumerated superset.

struct OriginComparison {
    Interval delta_k0;  // k0(D_w) - k0(D_0)
    Interval delta_h0;  // h0(D_w) - h0(D_0)
};

class PrincipalTheta {
public:
    struct Term {
        std::array<long double, 3> phi2{};  // squared embeddings
        double sq_length = 0.0;            // exact ||f||^2
        std::array<std::int64_t, 3> coords{};
    };

    /// Enumerates O_F up to squared length `radius`; every later evaluation
    /// must only need vectors inside this radius.
    PrincipalTheta(const OrderBasis& ob, double radius) : radius_(radius) {
        const auto list = enumerate_short(ob.lattice(), radius);
        terms_.reserve(list.entries.size());
        for (const auto& e : list.entries) {
            Term t;
            t.coords = e.coords;
            t.sq_length = e.sq_length;
            const auto v = embed_precise(ob, FieldElement{e.coords});
            for (int i = 0; i < 3; ++i) t.phi2[i] = v[i] * v[i];
            terms_.push_back(t);
        }
        origin_ = evaluate_sum(Vec3{0, 0, 0}, radius, nullptr);
        origin_tail_ = tail_bound({std::numbers::pi, radius, std::sqrt(3.0)});
    }

    double radius() const { return radius_; }
    const std::vector<Term>& terms() const { return terms_; }

    /// Radius needed so that all vectors with ||u f||^2 <= cutoff are present.
    static double superset_radius(double cutoff, const Vec3& w) {
        const double m = std::max({std::fabs(w[0]), std::fabs(w[1]), std::fabs(w[2])});
        return cutoff * std::exp(2 * m) * (1 + 1e-9);
    }

    static double theta_cutoff(double tol) { return tail_cutoff(std::numbers::pi, std::sqrt(3.0), detail::tail_budget(tol)); }

    ThetaValue k0(const Vec3& w, double tol) const {
        check_trace_zero(w);
        const double cutoff = theta_cutoff(tol);
        require(cutoff, w);
        std::size_t n = 0;
        ThetaValue tv;
        tv.partial = static_cast<double>(evaluate_sum(w, cutoff, &n));
        tv.cutoff = cutoff;
        tv.tail = tail_bound({std::numbers::pi, cutoff, std::sqrt(3.0)});
        tv.lower = tv.partial;
        tv.upper = tv.partial + tv.tail;
        tv.terms = n;
        return tv;
    }

    Interval h0(const Vec3& w, double tol) const {
        const auto tv = k0(w, tol);
        return {std::log(tv.lower), std::log(tv.upper)};
    }

    /// S1(w): the finite sum over ||u f||^2 < 3 * 2^(2/3).
    double s1(const Vec3& w) const {
        check_trace_zero(w);
        require(kS1Threshold, w);
        long double s = 0;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const long double q = scaled_sq(*it, w);
            if (q < kS1Threshold) s += std::exp(-std::numbers::pi_v<long double> * q);
        }
        return static_cast<double>(2 * s);
    }

    /// k0(D_w) - k0(D_0) summed termwise with expm1 over the whole superset,
    /// with both omitted tails as the interval.
    OriginComparison compare_to_origin(const Vec3& w) const {
        check_trace_zero(w);
        const double m = std::max({std::fabs(w[0]), std::fabs(w[1]), std::fabs(w[2])});
        const double inner = radius_ * std::exp(-2 * m);
        if (!(inner >= 3.0)) throw DomainError("w too large for the enumerated superset");
        const std::array<long double, 3> c{std::expm1(-2 * static_cast<long double>(w[0])),
                                           std::expm1(-2 * static_cast<long double>(w[1])),
                                           std::expm1(-2 * static_cast<long double>(w[2]))};
        long double s = 0;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const long double d = c[0] * it->phi2[0] + c[1] * it->phi2[1] + c[2] * it->phi2[2];
            s += std::exp(-std::numbers::pi_v<long double> * it->sq_length) *
                 std::expm1(-std::numbers::pi_v<long double> * d);
        }
        const double partial = static_cast<double>(2 * s);
        OriginComparison oc;
        oc.delta_k0.lower = partial - origin_tail_;
        oc.delta_k0.upper = partial + tail_bound({std::numbers::pi, inner, std::sqrt(3.0)});
        const double base_hi = static_cast<double>(origin_) + origin_tail_;
        const double base_lo = static_cast<double>(origin_);
        // h0(D_w) - h0(D_0) = log1p(delta / k0(D_0)); k0(D_0) > 1.
        oc.delta_h0.lower = std::log1p(oc.delta_k0.lower / (oc.delta_k0.lower < 0 ? base_lo : base_hi));
        oc.delta_h0.upper = std::log1p(oc.delta_k0.upper / (oc.delta_k0.upper < 0 ? base_hi : base_lo));
        return oc;
    }

    /// Gradient of k0(D_w) in w at w = 0, projected to the trace-zero plane.
    Vec3 gradient_at_origin() const {
        std::array<long double, 3> g{};
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const long double e = std::exp(-std::numbers::pi_v<long double> * it->sq_length);
            for (int i = 0; i < 3; ++i) g[i] += 4 * std::numbers::pi_v<long double> * it->phi2[i] * e;
        }
        const long double mean = (g[0] + g[1] + g[2]) / 3;
        return {static_cast<double>(g[0] - mean), static_cast<double>(g[1] - mean), static_cast<double>(g[2] - mean)};
    }

private:
    static void check_trace_zero(const Vec3& w) {
        if (std::fabs(w[0] + w[1] + w[2]) > 1e-9 * (1 + norm(w))) throw DomainError("w must have component sum 0");
    }

    void require(double cutoff, const Vec3& w) const {
        if (superset_radius(cutoff, w) > radius_ * (1 + 1e-9))
            throw DomainError("w too large for the enumerated superset");
    }

    static long double scaled_sq(const Term& t, const Vec3& w) {
        return std::exp(-2 * static_cast<long double>(w[0])) * t.phi2[0] +
               std::exp(-2 * static_cast<long double>(w[1])) * t.phi2[1] +
               std::exp(-2 * static_cast<long double>(w[2])) * t.phi2[2];
    }

    long double evaluate_sum(const Vec3& w, double cutoff, std::size_t* count) const {
        long double s = 0;
        std::size_t n = 0;
        const long double limit = static_cast<long double>(cutoff) * (1 + 1e-12L);
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const long double q = scaled_sq(*it, w);
            if (q > limit) continue;
            s += std::exp(-std::numbers::pi_v<long double> * q);
            ++n;
        }
        if (count) *count = n;
        return 1 + 2 * s;
    }

    double radius_;
    std::vector<Term> terms_;
    long double origin_ = 1;
    double origin_tail_ = 0.0;
};

// ---------------------------------------------------------------------------
// Torus scans

/// k-th of n grid coordinates in (-1/2, 1/2], spacing 1/n, containing 0.
inline double grid_coordinate(int k, int n) {
    return static_cast<double>(k - (n - 1) / 2) / static_cast<double>(n);
}

struct ScanPoint {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    Interval h0;
    double delta_vs_origin = 0.0;  // h0(D_w) - h0(D_0), evaluated without cancellation
    Interval delta_interval;
};

struct TorusScan {
    int grid_n = 0;
    double tol = 0.0;
    double cutoff = 0.0;
    double superset_radius = 0.0;
    std::size_t superset_size = 0;
    std::size_t origin_index = 0;
    std::vector<ScanPoint> points;  // row-major: alpha1 outer, alpha2 inner
};

/// h0 on the n x n grid of F. Results do not depend on the thread count.
inline TorusScan scan_torus(const OrderBasis& ob, const UnitLattice& ul, int grid_n, double tol = 1e-12,
                            unsigned threads = 0) {
    if (grid_n < 2) throw DomainError("grid must have at least 2 points per side");
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    TorusScan scan;
    scan.grid_n = grid_n;
    scan.tol = tol;
    scan.cutoff = PrincipalTheta::theta_cutoff(tol);

    const auto n = static_cast<std::size_t>(grid_n);
    std::vector<Vec3> ws(n * n);
    double radius = scan.cutoff;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double a1 = grid_coordinate(static_cast<int>(i), grid_n);
            const double a2 = grid_coordinate(static_cast<int>(j), grid_n);
            ws[i * n + j] = a1 * ul.b1 + a2 * ul.b2;
            radius = std::max(radius, PrincipalTheta::superset_radius(scan.cutoff, ws[i * n + j]));
        }
    const PrincipalTheta theta(ob, radius);
    scan.superset_radius = radius;
    scan.superset_size = theta.terms().size();
    const auto mid = static_cast<std::size_t>((grid_n - 1) / 2);
    scan.origin_index = mid * n + mid;

    scan.points.resize(n * n);
    parallel_for(n * n, threads, [&](std::size_t idx) {
        ScanPoint& pt = scan.points[idx];
        pt.alpha1 = grid_coordinate(static_cast<int>(idx / n), grid_n);
        pt.alpha2 = grid_coordinate(static_cast<int>(idx % n), grid_n);
        pt.h0 = theta.h0(ws[idx], tol);
        const auto oc = theta.compare_to_origin(ws[idx]);
        pt.delta_interval = oc.delta_h0;
        pt.delta_vs_origin = oc.delta_h0.mid();
    });
    return scan;
}

struct ScanSummary {
    std::size_t argmax = 0;        // grid index of the largest h0 midpoint
    double max_width = 0.0;        // widest h0 interval
    double origin_margin = 0.0;    // min over other points of h0_lower(origin) - h0_upper(point)
    double best_gain = 0.0;        // max over other points of delta_vs_origin
    std::size_t best_gain_index = 0;
};

inline ScanSummary summarize(const TorusScan& scan) {
    ScanSummary s;
    s.origin_margin = std::numeric_limits<double>::infinity();
    s.best_gain = -std::numeric_limits<double>::infinity();
    const auto& o = scan.points[scan.origin_index];
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        const auto& p = scan.points[i];
        s.max_width = std::max(s.max_width, p.h0.width());
        if (p.h0.mid() > scan.points[s.argmax].h0.mid() ||
            (p.h0.mid() == scan.points[s.argmax].h0.mid() && p.delta_vs_origin > scan.points[s.argmax].delta_vs_origin))
            s.argmax = i;
        if (i == scan.origin_index) continue;
        s.origin_margin = std::min(s.origin_margin, o.h0.lower - p.h0.upper);
        if (p.delta_vs_origin > s.best_gain) {
            s.best_gain = p.delta_vs_origin;
            s.best_gain_index = i;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Off-origin maxima near the trivial class

struct LocalMaximum {
    bool found = false;
    Vec3 gradient{};  // projected gradient of k0 at the origin
    Vec3 w{};
    std::array<double, 2> alpha{};
    Interval delta_k0;
    Interval delta_h0;
};

/// Line search from the origin along the gradient of k0. For cyclic fields the
/// gradient vanishes by symmetry and nothing is found; otherwise the best
/// point on the ray is returned with a certified interval for h0(D_w) - h0(D_0).
inline LocalMaximum refine_near_origin(const OrderBasis& ob, const UnitLattice& ul, double max_step = 1e-2) {
    const double radius = PrincipalTheta::superset_radius(60.0, Vec3{max_step, max_step, max_step});
    const PrincipalTheta theta(ob, radius);
    LocalMaximum lm;
    lm.gradient = theta.gradient_at_origin();
    const double gnorm = norm(lm.gradient);
    if (!(gnorm > 1e-15)) return lm;
    const Vec3 dir = (1 / gnorm) * lm.gradient;
    const auto value = [&](double t) { return theta.compare_to_origin(t * dir).delta_k0.mid(); };

    const double phi = (std::sqrt(5.0) - 1) / 2;
    double lo = 0, hi = max_step;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        }
    }
    const double t = 0.5 * (lo + hi);
    lm.w = t * dir;
    const auto oc = theta.compare_to_origin(lm.w);
    lm.delta_k0 = oc.delta_k0;
    lm.delta_h0 = oc.delta_h0;
    lm.alpha = reduce_to_domain(ul, lm.w).alpha;
    lm.found = oc.delta_h0.lower > 0;
    return lm;
}

} // namespace arakelov
