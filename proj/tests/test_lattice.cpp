#include "arakelov/field.hpp"
#include "arakelov/lattice.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace arakelov;

namespace {

// Oracle: alpha * int_M^inf ((2 sqrt(t)/a + 1)^3 - (2 sqrt(M)/a - 1)^3) e^{-alpha t} dt
// by adaptive quadrature after substituting t = M + s.
long double tail_by_quadrature(long double alpha, long double M, long double a) {
    const long double c = std::pow(2 * std::sqrt(M) / a - 1, 3);
    const auto f = [&](long double s) {
        const long double t = M + s;
        return alpha * (std::pow(2 * std::sqrt(t) / a + 1, 3) - c) * std::exp(-alpha * t);
    };
    boost::math::quadrature::exp_sinh<long double> integrator;
    return integrator.integrate(f, 1e-20L);
}

// Oracle: brute-force box search. For a positive-definite Gram matrix G,
// |x_i| <= sqrt(R * (G^-1)_ii) for every x with x^T G x <= R.
std::set<std::array<std::int64_t, 3>> box_search(const Lattice<3>& lat, double R) {
    RatMat3 g{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g[i][j] = Rational(static_cast<long long>(std::llround(lat.gram[i][j] * 1e6)), 1000000);
    const auto inv = inverse3(g);
    std::array<std::int64_t, 3> bound{};
    for (int i = 0; i < 3; ++i) bound[i] = static_cast<std::int64_t>(std::ceil(std::sqrt(R * static_cast<double>(to_long_double(inv[i][i]))))) + 1;
    std::set<std::array<std::int64_t, 3>> out;
    for (std::int64_t x = -bound[0]; x <= bound[0]; ++x)
        for (std::int64_t y = -bound[1]; y <= bound[1]; ++y)
            for (std::int64_t z = -bound[2]; z <= bound[2]; ++z) {
                const std::array<std::int64_t, 3> v{x, y, z};
                if (!detail::canonical_sign<3>(v)) continue;
                if (lat.sq_length(v) <= R * (1 + 1e-12)) out.insert(v);
            }
    return out;
}

} // namespace

TEST(Lattice, EnumerationP7) {
    const auto ob = integral_basis(build_simplest_cubic(-1));
    const auto list = enumerate_short(ob.lattice(), 9.99);
    std::vector<double> lens;
    for (const auto& e : list.entries) lens.push_back(e.sq_length);
    EXPECT_EQ(lens, (std::vector<double>{3, 5, 5, 5, 6, 6, 6}));
}

TEST(Lattice, EnumerationP13) {
    const auto ob = integral_basis(build_simplest_cubic(1));
    const auto list = enumerate_short(ob.lattice(), 9.99);
    std::vector<double> lens;
    for (const auto& e : list.entries) lens.push_back(e.sq_length);
    EXPECT_EQ(lens, (std::vector<double>{3, 9, 9, 9}));
}

TEST(Lattice, EnumerationBelowMinimumIsEmpty) {
    const auto ob = integral_basis(build_simplest_cubic(0));
    EXPECT_TRUE(enumerate_short(ob.lattice(), 2.9).entries.empty());
    EXPECT_TRUE(enumerate_short(ob.lattice(), 0.0).entries.empty());
}

TEST(Lattice, EnumerationRejectsIndefiniteGram) {
    const auto lat = Lattice<3>::from_gram({{{1, 2, 0}, {2, 1, 0}, {0, 0, 1}}});
    EXPECT_THROW(enumerate_short(lat, 5.0), DegenerateLatticeError);
}

TEST(Lattice, EnumerationMatchesBoxSearch) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        std::array<Vec3, 3> b{};
        for (auto& v : b)
            for (auto& x : v) x = d(rng);
        b[0][0] += 2;
        b[1][1] += 2;
        b[2][2] += 2;
        auto lat = Lattice<3>::from_basis(b);
        // round the Gram matrix so that the oracle's rational inverse is exact
        for (auto& row : lat.gram)
            for (auto& x : row) x = std::round(x * 1e6) / 1e6;
        if (!(lat.determinant() > 0.05)) continue;
        const double R = 4.0 + 8.0 * (trial % 5);
        const auto list = enumerate_short(lat, R);
        std::set<std::array<std::int64_t, 3>> got;
        for (const auto& e : list.entries) got.insert(e.coords);
        EXPECT_EQ(got, box_search(lat, R)) << "trial " << trial;
        for (std::size_t i = 1; i < list.entries.size(); ++i)
            EXPECT_LE(list.entries[i - 1].sq_length, list.entries[i].sq_length);
    }
}

TEST(Lattice, LagrangeShear) {
    const auto r = lagrange_reduce(std::array<double, 2>{1, 0}, std::array<double, 2>{5, 1});
    EXPECT_DOUBLE_EQ(std::fabs(r.b2[0]), 0.0);
    EXPECT_DOUBLE_EQ(std::fabs(r.b2[1]), 1.0);
    EXPECT_DOUBLE_EQ(r.b1[0], 1.0);
}

TEST(Lattice, LagrangeHexagonalUnchanged) {
    const std::array<double, 2> b1{1, 0}, b2{0.5, std::sqrt(3.0) / 2};
    const auto r = lagrange_reduce(b1, b2);
    EXPECT_NEAR(norm(r.b1), 1.0, 1e-15);
    EXPECT_NEAR(norm(r.b2), 1.0, 1e-15);
    EXPECT_NEAR(std::fabs(dot(r.b1, r.b2)), 0.5, 1e-15);
}

TEST(Lattice, LagrangeRejectsDependent) {
    EXPECT_THROW(lagrange_reduce(std::array<double, 2>{1, 2}, std::array<double, 2>{2, 4}), DegenerateLatticeError);
    EXPECT_THROW(lagrange_reduce_gram<std::int64_t>({{{1, 2}, {2, 4}}}), DegenerateLatticeError);
}

TEST(Lattice, LagrangeReachesMinimum) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 a{d(rng), d(rng), d(rng)}, b{d(rng), d(rng), d(rng)};
        if (norm(cross(a, b)) < 0.5) continue;
        const auto r = lagrange_reduce(a, b);
        const double n1 = norm(r.b1), n2 = norm(r.b2);
        EXPECT_LE(n1, n2 + 1e-12);
        EXPECT_LE(n2, norm(r.b2 + r.b1) + 1e-12);
        EXPECT_LE(n2, norm(r.b2 - r.b1) + 1e-12);
        const auto lat = Lattice<2>::from_basis({a, b});
        const auto list = enumerate_short(lat, dot(r.b1, r.b1) * (1 - 1e-9));
        EXPECT_TRUE(list.entries.empty());
        const auto& t = r.transform;
        EXPECT_EQ(std::llabs(t[0][0] * t[1][1] - t[0][1] * t[1][0]), 1);
    }
}

TEST(Lattice, ClosestVector) {
    const Vec3 b1{1, 0, 0}, b2{0.5, std::sqrt(3.0) / 2, 0};
    const auto lat = Lattice<2>::from_basis({b1, b2});
    const auto z = closest_vector_rank2(lat, {0, 0, 0});
    EXPECT_EQ(z.coeffs, (std::array<std::int64_t, 2>{0, 0}));
    const auto half = closest_vector_rank2(lat, {0.5 + 1e-12, 0, 0});
    EXPECT_LE(half.distance, 0.5 + 1e-11);
    EXPECT_TRUE(half.coeffs == (std::array<std::int64_t, 2>{0, 0}) || half.coeffs == (std::array<std::int64_t, 2>{1, 0}));
    const auto hole = closest_vector_rank2(lat, (1.0 / 3) * (b1 + b2));
    EXPECT_NEAR(hole.distance, 1 / std::sqrt(3.0), 1e-9);
    // exact tie at the midpoint goes to the smaller coefficient pair
    const auto tie = closest_vector_rank2(Lattice<2>::from_basis({Vec3{2, 0, 0}, Vec3{0, 2, 0}}), {1, 0, 0});
    EXPECT_EQ(tie.coeffs, (std::array<std::int64_t, 2>{0, 0}));
}

TEST(Lattice, ClosestVectorAgainstBruteForce) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-4, 4);
    const auto red = lagrange_reduce(Vec3{1.3, -0.2, -1.1}, Vec3{0.4, 0.9, -1.3});
    const auto lat = Lattice<2>::from_basis({red.b1, red.b2});
    for (int s = 0; s < 200; ++s) {
        const double x = d(rng), y = d(rng);
        const Vec3 t = x * red.b1 + y * red.b2;
        double best = 1e300;
        for (int i = -8; i <= 8; ++i)
            for (int j = -8; j <= 8; ++j) best = std::min(best, norm(t - (static_cast<double>(i) * red.b1 + static_cast<double>(j) * red.b2)));
        EXPECT_NEAR(closest_vector_rank2(lat, t).distance, best, 1e-12);
    }
}

TEST(Lattice, TailConstants) {
    const double s3 = std::sqrt(3.0);
    EXPECT_LE(tail_bound({std::numbers::pi, 3 * std::cbrt(4.0), s3}), 137.648e-6);
    EXPECT_LE(tail_bound({std::numbers::pi - 0.5, 10, s3}), 0.001e-6);
    EXPECT_LE(tail_bound({1.568075, 10, s3}), 23.399e-6);
}

TEST(Lattice, TailMatchesQuadrature) {
    const double s3 = std::sqrt(3.0);
    for (const auto& p : {TailBoundParams{std::numbers::pi, 3 * std::cbrt(4.0), s3},
                          TailBoundParams{std::numbers::pi - 0.5, 10, s3}, TailBoundParams{1.568075, 10, s3},
                          TailBoundParams{0.7, 5, 1.2}, TailBoundParams{std::numbers::pi, 30, s3}}) {
        const long double q = tail_by_quadrature(p.alpha, p.M, p.a);
        EXPECT_NEAR(tail_bound(p) / static_cast<double>(q), 1.0, 1e-12) << p.alpha << " " << p.M;
    }
}

TEST(Lattice, TailMonotone) {
    const double s3 = std::sqrt(3.0);
    double prev = tail_bound({std::numbers::pi, 3, s3});
    for (double M = 3.5; M < 20; M += 0.5) {
        const double v = tail_bound({std::numbers::pi, M, s3});
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_GT(tail_bound({1.0, 10, s3}), tail_bound({2.0, 10, s3}));
    EXPECT_GT(tail_bound({1.0, 10, 1.0}), tail_bound({1.0, 10, 2.0}));
}

TEST(Lattice, TailDomain) {
    EXPECT_THROW(tail_bound({0, 10, 1}), DomainError);
    EXPECT_THROW(tail_bound({1, 0.5, 1}), DomainError);
    EXPECT_THROW(tail_bound({1, 10, 0}), DomainError);
    EXPECT_THROW(tail_cutoff(1, 1, 0), DomainError);
}

// The bound really dominates the lattice sum it is meant to bound.
TEST(Lattice, TailDominatesLatticeSum) {
    const auto ob = integral_basis(build_simplest_cubic(1));
    const auto lat = ob.lattice();
    const double M = 12;
    const auto list = enumerate_short(lat, 200);
    long double s = 0;
    for (const auto& e : list.entries)
        if (e.sq_length >= M) s += 2 * std::exp(-std::numbers::pi_v<long double> * e.sq_length);
    EXPECT_LE(static_cast<double>(s), tail_bound({std::numbers::pi, M, std::sqrt(3.0)}));
    const double c = tail_cutoff(std::numbers::pi, std::sqrt(3.0), 1e-12);
    EXPECT_LE(tail_bound({std::numbers::pi, c, std::sqrt(3.0)}), 1e-12);
    EXPECT_GT(tail_bound({std::numbers::pi, c * 0.99, std::sqrt(3.0)}), 1e-12);
}
