#include "arakelov/field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace arakelov;

namespace {

const OrderBasis& order_for(std::int64_t a) {
    static const OrderBasis o7 = integral_basis(build_simplest_cubic(-1));
    static const OrderBasis o9 = integral_basis(build_simplest_cubic(0));
    static const OrderBasis o13 = integral_basis(build_simplest_cubic(1));
    static const OrderBasis o19 = integral_basis(build_simplest_cubic(2));
    switch (a) {
        case -1: return o7;
        case 0: return o9;
        case 1: return o13;
        default: return o19;
    }
}

std::int64_t min_nonrational_sq_length(const OrderBasis& ob) {
    const auto list = enumerate_short(ob.lattice(), 4.0 * static_cast<double>(*ob.conductor));
    for (const auto& e : list.entries)
        if (e.coords[1] != 0 || e.coords[2] != 0) return sq_length(ob, FieldElement{e.coords});
    return -1;
}

} // namespace

TEST(Field, SimplestCubicPolynomials) {
    const auto f7 = build_simplest_cubic(-1);
    EXPECT_EQ(f7.coeffs, (std::array<std::int64_t, 3>{1, -2, -1}));
    EXPECT_EQ(f7.disc, 49);
    EXPECT_TRUE(f7.is_galois);
    const auto f9 = build_simplest_cubic(0);
    EXPECT_EQ(f9.coeffs, (std::array<std::int64_t, 3>{0, -3, -1}));
    EXPECT_EQ(f9.disc, 81);
    const auto f13 = build_simplest_cubic(1);
    EXPECT_EQ(f13.coeffs, (std::array<std::int64_t, 3>{-1, -4, -1}));
    EXPECT_EQ(f13.disc, 169);
    EXPECT_THROW(build_simplest_cubic(-2), DomainError);
}

TEST(Field, Conductors) {
    EXPECT_EQ(*order_for(-1).conductor, 7);
    EXPECT_EQ(*order_for(0).conductor, 9);
    EXPECT_EQ(*order_for(1).conductor, 13);
    EXPECT_EQ(*order_for(2).conductor, 19);
}

TEST(Field, RootsAndSigma) {
    for (std::int64_t a : {-1, 0, 1, 2, 5}) {
        const auto f = build_simplest_cubic(a);
        EXPECT_LT(f.roots[0], f.roots[1]);
        EXPECT_LT(f.roots[1], f.roots[2]);
        EXPECT_NEAR(f.roots[0] + f.roots[1] + f.roots[2], -static_cast<double>(f.coeffs[0]), 1e-12);
        for (const auto r : f.roots_precise) EXPECT_LT(std::fabs(eval_cubic<long double>(f.coeffs, r)), 1e-14L * (1 + std::fabs(r * r * r)));
        ASSERT_TRUE(f.sigma_perm);
        const auto& s = *f.sigma_perm;
        EXPECT_NE(s[0], 0);
        EXPECT_EQ(s[s[s[0]]], 0);
        EXPECT_EQ(s[s[s[1]]], 1);
    }
}

TEST(Field, BuildFromPoly) {
    const auto ce = build_from_poly(1, -3, -1);
    EXPECT_FALSE(ce.is_galois);
    EXPECT_EQ(ce.disc, 148);
    EXPECT_FALSE(ce.sigma_perm);
    const auto f7 = build_from_poly(1, -2, -1);
    EXPECT_TRUE(f7.is_galois);
    EXPECT_EQ(*integral_basis(f7).conductor, 7);
    EXPECT_THROW(build_from_poly(0, 0, -2), UnsupportedSignatureError);
    EXPECT_THROW(build_from_poly(0, -1, 0), ReducibleError);      // X^3 - X
    EXPECT_THROW(build_from_poly(-3, 3, -1), ReducibleError);     // (X - 1)^3
    EXPECT_THROW(build_from_poly(0, -7, 6), ReducibleError);      // (X - 1)(X - 2)(X + 3)
}

TEST(Field, NonMaximalPowerBasisGetsEnlarged) {
    // 3 theta for X^3 - 3X - 1 and 2 theta for X^3 + X^2 - 2X - 1
    const auto f9 = build_from_poly(0, -27, -27);
    EXPECT_EQ(f9.disc, 81 * 729);
    const auto o9 = integral_basis(f9);
    EXPECT_EQ(o9.field_disc, 81);
    EXPECT_EQ(*o9.conductor, 9);
    EXPECT_EQ(o9.index_case, IndexCase::CaseI);
    EXPECT_TRUE(o9.maximal_certified);

    const auto f7 = build_from_poly(2, -8, -8);
    EXPECT_EQ(f7.disc, 49 * 64);
    const auto o7 = integral_basis(f7);
    EXPECT_EQ(o7.field_disc, 49);
    EXPECT_EQ(o7.index_case, IndexCase::CaseII);

    const auto o63 = integral_basis(build_from_poly(0, -21, -35));
    EXPECT_EQ(*o63.conductor, 63);
}

TEST(Field, GaloisAutomorphism) {
    for (std::int64_t a : {-1, 0, 1, 2}) {
        const auto& ob = order_for(a);
        const auto m = galois_automorphism(ob);
        const auto e = one();
        EXPECT_EQ(m.apply(e), e);
        for (int j = 0; j < 3; ++j) {
            FieldElement b{};
            b.coords[j] = 1;
            EXPECT_EQ(m.apply(m.apply(m.apply(b))), b);
            EXPECT_EQ(elem_trace(ob, m.apply(b)), elem_trace(ob, b));
        }
        FieldElement b1{{0, 1, 0}};
        EXPECT_NE(m.apply(b1), b1);
    }
    const auto& o9 = order_for(0);
    const auto th = theta(o9);
    EXPECT_EQ(elem_trace(o9, th), 0);
    EXPECT_EQ(elem_trace(o9, apply_sigma(o9, th)), 0);
    EXPECT_THROW(galois_automorphism(integral_basis(build_from_poly(1, -3, -1))), NotGaloisError);
}

TEST(Field, SigmaActsAsShiftOfEmbeddings) {
    const auto& ob = order_for(1);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int s = 0; s < 50; ++s) {
        const FieldElement f{{d(rng), d(rng), d(rng)}};
        const auto v = embed(ob, f);
        const auto w = embed(ob, apply_sigma(ob, f));
        EXPECT_NEAR(w[0], v[1], 1e-9 * (1 + std::fabs(v[1])));
        EXPECT_NEAR(w[1], v[2], 1e-9 * (1 + std::fabs(v[2])));
        EXPECT_NEAR(w[2], v[0], 1e-9 * (1 + std::fabs(v[0])));
    }
}

TEST(Field, IntegralBasisInvariants) {
    for (std::int64_t a : {-1, 0, 1, 2}) {
        const auto& ob = order_for(a);
        const double p = static_cast<double>(*ob.conductor);
        EXPECT_EQ(ob.basis[0][0], 1);
        EXPECT_NEAR(ob.lattice().determinant(), ob.covolume * ob.covolume, 1e-9 * p * p);
        EXPECT_NEAR(ob.covolume, p, 1e-12 * p);
        // embed^T embed equals the exact trace form
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += ob.embed[k][i] * ob.embed[k][j];
                EXPECT_NEAR(s, static_cast<double>(ob.exact_gram[i][j]), 1e-10 * (1 + std::fabs(s)));
            }
        EXPECT_TRUE(ob.trace_generator_verified);
        for (const auto& g : ob.trace_kernel) EXPECT_EQ(elem_trace(ob, FieldElement{g}), 0);
    }
}

TEST(Field, IndexCases) {
    EXPECT_EQ(order_for(-1).index_case, IndexCase::CaseII);
    EXPECT_EQ(order_for(0).index_case, IndexCase::CaseI);
    EXPECT_EQ(order_for(1).index_case, IndexCase::CaseII);
}

TEST(Field, MinimumVectors) {
    EXPECT_EQ(min_nonrational_sq_length(order_for(-1)), 5);
    EXPECT_EQ(min_nonrational_sq_length(order_for(0)), 6);
    EXPECT_EQ(min_nonrational_sq_length(order_for(1)), 9);
    EXPECT_EQ(min_nonrational_sq_length(order_for(2)), 13);
}

TEST(Field, TraceKernelIsHexagonal) {
    for (std::int64_t a : {-1, 0, 1, 2}) {
        const auto& ob = order_for(a);
        const FieldElement f{ob.trace_kernel[0]}, g{ob.trace_kernel[1]};
        const auto nf = sq_length(ob, f), ng = sq_length(ob, g);
        const auto nd = sq_length(ob, add(g, negate(f)));
        const auto ns = sq_length(ob, add(g, f));
        EXPECT_EQ(nf, ng);
        EXPECT_TRUE(nd == nf || ns == nf);
    }
}

TEST(Field, TraceAndNorm) {
    const auto& ob = order_for(-1);
    EXPECT_EQ(elem_trace(ob, one()), 3);
    EXPECT_EQ(elem_norm(ob, one()), 1);
    EXPECT_EQ(std::llabs(elem_norm(ob, theta(ob))), 1);
    EXPECT_EQ(elem_norm(ob, FieldElement{{3, 0, 0}}), 27);
    EXPECT_EQ(elem_trace(ob, FieldElement{{3, 0, 0}}), 9);
}

TEST(Field, EmbeddingLengths) {
    const auto& ob = order_for(-1);
    const auto e1 = embed(ob, one());
    for (double x : e1) EXPECT_NEAR(x, 1.0, 1e-15);
    EXPECT_EQ(sq_length(ob, one()), 3);
    const auto th = theta(ob);
    EXPECT_EQ(sq_length(ob, th), 5);
    EXPECT_EQ(sq_length(ob, add(one(), th)), 6);
    EXPECT_NEAR(dot(embed(ob, th), embed(ob, th)), 5.0, 5e-10);
}

TEST(Field, OrbitLengthsAgree) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(-20, 20);
    for (std::int64_t a : {-1, 0, 1, 2}) {
        const auto& ob = order_for(a);
        for (int s = 0; s < 100; ++s) {
            const FieldElement f{{d(rng), d(rng), d(rng)}};
            const double l0 = norm(embed(ob, f));
            const FieldElement sf = apply_sigma(ob, f);
            EXPECT_NEAR(norm(embed(ob, sf)), l0, 1e-10 * (1 + l0));
            EXPECT_NEAR(norm(embed(ob, apply_sigma(ob, sf))), l0, 1e-10 * (1 + l0));
            EXPECT_EQ(sq_length(ob, sf), sq_length(ob, f));
        }
    }
}

// Oracle: the norm is the product of the three embeddings, rounded.
TEST(Field, NormMatchesEmbeddingProduct) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> d(-12, 12);
    for (std::int64_t a : {-1, 0, 1}) {
        const auto& ob = order_for(a);
        for (int s = 0; s < 1000; ++s) {
            const FieldElement f{{d(rng), d(rng), d(rng)}};
            const auto v = embed_precise(ob, f);
            const long double prod = v[0] * v[1] * v[2];
            EXPECT_EQ(elem_norm(ob, f), std::llround(prod));
            const long double tr = v[0] + v[1] + v[2];
            EXPECT_EQ(elem_trace(ob, f), std::llround(tr));
        }
    }
}

TEST(Field, MultiplicationMatchesEmbeddings) {
    const auto& ob = order_for(0);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(-6, 6);
    for (int s = 0; s < 100; ++s) {
        const FieldElement f{{d(rng), d(rng), d(rng)}}, g{{d(rng), d(rng), d(rng)}};
        const auto vf = embed(ob, f), vg = embed(ob, g), vfg = embed(ob, mul(ob, f, g));
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(vfg[i], vf[i] * vg[i], 1e-9 * (1 + std::fabs(vfg[i])));
    }
}

TEST(Field, UnitInverseAndPower) {
    const auto& ob = order_for(-1);
    const auto th = theta(ob);
    const auto inv = unit_inverse(ob, th);
    EXPECT_EQ(mul(ob, th, inv), one());
    EXPECT_EQ(unit_power(ob, th, -3), mul(ob, inv, mul(ob, inv, inv)));
    EXPECT_EQ(unit_power(ob, th, 0), one());
    EXPECT_THROW(unit_inverse(ob, FieldElement{{2, 0, 0}}), DomainError);
}
