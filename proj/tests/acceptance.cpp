// One line per acceptance criterion. Usage: acceptance [criterion]

#include "arakelov/arakelov.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>

using namespace arakelov;

namespace {

struct Outcome {
    bool passed = true;
    std::string summary;
};

const std::vector<FieldContext>& cyclic_fields() {
    static const std::vector<FieldContext> f{make_context(build_simplest_cubic(-1)),
                                             make_context(build_simplest_cubic(0)),
                                             make_context(build_simplest_cubic(1))};
    return f;
}

// First failing check, or the one with the smallest relative margin.
Outcome fold(const std::vector<CheckResult>& rs) {
    Outcome o;
    const CheckResult* worst = nullptr;
    double worst_rel = std::numeric_limits<double>::infinity();
    for (const auto& c : rs) {
        const double rel = c.passed ? std::fabs(c.margin) / std::max(std::fabs(c.rhs), 1e-300) : -1;
        if (!c.passed) o.passed = false;
        if (rel < worst_rel) {
            worst_rel = rel;
            worst = &c;
        }
    }
    if (worst)
        o.summary = fmt::format("{} checks; {}: {} {:.10g} vs {:.10g}", rs.size(), worst->passed ? "tightest" : "failed",
                                worst->name, worst->lhs, worst->rhs);
    return o;
}

Outcome criterion1() {
    std::vector<CheckResult> rs;
    for (const auto& fc : cyclic_fields()) {
        auto r = check_min_vectors(fc);
        rs.insert(rs.end(), r.begin(), r.end());
    }
    auto o = fold(rs);
    o.summary = fmt::format("min |f|^2 = {}, {}, {}", rs[0].lhs, rs[1].lhs, rs[2].lhs);
    return o;
}

Outcome criterion2() {
    std::vector<CheckResult> rs;
    for (const auto& fc : cyclic_fields()) {
        auto r = check_lambda1(fc);
        rs.insert(rs.end(), r.begin(), r.end());
    }
    auto o = fold(rs);
    o.summary = fmt::format("lambda1 = {:.7f}, {:.7f}, {:.7f}; max residual {:.2e}", rs[0].lhs, rs[2].lhs, rs[4].lhs,
                            std::max({rs[1].lhs, rs[3].lhs, rs[5].lhs}));
    return o;
}

long double tail_by_quadrature(long double alpha, long double M, long double a) {
    const long double c = std::pow(2 * std::sqrt(M) / a - 1, 3);
    const auto f = [&](long double s) {
        const long double t = M + s;
        return alpha * (std::pow(2 * std::sqrt(t) / a + 1, 3) - c) * std::exp(-alpha * t);
    };
    boost::math::quadrature::exp_sinh<long double> integrator;
    return integrator.integrate(f, 1e-20L);
}

Outcome criterion3() {
    auto rs = check_tail_constants();
    const double s3 = std::sqrt(3.0), pi = std::numbers::pi;
    const std::array<TailBoundParams, 3> params{TailBoundParams{pi, kS1Threshold, s3}, TailBoundParams{pi - 0.5, 10, s3},
                                                TailBoundParams{1.568075, 10, s3}};
    double worst = 0;
    for (const auto& p : params) {
        const double q = static_cast<double>(tail_by_quadrature(p.alpha, p.M, p.a));
        worst = std::max(worst, std::fabs(tail_bound(p) / q - 1));
    }
    rs.push_back(make_check("closed form vs quadrature", worst, Relation::LessEqual, 1e-12, 3, "tail bound"));
    auto o = fold(rs);
    o.summary = fmt::format("tails {:.6e}, {:.6e}, {:.6e}; quadrature rel. diff {:.2e}", rs[0].lhs, rs[1].lhs,
                            rs[2].lhs, worst);
    return o;
}

Outcome criterion4() {
    std::vector<CheckResult> rs;
    for (const auto& fc : cyclic_fields()) {
        auto r = check_s1(fc, 64, 256);
        rs.insert(rs.end(), r.begin(), r.end());
    }
    return fold(rs);
}

Outcome criterion5() {
    std::vector<CheckResult> rs{check_quadratic_exponential_inequality(64, 256)};
    for (const auto& fc : cyclic_fields()) {
        auto r = check_case_2d(fc, 64, 256);
        rs.insert(rs.end(), r.begin(), r.end());
    }
    auto r19 = check_case_2d(make_context(build_simplest_cubic(2)), 64, 256);
    rs.insert(rs.end(), r19.begin(), r19.end());
    return fold(rs);
}

Outcome criterion6() {
    std::vector<CheckResult> rs;
    for (const auto& fc : cyclic_fields()) {
        auto r = check_scan(fc, 101, 1e-12, 0);
        rs.insert(rs.end(), r.begin(), r.end());
    }
    auto o = fold(rs);
    o.summary = fmt::format("origin margins {:.3e}, {:.3e}, {:.3e} vs 2 widths {:.3e}", rs[0].lhs, rs[1].lhs,
                            rs[2].lhs, rs[0].rhs);
    return o;
}

Outcome criterion7() {
    const auto fc = make_context(build_from_poly(1, -3, -1));
    const auto scan = scan_torus(fc.ob, fc.ul, 101, 1e-12, 0);
    const auto s = summarize(scan);
    const auto& b = scan.points[s.best_gain_index];
    const auto& o0 = scan.points[scan.origin_index];
    double gain = -std::numeric_limits<double>::infinity();
    for (const auto& p : scan.points)
        if (&p != &o0) gain = std::max(gain, p.h0.lower - o0.h0.upper);
    const auto c = make_check("grid point above the origin", gain, Relation::Greater, 2 * s.max_width, 10201, "");
    const auto lm = refine_near_origin(fc.ob, fc.ul);
    return {c.passed, fmt::format("best grid point ({:.6f}, {:.6f}) delta {:.4e}, needed > {:.3e}; off-grid point at "
                                  "alpha ({:.3e}, {:.3e}) with delta in [{:.3e}, {:.3e}]",
                                  b.alpha1, b.alpha2, gain, 2 * s.max_width, lm.alpha[0], lm.alpha[1],
                                  lm.delta_h0.lower, lm.delta_h0.upper)};
}

std::set<std::array<std::int64_t, 3>> box_search(const Lattice<3>& lat, double R) {
    RatMat3 g{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            g[i][j] = Rational(static_cast<long long>(std::llround(lat.gram[i][j] * 1e6)), 1000000);
    const auto inv = inverse3(g);
    std::array<std::int64_t, 3> bound{};
    for (int i = 0; i < 3; ++i)
        bound[i] = static_cast<std::int64_t>(std::ceil(std::sqrt(R * static_cast<double>(to_long_double(inv[i][i]))))) + 1;
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

Vec3 random_trace_zero(std::mt19937_64& rng, double rmax) {
    std::uniform_real_distribution<double> r(0.01, 0.999), t(0, 2 * std::numbers::pi);
    return polar_point(rmax * r(rng), t(rng));
}

Vec3 exp_neg(const Vec3& w) { return {std::exp(-w[0]), std::exp(-w[1]), std::exp(-w[2])}; }

Outcome criterion8() {
    const auto& fields = cyclic_fields();
    std::vector<CheckResult> rs;
    std::mt19937_64 rng(20240601);

    double dk = 0;
    for (int s = 0; s < 50; ++s) {
        const auto& ob = fields[s % 3].ob;
        const Vec3 u = exp_neg(random_trace_zero(rng, 1.0));
        const double k = k0(ob, make_divisor(IdealBasis{}, u)).partial;
        dk = std::max({dk, std::fabs(k - k0(ob, make_divisor(IdealBasis{}, cyclic_shift(u))).partial),
                       std::fabs(k - k0(ob, make_divisor(IdealBasis{}, cyclic_shift(cyclic_shift(u)))).partial)});
    }
    rs.push_back(make_check("k0 sigma invariance", dk, Relation::Less, 1e-12, 50, "h0 symmetry"));

    for (std::size_t i = 0; i < fields.size(); ++i) {
        auto r = check_ball(fields[i], 1000, 20240601 + i);
        rs.insert(rs.end(), r.begin(), r.end());
    }

    std::uniform_int_distribution<std::int64_t> coef(-4, 4);
    double dg = 0;
    int ng = 0;
    while (ng < 100) {
        const auto& ob = fields[ng % 3].ob;
        const Vec3 u = exp_neg(random_trace_zero(rng, 1.0));
        const FieldElement f{{coef(rng), coef(rng), coef(rng)}};
        if (f == FieldElement{}) continue;
        const FieldElement sf = apply_sigma(ob, f);
        const double a = g(u, embed(ob, f));
        dg = std::max({dg, std::fabs(a - g(u, embed(ob, sf))), std::fabs(a - g(u, embed(ob, apply_sigma(ob, sf))))});
        ++ng;
    }
    rs.push_back(make_check("G sigma invariance", dg, Relation::Less, 1e-10, ng, "G symmetry"));

    double taylor = -std::numeric_limits<double>::infinity();
    int nt = 0;
    for (const auto& fc : fields) {
        std::vector<FieldElement> large;
        for (const auto& e : enumerate_short(fc.ob.lattice(), 40.0).entries)
            if (e.sq_length >= 9 - 1e-9) large.push_back(FieldElement{e.coords});
        std::uniform_int_distribution<std::size_t> pick(0, large.size() - 1);
        for (int s = 0; s < 34; ++s, ++nt) {
            const Vec3 w = random_trace_zero(rng, kShortRadius);
            const FieldElement f = large[pick(rng)];
            const double sl = static_cast<double>(sq_length(fc.ob, f));
            const double f2 = static_cast<double>(sq_length(fc.ob, mul(fc.ob, f, f)));
            const double gv = g(exp_neg(w), embed(fc.ob, f));
            taylor = std::max({taylor, gv - taylor_bound(norm(w), sl, f2), gv - taylor_bound_large(norm(w), sl)});
        }
    }
    rs.push_back(make_check("G minus Taylor bound", taylor, Relation::LessEqual, 0.0, nt, "Taylor bound for G"));

    int mismatches = 0, ne = 0;
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    while (ne < 100) {
        std::array<Vec3, 3> b{};
        for (auto& v : b)
            for (auto& x : v) x = d(rng);
        b[0][0] += 2;
        b[1][1] += 2;
        b[2][2] += 2;
        auto lat = Lattice<3>::from_basis(b);
        for (auto& row : lat.gram)
            for (auto& x : row) x = std::round(x * 1e6) / 1e6;
        if (!(lat.determinant() > 0.05)) continue;
        const double R = 4.0 + 8.0 * (ne % 5);
        std::set<std::array<std::int64_t, 3>> got;
        for (const auto& e : enumerate_short(lat, R).entries) got.insert(e.coords);
        if (got != box_search(lat, R)) ++mismatches;
        ++ne;
    }
    rs.push_back(make_check("enumeration vs box search mismatches", mismatches, Relation::Equal, 0, ne,
                            "short vector enumeration"));

    int disagree = 0;
    for (int s = 0; s < 50; ++s) {
        const auto& fc = fields[s % 3];
        const GTermsEvaluator ev(fc.ob);
        const PrincipalTheta theta(fc.ob, 200);
        const Vec3 w = random_trace_zero(rng, kShortRadius);
        const auto t = ev.evaluate(w);
        const auto oc = theta.compare_to_origin(w);
        if ((t.partial_sum() + t.tail_upper < 0) != (oc.delta_k0.upper < 0)) ++disagree;
    }
    rs.push_back(make_check("G-sum vs k0 sign disagreements", disagree, Relation::Equal, 0, 50, "equivalence"));
    return fold(rs);
}

struct Criterion {
    int index;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{{1, 1, criterion1},   {2, 5, criterion2},   {3, 1, criterion3},
                                     {4, 120, criterion4}, {5, 120, criterion5}, {6, 1800, criterion6},
                                     {7, 600, criterion7}, {8, 300, criterion8}};
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    if (argc > 2 || (argc > 1 && (only < 1 || only > 8))) {
        fmt::print(stderr, "usage: acceptance [1-8]\n");
        return 2;
    }
    bool ok = true;
    for (const auto& c : all) {
        if (only != 0 && c.index != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_seconds;
        const bool passed = o.passed && in_time;
        ok = ok && passed;
        fmt::print("criterion {} {}: {} ({:.2f} s{})\n", c.index, passed ? "PASS" : "FAIL", o.summary, secs,
                   in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return ok ? 0 : 1;
}
