#pragma once

#include "arakelov/arakelov.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace arakelov::cli {

enum class Command { Field, Units, Theta, Scan, Verify, Counterexample };

struct FieldSpec {
    std::optional<std::int64_t> simplest;
    std::optional<std::array<std::int64_t, 3>> poly;  // c2, c1, c0
};

struct CliConfig {
    Command command = Command::Field;
    FieldSpec field;
    int grid_n = 101;
    double tol = 1e-12;
    unsigned threads = 0;  // 0: all cores
    std::optional<std::string> out_path;
    std::optional<std::string> json_path;
    std::string format = "csv";
    std::optional<Vec3> w;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (!s.empty() && s.back() == ',') parts.emplace_back();
    return parts;
}

inline std::array<std::int64_t, 3> parse_poly(const std::string& s) {
    const auto parts = split_commas(s);
    if (parts.size() != 3) throw UsageError("--poly expects three comma-separated integers c2,c1,c0");
    std::array<std::int64_t, 3> c{};
    for (int i = 0; i < 3; ++i) {
        std::size_t used = 0;
        try {
            c[i] = std::stoll(parts[i], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != parts[i].size()) throw UsageError("--poly: '" + parts[i] + "' is not an integer");
    }
    return c;
}

inline Vec3 parse_w(const std::string& s) {
    const auto parts = split_commas(s);
    if (parts.size() != 3) throw UsageError("--w expects three comma-separated reals");
    Vec3 w{};
    for (int i = 0; i < 3; ++i) {
        std::size_t used = 0;
        try {
            w[i] = std::stod(parts[i], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != parts[i].size()) throw UsageError("--w: '" + parts[i] + "' is not a number");
    }
    return w;
}

/// Parses argv. Returns the config, or an exit code when parsing ended the run
/// (help printed: 0, usage error: 2).
struct ParseOutcome {
    std::optional<CliConfig> config;
    int exit_code = 0;
};

inline ParseOutcome parse_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Arakelov size function h0 on real cubic fields"};
    app.require_subcommand(1);
    CliConfig cfg;
    std::optional<std::int64_t> simplest;
    std::string poly, w;
    const std::vector<std::pair<std::string, Command>> commands{
        {"field", Command::Field},   {"units", Command::Units},   {"theta", Command::Theta},
        {"scan", Command::Scan},     {"verify", Command::Verify}, {"counterexample", Command::Counterexample}};
    const std::vector<std::string> help{
        "integral basis, discriminant, conductor and Galois data",
        "fundamental units and the unit lattice",
        "k0 and h0 of the divisor (O_F, exp(-w))",
        "h0 over a grid of the torus H / Lambda",
        "run the verification suite",
        "look for a class above the trivial one"};
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto* sub = app.add_subcommand(commands[i].first, help[i]);
        sub->add_option("--simplest", simplest, "simplest cubic X^3 - aX^2 - (a+3)X - 1 with parameter a");
        sub->add_option("--poly", poly, "monic cubic X^3 + c2 X^2 + c1 X + c0 as c2,c1,c0");
        sub->add_option("--grid", cfg.grid_n, "grid points per axis")->capture_default_str();
        sub->add_option("--tol", cfg.tol, "certified tolerance")->capture_default_str();
        sub->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
        sub->add_option("--out", cfg.out_path, "machine-readable output file");
        sub->add_option("--json", cfg.json_path, "JSON output file");
        sub->add_option("--format", cfg.format, "csv or json")->capture_default_str();
        if (commands[i].second == Command::Theta) sub->add_option("--w", w, "trace-zero triple w1,w2,w3 (default 0,0,0)");
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return {std::nullopt, 0};
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return {std::nullopt, 2};
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) cfg.command = commands[i].second;
    try {
        if (simplest && !poly.empty()) throw UsageError("give either --simplest or --poly, not both");
        cfg.field.simplest = simplest;
        if (!poly.empty()) cfg.field.poly = parse_poly(poly);
        if (!w.empty()) cfg.w = parse_w(w);
        if (cfg.grid_n < 2) throw UsageError("--grid must be at least 2");
        if (!(cfg.tol > 0 && cfg.tol <= 1e-3)) throw UsageError("--tol must lie in (0, 1e-3]");
        if (cfg.format != "csv" && cfg.format != "json") throw UsageError("--format must be csv or json");
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return {std::nullopt, 2};
    }
    return {cfg, 0};
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string num(double x) { return fmt::format("{:.17g}", x); }

inline std::string poly_string(const std::array<std::int64_t, 3>& c) { return polynomial_label(c); }

/// Power-basis coordinates (coefficients of 1, theta, theta^2) of an order element.
inline std::array<Rational, 3> power_coords(const OrderBasis& ob, const FieldElement& f) {
    std::array<Rational, 3> r{};
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) r[k] += ob.basis[k][j] * Rational(f.coords[j]);
    return r;
}

inline std::string element_string(const std::array<Rational, 3>& pw) {
    std::string s;
    const char* mono[3] = {"", "t", "t^2"};
    for (int k = 0; k < 3; ++k) {
        if (pw[k] == 0) continue;
        const Rational a = abs(pw[k]);
        const bool neg = pw[k] < 0;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        const std::string coef = a.str();
        if (k == 0)
            s += coef;
        else if (a == 1)
            s += mono[k];
        else
            s += (coef.find('/') != std::string::npos ? "(" + coef + ")" : coef) + "*" + mono[k];
    }
    return s.empty() ? "0" : s;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << content;
}

inline nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

inline nlohmann::json report_json(const std::vector<CheckResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : results)
        arr.push_back({{"name", c.name},
                       {"status", c.passed ? "pass" : "fail"},
                       {"lhs", c.lhs},
                       {"rhs", c.rhs},
                       {"margin", c.margin},
                       {"samples", c.samples},
                       {"paper_ref", c.paper_ref}});
    return arr;
}

inline std::string scan_csv(const TorusScan& scan) {
    std::string s = "alpha1,alpha2,h0_lower,h0_upper,delta_vs_origin\n";
    for (const auto& p : scan.points)
        s += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", p.alpha1, p.alpha2, p.h0.lower, p.h0.upper,
                         p.delta_vs_origin);
    return s;
}

inline nlohmann::json scan_json(const TorusScan& scan) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : scan.points)
        pts.push_back({{"alpha1", p.alpha1},
                       {"alpha2", p.alpha2},
                       {"h0_lower", p.h0.lower},
                       {"h0_upper", p.h0.upper},
                       {"delta_vs_origin", p.delta_vs_origin}});
    return {{"grid_n", scan.grid_n}, {"tol", scan.tol}, {"cutoff", scan.cutoff}, {"points", pts}};
}

// ---------------------------------------------------------------------------
// Commands

inline CubicField build_field(const FieldSpec& spec, std::optional<std::array<std::int64_t, 3>> fallback = {}) {
    if (spec.simplest) return build_simplest_cubic(*spec.simplest);
    if (spec.poly) return build_from_poly((*spec.poly)[0], (*spec.poly)[1], (*spec.poly)[2]);
    if (fallback) return build_from_poly((*fallback)[0], (*fallback)[1], (*fallback)[2]);
    throw UsageError("a field is required: --simplest <a> or --poly <c2,c1,c0>");
}

inline void emit_json(const CliConfig& cfg, const nlohmann::json& j) {
    if (cfg.json_path) write_file(*cfg.json_path, j.dump(2) + "\n");
    if (cfg.out_path) write_file(*cfg.out_path, j.dump(2) + "\n");
}

inline int cmd_field(const CliConfig& cfg, std::ostream& out) {
    const auto ob = integral_basis(build_field(cfg.field));
    const auto& f = ob.field;
    out << "polynomial      " << poly_string(f.coeffs) << "  (t a root)\n";
    out << "poly disc       " << f.disc << "\n";
    out << "field disc      " << ob.field_disc << "\n";
    out << "galois          " << (f.is_galois ? "yes" : "no") << "\n";
    if (ob.conductor) out << "conductor       " << *ob.conductor << "\n";
    out << "maximal order   " << (ob.maximal_certified ? "certified" : "not certified") << "\n";
    nlohmann::json basis = nlohmann::json::array();
    for (int j = 0; j < 3; ++j) {
        FieldElement e{};
        e.coords[j] = 1;
        const auto s = element_string(power_coords(ob, e));
        out << "basis b" << j << "        " << s << "\n";
        basis.push_back(s);
    }
    out << "gram (trace)    ";
    nlohmann::json gram = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
        out << (i ? "; " : "") << ob.exact_gram[i][0] << " " << ob.exact_gram[i][1] << " " << ob.exact_gram[i][2];
        gram.push_back({ob.exact_gram[i][0], ob.exact_gram[i][1], ob.exact_gram[i][2]});
    }
    out << "\n";
    out << "covolume        " << num(ob.covolume) << "\n";
    const auto m = f.is_galois ? std::optional<std::int64_t>(min_nonrational_sq_length(ob)) : std::nullopt;
    if (m) out << "min |f|^2 off Z " << *m << "\n";
    nlohmann::json j{{"polynomial", {f.coeffs[0], f.coeffs[1], f.coeffs[2]}},
                     {"poly_disc", f.disc},
                     {"field_disc", ob.field_disc},
                     {"galois", f.is_galois},
                     {"basis", basis},
                     {"gram", gram},
                     {"covolume", ob.covolume}};
    if (ob.conductor) j["conductor"] = *ob.conductor;
    if (m) j["min_sq_length_off_z"] = *m;
    if (ob.sigma) {
        nlohmann::json s = nlohmann::json::array();
        for (int i = 0; i < 3; ++i) s.push_back({ob.sigma->mat[i][0], ob.sigma->mat[i][1], ob.sigma->mat[i][2]});
        j["sigma"] = s;
    }
    emit_json(cfg, j);
    return 0;
}

inline int cmd_units(const CliConfig& cfg, std::ostream& out) {
    const auto ob = integral_basis(build_field(cfg.field));
    const auto ul = find_units(ob);
    const auto e1 = element_string(power_coords(ob, ul.eps1)), e2 = element_string(power_coords(ob, ul.eps2));
    const double regulator = ul.lattice().covolume() / std::sqrt(3.0);
    out << "eps1       " << e1 << "  (norm " << elem_norm(ob, ul.eps1) << ")\n";
    out << "eps2       " << e2 << "  (norm " << elem_norm(ob, ul.eps2) << ")\n";
    out << "b1         " << num(ul.b1[0]) << " " << num(ul.b1[1]) << " " << num(ul.b1[2]) << "\n";
    out << "b2         " << num(ul.b2[0]) << " " << num(ul.b2[1]) << " " << num(ul.b2[2]) << "\n";
    out << "lambda1    " << num(ul.lambda1) << "\n";
    out << "hexagonal  " << (ul.hexagonal ? "yes" : "no") << "\n";
    out << "regulator  " << num(regulator) << "\n";
    emit_json(cfg, {{"eps1", e1},
                    {"eps2", e2},
                    {"b1", vec_json(ul.b1)},
                    {"b2", vec_json(ul.b2)},
                    {"lambda1", ul.lambda1},
                    {"hexagonal", ul.hexagonal},
                    {"regulator", regulator}});
    return 0;
}

inline int cmd_theta(const CliConfig& cfg, std::ostream& out) {
    const auto ob = integral_basis(build_field(cfg.field));
    const Vec3 w = cfg.w.value_or(Vec3{0, 0, 0});
    if (std::fabs(w[0] + w[1] + w[2]) > 1e-9 * (1 + norm(w))) throw UsageError("--w must have component sum 0");
    const auto d = principal_divisor(w);
    const auto tv = k0(ob, d, cfg.tol);
    const auto h = h0(ob, d, cfg.tol);
    out << "w        " << num(w[0]) << " " << num(w[1]) << " " << num(w[2]) << "\n";
    out << "k0       [" << num(tv.lower) << ", " << num(tv.upper) << "]\n";
    out << "h0       [" << num(h.lower) << ", " << num(h.upper) << "]\n";
    out << "width    " << num(h.width()) << "\n";
    out << "cutoff   " << num(tv.cutoff) << "  (" << tv.terms << " vector pairs)\n";
    emit_json(cfg, {{"w", vec_json(w)},
                    {"k0_lower", tv.lower},
                    {"k0_upper", tv.upper},
                    {"h0_lower", h.lower},
                    {"h0_upper", h.upper},
                    {"cutoff", tv.cutoff},
                    {"terms", tv.terms}});
    return 0;
}

inline int cmd_scan(const CliConfig& cfg, std::ostream& out) {
    const auto ob = integral_basis(build_field(cfg.field));
    const auto ul = find_units(ob);
    const auto scan = scan_torus(ob, ul, cfg.grid_n, cfg.tol, cfg.threads);
    const auto s = summarize(scan);
    const auto& o = scan.points[scan.origin_index];
    const auto& m = scan.points[s.argmax];
    const auto& b = scan.points[s.best_gain_index];
    out << "grid        " << cfg.grid_n << "x" << cfg.grid_n << "  (superset " << scan.superset_size << " pairs)\n";
    out << "h0(D0)      [" << num(o.h0.lower) << ", " << num(o.h0.upper) << "]\n";
    out << "argmax      (" << num(m.alpha1) << ", " << num(m.alpha2) << ")"
        << (s.argmax == scan.origin_index ? "  origin" : "") << "\n";
    out << "best other  (" << num(b.alpha1) << ", " << num(b.alpha2) << ")  delta " << num(s.best_gain) << "\n";
    out << "margin      " << num(s.origin_margin) << "  (2 x width " << num(2 * s.max_width) << ")\n";
    if (cfg.out_path) write_file(*cfg.out_path, cfg.format == "json" ? scan_json(scan).dump(2) + "\n" : scan_csv(scan));
    if (cfg.json_path) write_file(*cfg.json_path, scan_json(scan).dump(2) + "\n");
    return 0;
}

inline std::vector<CheckResult> verify_fields(const CliConfig& cfg) {
    std::vector<FieldContext> fields;
    if (cfg.field.simplest || cfg.field.poly) {
        fields.push_back(make_context(build_field(cfg.field)));
    } else {
        for (std::int64_t a : {-1, 0, 1, 2}) fields.push_back(make_context(build_simplest_cubic(a)));
        fields.push_back(make_context(build_from_poly(1, -3, -1)));
    }
    SuiteOptions opt;
    opt.grid_n = cfg.grid_n;
    opt.tol = cfg.tol;
    opt.threads = cfg.threads;
    return run_suite(fields, opt);
}

inline int cmd_verify(const CliConfig& cfg, std::ostream& out) {
    const auto results = verify_fields(cfg);
    std::size_t failed = 0;
    for (const auto& c : results) {
        out << fmt::format("[{}] {} {}: {} vs {} (margin {:.3g}, {} samples)\n", c.index, c.passed ? "PASS" : "FAIL",
                           c.name, num(c.lhs), num(c.rhs), c.margin, c.samples);
        if (!c.passed) ++failed;
    }
    out << fmt::format("{} checks, {} failed\n", results.size(), failed);
    const auto j = report_json(results);
    if (cfg.json_path) write_file(*cfg.json_path, j.dump(2) + "\n");
    if (cfg.out_path) write_file(*cfg.out_path, j.dump(2) + "\n");
    return failed == 0 ? 0 : 1;
}

inline int cmd_counterexample(const CliConfig& cfg, std::ostream& out) {
    const auto ob = integral_basis(build_field(cfg.field, std::array<std::int64_t, 3>{1, -3, -1}));
    const auto ul = find_units(ob);
    const auto lm = refine_near_origin(ob, ul);
    const auto scan = scan_torus(ob, ul, cfg.grid_n, cfg.tol, cfg.threads);
    const auto s = summarize(scan);
    const auto& b = scan.points[s.best_gain_index];
    out << "field          " << poly_string(ob.field.coeffs) << (ob.field.is_galois ? "  (cyclic)" : "") << "\n";
    out << "gradient at 0  " << num(norm(lm.gradient)) << "\n";
    if (lm.found) {
        out << "point above    w = (" << num(lm.w[0]) << ", " << num(lm.w[1]) << ", " << num(lm.w[2]) << ")\n";
        out << "               alpha = (" << num(lm.alpha[0]) << ", " << num(lm.alpha[1]) << ")\n";
    } else {
        out << "point above    none found\n";
    }
    out << "h0 - h0(D0)    [" << num(lm.delta_h0.lower) << ", " << num(lm.delta_h0.upper) << "]\n";
    out << "grid best      (" << num(b.alpha1) << ", " << num(b.alpha2) << ")  delta " << num(s.best_gain) << "  on "
        << cfg.grid_n << "x" << cfg.grid_n << "\n";
    emit_json(cfg, {{"found", lm.found},
                    {"gradient", vec_json(lm.gradient)},
                    {"w", vec_json(lm.w)},
                    {"alpha", {lm.alpha[0], lm.alpha[1]}},
                    {"delta_h0_lower", lm.delta_h0.lower},
                    {"delta_h0_upper", lm.delta_h0.upper},
                    {"grid_n", cfg.grid_n},
                    {"grid_best_alpha", {b.alpha1, b.alpha2}},
                    {"grid_best_delta", s.best_gain}});
    return lm.found ? 0 : 1;
}

/// Exit codes: 0 success, 1 a check failed, 2 usage error.
inline int dispatch(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.command) {
        case Command::Field: return cmd_field(cfg, out);
        case Command::Units: return cmd_units(cfg, out);
        case Command::Theta: return cmd_theta(cfg, out);
        case Command::Scan: return cmd_scan(cfg, out);
        case Command::Verify: return cmd_verify(cfg, out);
        case Command::Counterexample: return cmd_counterexample(cfg, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ReducibleError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedSignatureError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const auto parsed = parse_cli(argc, argv, out, err);
    if (!parsed.config) return parsed.exit_code;
    return dispatch(*parsed.config, out, err);
}

} // namespace arakelov::cli
