#pragma once

#include "varkit/dsl/parser.hpp"
#include "varkit/dsl/report.hpp"
#include "varkit/numeric/verify.hpp"
#include "varkit/symmetry/takens.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace varkit::dsl {

struct Options {
    std::string command;
    std::string file;
    std::string field;
    std::string current;
    std::vector<double> points;     // flat list, base coordinates per point
    bool trace = false;
    std::string section_expr;
    std::string test_expr;
    std::vector<double> domain;     // a,b (1-D) or ax,bx,ay,by (2-D)
    double epsilon = 1e-4;
    long long count_n = 0;
    long long count_m = 0;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string canonical_flags(const Options& o) {
    std::string f;
    if (!o.field.empty()) f += " --field " + o.field;
    if (!o.current.empty()) f += " --current " + o.current;
    if (!o.points.empty()) {
        f += " --points ";
        for (std::size_t i = 0; i < o.points.size(); ++i) {
            if (i) f += ",";
            std::ostringstream ss;
            ss << o.points[i];
            f += ss.str();
        }
    }
    if (o.trace) f += " --trace";
    if (!o.section_expr.empty()) f += " --section " + o.section_expr;
    if (!o.test_expr.empty()) f += " --test " + o.test_expr;
    if (!o.domain.empty()) {
        f += " --domain ";
        for (std::size_t i = 0; i < o.domain.size(); ++i) {
            std::ostringstream ss;
            ss << o.domain[i];
            f += (i ? "," : "") + ss.str();
        }
    }
    if (o.epsilon != 1e-4) {
        std::ostringstream ss;
        ss << o.epsilon;
        f += " --epsilon " + ss.str();
    }
    if (o.command == "count") f += " " + std::to_string(o.count_n) + " " + std::to_string(o.count_m);
    return f.empty() ? "" : f.substr(1);
}

inline std::string verdict_of(const Equality& eq) { return eq.equal ? "pass" : "fail"; }

/// Splits a flag value at top-level commas and parses each piece in the
/// model's coordinate environment.
inline std::vector<JetExpr> parse_expression_list(const ModelFile& model, const std::string& text) {
    std::vector<JetExpr> out;
    int depth = 0;
    std::string piece;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(parse_expression_in(model, piece));
            piece.clear();
        } else {
            piece += c;
        }
    }
    out.push_back(parse_expression_in(model, piece));
    return out;
}

// ----- command bodies -------------------------------------------------------

inline void cmd_check_variational(const ModelFile& model, ReportDocument& rep) {
    const SourceForm delta = model.source_form();
    const VariationalityResult vr = is_locally_variational(delta);
    const JetSpace& s = model.space;
    const JetExpr zero = JetExpr::zero(s);

    auto group_check = [&](const std::string& name, auto getter, int count) {
        bool ok = true, prob = false;
        std::string witness;
        for (int k = 0; k < count; ++k) {
            const JetExpr& e = getter(k);
            if (e.is_zero()) continue;
            const Equality eq = check_equal(e, zero);
            prob = prob || eq.probabilistic;
            if (!eq.equal && ok) {
                ok = false;
                witness = e.to_string();
            }
        }
        rep.add_check(name, ok, witness, prob);
    };

    const int n = s.base_dim(), m = s.fiber_dim();
    group_check("Helmholtz H^{ij} components vanish",
                [&](int k) -> const JetExpr& {
                    const int b = k % m, a = (k / m) % m, j = (k / (m * m)) % n, i = k / (m * m * n);
                    return vr.tensor.Hij(i, j, a, b);
                },
                n * n * m * m);
    group_check("Helmholtz H^i components vanish",
                [&](int k) -> const JetExpr& {
                    const int b = k % m, a = (k / m) % m, i = k / (m * m);
                    return vr.tensor.Hi(i, a, b);
                },
                n * m * m);
    group_check("Helmholtz H components vanish",
                [&](int k) -> const JetExpr& { return vr.tensor.H(k / m, k % m); }, m * m);
    rep.add_check("locally variational", vr.variational, "", vr.probabilistic);

    nlohmann::ordered_json nonzero = nlohmann::ordered_json::array();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (!vr.tensor.Hij(i, j, a, b).is_zero())
                        nonzero.push_back("H^{" + s.base_name(i) + s.base_name(j) + "}[" +
                                          s.fiber_name(a) + "," + s.fiber_name(b) +
                                          "] = " + vr.tensor.Hij(i, j, a, b).to_string());
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (!vr.tensor.Hi(i, a, b).is_zero())
                    nonzero.push_back("H^" + s.base_name(i) + "[" + s.fiber_name(a) + "," +
                                      s.fiber_name(b) + "] = " + vr.tensor.Hi(i, a, b).to_string());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (!vr.tensor.H(a, b).is_zero())
                nonzero.push_back("H[" + s.fiber_name(a) + "," + s.fiber_name(b) +
                                  "] = " + vr.tensor.H(a, b).to_string());
    rep.data["nonzero_components"] = nonzero;
    rep.exit_code = rep.all_checks_pass() ? 0 : 1;
}

inline void cmd_lagrangian(const ModelFile& model, ReportDocument& rep) {
    const SourceForm delta = model.source_form();
    const LagrangeForm L = vainberg_tonti(delta);
    rep.data["lagrangian"] = L.L.to_string();
    const SourceForm back = euler_lagrange(L);
    bool ok = true, prob = false;
    std::string witness;
    for (int a = 0; a < model.space.fiber_dim(); ++a) {
        const Equality eq = check_equal(back.coefficient(a), delta.coefficient(a));
        prob = prob || eq.probabilistic;
        if (!eq.equal && ok) {
            ok = false;
            witness = "EL(L)_" + model.space.fiber_name(a) + " = " + back.coefficient(a).to_string();
        }
    }
    rep.add_check("Euler-Lagrange of the candidate reproduces the source form", ok, witness, prob);
    rep.exit_code = ok ? 0 : 1;
}

inline const ProjectableVectorField& require_field(const ModelFile& model, const std::string& name) {
    const ProjectableVectorField* V = model.find_field(name);
    if (!V) throw Error("model declares no vector field named '" + name + "'");
    return *V;
}

inline void cmd_symmetry(const ModelFile& model, const Options& o, ReportDocument& rep) {
    if (o.field.empty()) throw Error("symmetry needs --field NAME");
    const ProjectableVectorField& V = require_field(model, o.field);
    const SymmetryCheck sym = is_symmetry(V, model.source_form());
    std::string witness;
    if (!sym.symmetric)
        for (int a = 0; a < model.space.fiber_dim(); ++a) {
            if (a) witness += "; ";
            witness += sym.residual.coefficient(a).to_string();
        }
    rep.add_check("Lie derivative along " + o.field + " vanishes", sym.symmetric, witness,
                  sym.probabilistic);
    rep.exit_code = sym.symmetric ? 0 : 1;
}

inline void cmd_conservation(const ModelFile& model, const Options& o, ReportDocument& rep) {
    if (o.field.empty()) throw Error("conservation needs --field NAME");
    const ProjectableVectorField& V = require_field(model, o.field);
    const SourceForm delta = model.source_form();
    const JetSpace& s = model.space;

    const SourceForm residual = continuity_residual(V, delta);
    bool ok = true, prob = false;
    std::string witness;
    for (int a = 0; a < s.fiber_dim(); ++a) {
        const Equality eq = check_equal(residual.coefficient(a), JetExpr::zero(s));
        prob = prob || eq.probabilistic;
        if (!eq.equal) {
            ok = false;
            if (!witness.empty()) witness += "; ";
            witness += residual.coefficient(a).to_string();
        }
    }
    rep.add_check("continuity residual of " + o.field + " vanishes", ok, witness, prob);

    if (!o.current.empty()) {
        const CurrentDensity* J = model.find_current(o.current);
        if (!J) throw Error("model declares no current named '" + o.current + "'");
        const Equality eq = check_current(characteristic(V), delta, *J);
        rep.add_check("current " + o.current + " satisfies D_i J^i = Q^a f_a", eq.equal, "",
                      eq.probabilistic);
    } else if (s.base_dim() == 1 && ok) {
        try {
            const CurrentDensity J = construct_current_ode(characteristic(V), delta);
            rep.add_check("current construction", true);
            rep.data["current"] = J.component(0).to_string();
        } catch (const NoCurrentError& err) {
            rep.add_check("current construction", false, err.what());
        }
    }
    rep.exit_code = rep.all_checks_pass() ? 0 : 1;
}

inline void cmd_ecs(const ModelFile& model, const Options& o, ReportDocument& rep) {
    if (o.field.empty()) throw Error("ecs needs --field NAME");
    const ProjectableVectorField& V = require_field(model, o.field);
    const SourceForm residual = ecs_residual(V, model.source_form());
    bool ok = true, prob = false;
    std::string witness;
    for (int a = 0; a < model.space.fiber_dim(); ++a) {
        const Equality eq = check_equal(residual.coefficient(a), JetExpr::zero(model.space));
        prob = prob || eq.probabilistic;
        if (!eq.equal) {
            ok = false;
            if (!witness.empty()) witness += "; ";
            witness += "[" + model.space.fiber_name(a) + "] " + residual.coefficient(a).to_string();
        }
    }
    rep.add_check("ECS residual of " + o.field + " vanishes", ok, witness, prob);
    rep.exit_code = ok ? 0 : 1;
}

inline void cmd_takens(const ModelFile& model, const Options& o, ReportDocument& rep) {
    const SourceForm delta = model.source_form();
    const JetSpace& s = model.space;
    const int n = s.base_dim(), m = s.fiber_dim();

    std::vector<ProjectableVectorField> fields;
    for (const auto& [name, V] : model.fields) fields.push_back(V);
    if (fields.empty()) throw Error("takens needs at least one vectorfield block in the model");

    Rng rng(rep.seed);
    std::vector<EPoint> pts;
    if (!o.points.empty()) {
        if (o.points.size() % static_cast<std::size_t>(n) != 0)
            throw Error("--points needs " + std::to_string(n) + " coordinate(s) per sample point");
        for (std::size_t k = 0; k < o.points.size(); k += static_cast<std::size_t>(n)) {
            EPoint p;
            for (int i = 0; i < n; ++i) p.x.push_back(o.points[k + static_cast<std::size_t>(i)]);
            for (int a = 0; a < m; ++a) p.u.push_back(rng.uniform(-2.0, 2.0));
            pts.push_back(std::move(p));
        }
    } else {
        for (int k = 0; k < 5; ++k) {
            EPoint p;
            for (int i = 0; i < n; ++i) p.x.push_back(rng.uniform(-2.0, 2.0));
            for (int a = 0; a < m; ++a) p.u.push_back(rng.uniform(-2.0, 2.0));
            pts.push_back(std::move(p));
        }
    }

    const TakensReport tk = takens_report(delta, fields, pts, o.trace);

    for (const auto& f : tk.fields) {
        rep.add_check("symmetry: " + f.name, f.symmetric, f.symmetry_residual,
                      f.symmetry_probabilistic);
        rep.add_check("continuity: " + f.name, f.continuity, f.continuity_residual,
                      f.continuity_probabilistic);
    }
    nlohmann::ordered_json points_json = nlohmann::ordered_json::array();
    for (const auto& p : tk.points) {
        std::string basis;
        for (std::size_t k = 0; k < p.chosen_names.size(); ++k)
            basis += (k ? ", " : "") + p.chosen_names[k];
        rep.add_check("span at " + p.point.to_string(), p.span_ok,
                      p.span_ok ? "sub-basis {" + basis + "}" : p.failure);
        if (p.span_ok)
            rep.add_check("transformed ECS at " + p.point.to_string(), p.transformed_ecs_zero);
        points_json.push_back(p.point.to_string());
    }
    rep.data["sample_points"] = points_json;

    rep.add_check("Helmholtz H^{ij} components vanish", tk.hij_zero);
    rep.add_check("Helmholtz H^i components vanish", tk.hi_zero);
    rep.add_check("Helmholtz H components vanish", tk.h_zero);
    rep.add_check("locally variational", tk.variational,
                  tk.variational ? "" : "nonzero Helmholtz components remain");
    if (!tk.nonzero_components.empty()) {
        nlohmann::ordered_json nz = nlohmann::ordered_json::array();
        for (const auto& c : tk.nonzero_components) nz.push_back(c);
        rep.data["nonzero_components"] = nz;
    }
    if (tk.has_lagrangian) {
        rep.data["lagrangian"] = tk.lagrangian;
        rep.add_check("Euler-Lagrange of the Lagrangian reproduces the source form",
                      tk.lagrangian_verified);
    }
    if (tk.trace) {
        nlohmann::ordered_json tr;
        tr["structure_conditions"] = tk.trace->structure_pass;
        tr["Hij_zero"] = tk.trace->hij_zero;
        tr["Hi_order_le_2"] = tk.trace->hi_order_le2;
        tr["H_order_le_2"] = tk.trace->h_order_le2;
        tr["same_pair_derivative_of_Hi_zero"] = tk.trace->same_pair_identity;
        tr["Hi_zero"] = tk.trace->hi_zero;
        tr["H_zero"] = tk.trace->h_zero;
        rep.data["trace"] = tr;
    }
    rep.exit_code = rep.all_checks_pass() ? 0 : 1;
}

inline void cmd_weak_check(const ModelFile& model, const Options& o, ReportDocument& rep) {
    const SourceForm delta = model.source_form();
    const JetSpace& s = model.space;
    if (o.section_expr.empty() || o.test_expr.empty() || o.domain.empty())
        throw Error("weak-check needs --section, --test and --domain");

    GridSpec grid;
    if (o.domain.size() == 2) grid = GridSpec::interval(o.domain[0], o.domain[1]);
    else if (o.domain.size() == 4)
        grid = GridSpec::rectangle(o.domain[0], o.domain[1], o.domain[2], o.domain[3]);
    else
        throw Error("--domain needs 2 bounds (1-D) or 4 bounds (2-D)");
    if (grid.dim != s.base_dim()) throw Error("--domain dimension does not match the model base");

    std::vector<XPoly> section_polys;
    for (const auto& e : parse_expression_list(model, o.section_expr)) {
        if (!e.is_x_polynomial()) throw Error("--section must be polynomial in the base coordinates");
        section_polys.push_back(e.to_xpoly());
    }
    if (static_cast<int>(section_polys.size()) != s.fiber_dim())
        throw Error("--section needs one component per fiber coordinate");
    const SectionPolynomial section(s, section_polys);

    std::vector<TestFunction> phis;
    for (const auto& e : parse_expression_list(model, o.test_expr)) {
        if (!e.is_x_polynomial()) throw Error("--test must be polynomial in the base coordinates");
        phis.emplace_back(grid, e.to_xpoly());
    }
    if (static_cast<int>(phis.size()) != s.fiber_dim())
        throw Error("--test needs one component per fiber coordinate");

    const LagrangeForm L = vainberg_tonti(delta);
    rep.data["lagrangian"] = L.L.to_string();

    const WeakFormResult r1 = weak_form_check(delta, L, section, phis, grid, o.epsilon);
    const WeakFormResult r2 = weak_form_check(delta, L, section, phis, grid, o.epsilon / 2.0);
    auto describe = [](const WeakFormResult& r) {
        std::ostringstream ss;
        ss << "fd=" << r.fd_variation << " pairing=" << r.pairing << " residual=" << r.residual
           << " relative=" << r.relative;
        return ss.str();
    };
    if (r1.inconclusive)
        rep.add_inconclusive("weak form residual at eps", describe(r1));
    else
        rep.add_check("weak form residual at eps", r1.pass, describe(r1));
    if (r2.inconclusive)
        rep.add_inconclusive("weak form residual at eps/2", describe(r2));
    else
        rep.add_check("weak form residual at eps/2", r2.pass, describe(r2));

    // second-order scaling of the truncation: residuals at the noise floor
    // count as confirmed, otherwise halving the step must shrink the
    // residual by about four
    const bool floor = r1.residual <= 1e-12 && r2.residual <= 1e-12;
    const double ratio = r2.residual > 0 ? r1.residual / r2.residual : 4.0;
    const bool scaling = floor || (ratio >= 3.0 && ratio <= 5.0);
    std::ostringstream sc;
    sc << "residual(eps)/residual(eps/2) = " << (floor ? std::string("noise floor") : ([&] {
            std::ostringstream r;
            r << ratio;
            return r.str();
        })());
    rep.add_check("finite-difference truncation scales as eps^2", scaling, sc.str());

    const bool conclusive_pass =
        (r1.pass || r1.inconclusive) && (r2.pass || r2.inconclusive) && scaling;
    rep.exit_code = conclusive_pass ? 0 : 1;
}

inline void cmd_count(const Options& o, ReportDocument& rep) {
    const long long value = independent_helmholtz_count(o.count_n, o.count_m);
    rep.data["n"] = o.count_n;
    rep.data["m"] = o.count_m;
    rep.data["independent_helmholtz_expressions"] = value;
    rep.add_check("count", true, std::to_string(value));
    rep.exit_code = 0;
}

} // namespace detail

/// Runs one CLI command. Exit codes: 0 all checks pass, 1 a mathematical
/// check failed, 2 usage or parse error.
inline ReportDocument run(const Options& o) {
    const auto started = std::chrono::steady_clock::now();
    ReportDocument rep;
    rep.command = o.command;
    rep.input_file = o.file;
    rep.flags = detail::canonical_flags(o);
    rep.seed = global_seed();
    try {
        if (o.command == "count") {
            rep.input_digest = fnv1a_hex(rep.flags);
            detail::cmd_count(o, rep);
        } else {
            const std::string text = detail::read_file(o.file);
            rep.input_digest = fnv1a_hex(text + "\n" + o.command + "\n" + rep.flags);
            const ModelFile model = parse(text);
            if (o.command == "check-variational") detail::cmd_check_variational(model, rep);
            else if (o.command == "lagrangian") detail::cmd_lagrangian(model, rep);
            else if (o.command == "symmetry") detail::cmd_symmetry(model, o, rep);
            else if (o.command == "conservation") detail::cmd_conservation(model, o, rep);
            else if (o.command == "ecs") detail::cmd_ecs(model, o, rep);
            else if (o.command == "takens") detail::cmd_takens(model, o, rep);
            else if (o.command == "weak-check") detail::cmd_weak_check(model, o, rep);
            else throw Error("unknown command '" + o.command + "'");
        }
    } catch (const ParseError& err) {
        rep.checks.push_back({"parse", "fail", err.what(), false});
        rep.exit_code = 2;
    } catch (const UnsupportedOrderError& err) {
        rep.checks.push_back({"input", "fail", err.what(), false});
        rep.exit_code = 2;
    } catch (const UnsupportedInputError& err) {
        rep.checks.push_back({"input", "fail", err.what(), false});
        rep.exit_code = 2;
    } catch (const Error& err) {
        rep.checks.push_back({"usage", "fail", err.what(), false});
        rep.exit_code = 2;
    }
    rep.timing_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    return rep;
}

} // namespace varkit::dsl
