#pragma once

#include "varkit/symmetry/noether.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace varkit {

/// A point of the total space E: base and fiber values only (no derivative
/// coordinates). The span condition is pointwise on E.
struct EPoint {
    std::vector<double> x;
    std::vector<double> u;

    JetPoint as_jet_point() const {
        JetPoint p;
        p.x = x;
        for (std::size_t a = 0; a < u.size(); ++a) p.jets[{static_cast<int>(a), MultiIndex{}}] = u[a];
        return p;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
        os << ";";
        for (std::size_t a = 0; a < u.size(); ++a) os << (a ? "," : "") << u[a];
        os << ")";
        return os.str();
    }
};

using Matrix = std::vector<std::vector<double>>;

/// Result of the pointwise span check: a subset of n+m fields whose
/// coefficient matrix B is invertible at the sample point, together with
/// the exact-pivoted inverse C (C * B = identity at the point).
struct SpanSelection {
    std::vector<int> chosen; // indices into the field list, in column order
    Matrix B;                // rows: chosen fields; columns: (base | fiber)
    Matrix C;                // inverse of B
};

namespace detail {

inline Matrix invert(const Matrix& B) {
    const std::size_t d = B.size();
    Matrix a = B;
    Matrix inv(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const double p = a[col][col];
        if (p == 0.0) throw Error("internal: singular matrix escaped the span selection");
        for (std::size_t c = 0; c < d; ++c) {
            a[col][c] /= p;
            inv[col][c] /= p;
        }
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < d; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

} // namespace detail

/// Greedy pivoted selection of n+m fields spanning T_pE at the sample
/// point. Pivoting maximizes the eliminated column entry; ties fall back to
/// declaration order. Throws SpanError with the achieved rank on failure.
inline SpanSelection span_matrix(const std::vector<ProjectableVectorField>& fields,
                                 const JetSpace& space, const EPoint& p) {
    const int n = space.base_dim();
    const int m = space.fiber_dim();
    const int dim = n + m;
    if (static_cast<int>(fields.size()) < dim)
        throw SpanError("span check needs at least " + std::to_string(dim) + " fields, got " +
                            std::to_string(fields.size()),
                        0);
    const JetPoint jp = p.as_jet_point();

    // full coefficient matrix, one row per candidate field
    Matrix rows;
    double scale = 0.0;
    for (const auto& V : fields) {
        std::vector<double> row;
        for (int i = 0; i < n; ++i) row.push_back(V.base_component(i).eval(jp));
        for (int a = 0; a < m; ++a) row.push_back(V.fiber_component(a).eval(jp));
        for (double v : row) scale = std::max(scale, std::abs(v));
        rows.push_back(std::move(row));
    }
    const double tol = 1e-12 * (1.0 + scale);

    // Gaussian elimination with row selection: work[f] is the reduced row of
    // field f against the already-chosen pivots.
    Matrix work = rows;
    std::vector<bool> used(fields.size(), false);
    std::vector<int> chosen;
    for (int col = 0; col < dim; ++col) {
        int best = -1;
        for (std::size_t f = 0; f < fields.size(); ++f) {
            if (used[f]) continue;
            if (best < 0 || std::abs(work[f][static_cast<std::size_t>(col)]) >
                                std::abs(work[static_cast<std::size_t>(best)][static_cast<std::size_t>(col)]))
                best = static_cast<int>(f);
        }
        if (best < 0 || std::abs(work[static_cast<std::size_t>(best)][static_cast<std::size_t>(col)]) <= tol)
            throw SpanError("span condition fails at " + p.to_string() + ": rank " +
                                std::to_string(col) + " of " + std::to_string(dim),
                            col);
        used[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
        // eliminate this column from all unused rows
        const auto& pivot_row = work[static_cast<std::size_t>(best)];
        const double pivot = pivot_row[static_cast<std::size_t>(col)];
        for (std::size_t f = 0; f < fields.size(); ++f) {
            if (used[f]) continue;
            const double factor = work[f][static_cast<std::size_t>(col)] / pivot;
            if (factor == 0.0) continue;
            for (int c = 0; c < dim; ++c)
                work[f][static_cast<std::size_t>(c)] -= factor * pivot_row[static_cast<std::size_t>(c)];
        }
    }

    SpanSelection out;
    out.chosen = chosen;
    for (int f : chosen) out.B.push_back(rows[static_cast<std::size_t>(f)]);
    out.C = detail::invert(out.B);
    return out;
}

/// The transformed ECS at a sample point: linear combinations of the
/// per-field ECS residuals that isolate one base direction (equation I,
/// indexed (j, alpha)) or one fiber direction (equation II, indexed
/// (gamma, alpha)). Both vanish identically when the symmetry and
/// continuity hypotheses hold.
struct TransformedEcs {
    int n = 0;
    int m = 0;
    std::vector<JetExpr> eqI;  // (j, alpha) row-major
    std::vector<JetExpr> eqII; // (gamma, alpha) row-major

    const JetExpr& I(int j, int alpha) const { return eqI.at(static_cast<std::size_t>(j * m + alpha)); }
    const JetExpr& II(int gamma, int alpha) const {
        return eqII.at(static_cast<std::size_t>(gamma * m + alpha));
    }

    bool all_zero() const {
        for (const auto& e : eqI)
            if (!e.is_zero()) return false;
        for (const auto& e : eqII)
            if (!e.is_zero()) return false;
        return true;
    }
};

inline TransformedEcs transformed_ecs(const std::vector<ProjectableVectorField>& selected,
                                      const SourceForm& delta, const Matrix& C) {
    const JetSpace& s = delta.space();
    const int n = s.base_dim();
    const int m = s.fiber_dim();
    if (static_cast<int>(selected.size()) != n + m)
        throw Error("transformed ECS needs exactly n+m fields");

    const HelmholtzTensor tensor = helmholtz(delta);
    std::vector<SourceForm> ecs;
    ecs.reserve(selected.size());
    for (const auto& V : selected) ecs.push_back(ecs_residual_from_tensor(V, tensor));

    auto combine = [&](int row, int alpha) {
        JetExpr acc(s);
        for (int A = 0; A < n + m; ++A) {
            const double c = C.at(static_cast<std::size_t>(row)).at(static_cast<std::size_t>(A));
            if (c == 0.0) continue;
            acc += rational_from_double(c) * ecs[static_cast<std::size_t>(A)].coefficient(alpha);
        }
        return acc;
    };

    TransformedEcs out;
    out.n = n;
    out.m = m;
    // equation II first: rows n..n+m-1 of C isolate the fiber directions
    for (int g = 0; g < m; ++g)
        for (int a = 0; a < m; ++a) out.eqII.push_back(combine(n + g, a));
    // equation I: base rows plus u^g_j times the fiber rows, eliminating H
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < m; ++a) {
            JetExpr e = combine(j, a);
            for (int g = 0; g < m; ++g)
                e += JetExpr::coordinate(s, g, {j}) * out.II(g, a);
            out.eqI.push_back(std::move(e));
        }
    return out;
}

/// Structured verdict of the full hypothesis check: per-field symmetry and
/// continuity verdicts, pointwise span checks, the Helmholtz tensor with
/// its components reported in the order H^{ij}, H^i, H, and, for a
/// variational form, the reconstructed Lagrangian. The report never claims
/// an implication; it states what was verified on this instance.
struct TakensReport {
    struct FieldCheck {
        std::string name;
        bool symmetric = false;
        bool symmetry_probabilistic = false;
        std::string symmetry_residual;
        bool continuity = false;
        bool continuity_probabilistic = false;
        std::string continuity_residual;
    };

    struct PointCheck {
        EPoint point;
        bool span_ok = false;
        int rank = 0;
        std::vector<int> chosen;
        std::vector<std::string> chosen_names;
        std::string failure;
        bool transformed_ecs_zero = false;
    };

    /// Per-instance restatement of the proof-order conclusions: the
    /// structure conditions, then H^{ij} = 0, H^i of order <= 2, H of order
    /// <= 2, the same-pair identity d^{ii} H^i = 0, then H^i = 0, H = 0.
    struct Trace {
        bool structure_pass = false;
        bool hij_zero = false;
        bool hi_order_le2 = false;
        bool h_order_le2 = false;
        bool same_pair_identity = false;
        bool hi_zero = false;
        bool h_zero = false;
    };

    std::vector<FieldCheck> fields;
    std::vector<PointCheck> points;

    bool hij_zero = false;
    bool hi_zero = false;
    bool h_zero = false;
    bool variational = false;
    std::vector<std::string> nonzero_components;

    bool has_lagrangian = false;
    std::string lagrangian;
    bool lagrangian_verified = false;

    std::optional<Trace> trace;

    bool hypotheses_ok() const {
        for (const auto& f : fields)
            if (!f.symmetric || !f.continuity) return false;
        for (const auto& p : points)
            if (!p.span_ok) return false;
        return !fields.empty() && !points.empty();
    }

    bool all_pass() const { return hypotheses_ok() && variational; }
};

inline TakensReport takens_report(const SourceForm& delta,
                                  const std::vector<ProjectableVectorField>& fields,
                                  const std::vector<EPoint>& sample_points, bool with_trace = false) {
    require_second_order(delta, "the hypothesis report");
    const JetSpace& s = delta.space();
    TakensReport report;

    for (const auto& V : fields) {
        TakensReport::FieldCheck fc;
        fc.name = V.name();
        const SymmetryCheck sym = is_symmetry(V, delta);
        fc.symmetric = sym.symmetric;
        fc.symmetry_probabilistic = sym.probabilistic;
        if (!sym.symmetric) {
            std::string r;
            for (int a = 0; a < s.fiber_dim(); ++a) {
                if (a) r += "; ";
                r += sym.residual.coefficient(a).to_string();
            }
            fc.symmetry_residual = r;
        }
        const SourceForm cont = continuity_residual(V, delta);
        fc.continuity = true;
        std::string cr;
        for (int a = 0; a < s.fiber_dim(); ++a) {
            const Equality eq = check_equal(cont.coefficient(a), JetExpr::zero(s));
            fc.continuity = fc.continuity && eq.equal;
            fc.continuity_probabilistic = fc.continuity_probabilistic || eq.probabilistic;
            if (!eq.equal) {
                if (!cr.empty()) cr += "; ";
                cr += cont.coefficient(a).to_string();
            }
        }
        fc.continuity_residual = cr;
        report.fields.push_back(std::move(fc));
    }

    for (const auto& p : sample_points) {
        TakensReport::PointCheck pc;
        pc.point = p;
        try {
            const SpanSelection sel = span_matrix(fields, s, p);
            pc.span_ok = true;
            pc.rank = s.base_dim() + s.fiber_dim();
            pc.chosen = sel.chosen;
            for (int f : sel.chosen) pc.chosen_names.push_back(fields.at(static_cast<std::size_t>(f)).name());
            std::vector<ProjectableVectorField> selected;
            for (int f : sel.chosen) selected.push_back(fields.at(static_cast<std::size_t>(f)));
            pc.transformed_ecs_zero = transformed_ecs(selected, delta, sel.C).all_zero();
        } catch (const SpanError& err) {
            pc.span_ok = false;
            pc.rank = err.rank_achieved;
            pc.failure = err.what();
        }
        report.points.push_back(std::move(pc));
    }

    // Helmholtz verdict, reported in the conclusion order H^{ij}, H^i, H.
    const HelmholtzTensor tensor = helmholtz(delta);
    report.hij_zero = tensor.hij_all_zero();
    report.hi_zero = tensor.hi_all_zero();
    report.h_zero = tensor.h_all_zero();
    report.variational = report.hij_zero && report.hi_zero && report.h_zero;
    const int n = s.base_dim();
    const int m = s.fiber_dim();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (!tensor.Hij(i, j, a, b).is_zero())
                        report.nonzero_components.push_back(
                            "H^{" + s.base_name(i) + s.base_name(j) + "}[" + s.fiber_name(a) + "," +
                            s.fiber_name(b) + "] = " + tensor.Hij(i, j, a, b).to_string());
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (!tensor.Hi(i, a, b).is_zero())
                    report.nonzero_components.push_back("H^" + s.base_name(i) + "[" + s.fiber_name(a) +
                                                        "," + s.fiber_name(b) +
                                                        "] = " + tensor.Hi(i, a, b).to_string());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (!tensor.H(a, b).is_zero())
                report.nonzero_components.push_back("H[" + s.fiber_name(a) + "," + s.fiber_name(b) +
                                                    "] = " + tensor.H(a, b).to_string());

    if (report.variational) {
        bool polynomial = true;
        for (const auto& c : delta.coefficients())
            if (c.has_atoms()) polynomial = false;
        if (polynomial) {
            const LagrangeForm L = vainberg_tonti(delta);
            report.has_lagrangian = true;
            report.lagrangian = L.L.to_string();
            const SourceForm back = euler_lagrange(L);
            report.lagrangian_verified = true;
            for (int a = 0; a < m; ++a)
                if (!(back.coefficient(a) - delta.coefficient(a)).is_zero())
                    report.lagrangian_verified = false;
        }
    }

    if (with_trace) {
        TakensReport::Trace tr;
        tr.structure_pass = anderson_duchamp_check(delta).pass();
        tr.hij_zero = report.hij_zero;
        tr.hi_zero = report.hi_zero;
        tr.h_zero = report.h_zero;
        tr.hi_order_le2 = true;
        tr.h_order_le2 = true;
        tr.same_pair_identity = true;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                if (tensor.H(a, b).order() > 2) tr.h_order_le2 = false;
                for (int i = 0; i < n; ++i) {
                    if (tensor.Hi(i, a, b).order() > 2) tr.hi_order_le2 = false;
                    for (int g = 0; g < m; ++g)
                        if (!tensor.Hi(i, a, b).weighted_partial(g, {i, i}).is_zero())
                            tr.same_pair_identity = false;
                }
            }
        report.trace = tr;
    }

    return report;
}

} // namespace varkit
