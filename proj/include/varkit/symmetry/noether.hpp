#pragma once

#include "varkit/symmetry/vector_field.hpp"
#include "varkit/varcalc/operators.hpp"

#include <utility>
#include <vector>

namespace varkit {

/// Lie derivative of a second-order source form along the prolongation of a
/// projectable field, expanded coefficientwise:
///   (L_{j2 V} Delta)_alpha = j2V(f_alpha) + f_beta d_alpha V^beta
///                            + f_alpha d_i V^i.
inline SourceForm lie_derivative_source(const ProjectableVectorField& V, const SourceForm& delta) {
    require_second_order(delta, "the source-form Lie derivative");
    const JetSpace& s = delta.space();
    const ProlongedVectorField j2V = prolong(V, std::max(2, delta.order()));
    JetExpr div_base(s);
    for (int i = 0; i < s.base_dim(); ++i) div_base += V.base_component(i).partial_base(i);
    std::vector<JetExpr> out;
    for (int a = 0; a < s.fiber_dim(); ++a) {
        JetExpr c = j2V.apply(delta.coefficient(a));
        for (int b = 0; b < s.fiber_dim(); ++b)
            c += delta.coefficient(b) * V.fiber_component(b).partial_jet(a, {});
        c += delta.coefficient(a) * div_base;
        out.push_back(std::move(c));
    }
    return SourceForm(s, std::move(out));
}

struct SymmetryCheck {
    bool symmetric = false;
    bool probabilistic = false;
    SourceForm residual;
};

/// A symmetry is a projectable field whose prolongation annihilates the
/// source form identically on the whole jet space, not only on solutions.
inline SymmetryCheck is_symmetry(const ProjectableVectorField& V, const SourceForm& delta) {
    SourceForm residual = lie_derivative_source(V, delta);
    SymmetryCheck out{true, false, residual};
    for (const auto& c : residual.coefficients()) {
        const Equality eq = check_equal(c, JetExpr::zero(delta.space()));
        out.symmetric = out.symmetric && eq.equal;
        out.probabilistic = out.probabilistic || eq.probabilistic;
    }
    return out;
}

/// Euler-Lagrange expressions of the contracted Lagrangian V_ch^beta
/// f_beta; identically zero exactly when the local continuity equation for
/// the characteristic of V holds.
inline SourceForm continuity_residual(const ProjectableVectorField& V, const SourceForm& delta) {
    require_second_order(delta, "the continuity residual");
    const JetSpace& s = delta.space();
    const std::vector<JetExpr> ch = characteristic(V);
    JetExpr L(s);
    for (int b = 0; b < s.fiber_dim(); ++b) L += ch[b] * delta.coefficient(b);
    return euler_lagrange(LagrangeForm(std::move(L)));
}

/// Pairing of the Helmholtz tensor with a characteristic: the linear
/// constraint a symmetry with a continuity equation imposes on the
/// Helmholtz expressions.
inline SourceForm ecs_residual_from_tensor(const ProjectableVectorField& V,
                                           const HelmholtzTensor& t) {
    const JetSpace& s = t.space();
    const std::vector<JetExpr> ch = characteristic(V);
    std::vector<JetExpr> out;
    for (int a = 0; a < s.fiber_dim(); ++a) {
        JetExpr acc(s);
        for (int b = 0; b < s.fiber_dim(); ++b) {
            if (!t.H(a, b).is_zero()) acc += ch[b] * t.H(a, b);
            for (int i = 0; i < s.base_dim(); ++i) {
                if (!t.Hi(i, a, b).is_zero()) acc += ch[b].total_derivative(i) * t.Hi(i, a, b);
                for (int j = 0; j < s.base_dim(); ++j) {
                    const JetExpr& hij = t.Hij(j, i, a, b);
                    if (!hij.is_zero())
                        acc += ch[b].total_derivative(i).total_derivative(j) * hij;
                }
            }
        }
        out.push_back(std::move(acc));
    }
    return SourceForm(s, std::move(out));
}

inline SourceForm ecs_residual(const ProjectableVectorField& V, const SourceForm& delta) {
    require_second_order(delta, "the ECS residual");
    return ecs_residual_from_tensor(V, helmholtz(delta));
}

/// Decomposition of the source-form Lie derivative into the
/// Euler-Lagrange part and the Helmholtz (ECS) part. The two summands must
/// reproduce lie_derivative_source exactly; a mismatch is an internal error.
inline std::pair<SourceForm, SourceForm> noether_decomposition(const ProjectableVectorField& V,
                                                               const SourceForm& delta) {
    SourceForm el = continuity_residual(V, delta);
    SourceForm ecs = ecs_residual(V, delta);
    const SourceForm lie = lie_derivative_source(V, delta);
    for (int a = 0; a < delta.space().fiber_dim(); ++a) {
        if (!(el.coefficient(a) + ecs.coefficient(a) - lie.coefficient(a)).is_zero())
            throw Error("internal: Lie-derivative decomposition identity violated");
    }
    return {std::move(el), std::move(ecs)};
}

/// Checks D_i J^i = Q^alpha f_alpha for a given characteristic and current.
inline Equality check_current(const std::vector<JetExpr>& Q, const SourceForm& delta,
                              const CurrentDensity& J) {
    const JetSpace& s = delta.space();
    if (static_cast<int>(Q.size()) != s.fiber_dim())
        throw Error("characteristic needs one component per fiber coordinate");
    JetExpr rhs(s);
    for (int a = 0; a < s.fiber_dim(); ++a) rhs += Q[a] * delta.coefficient(a);
    return check_equal(total_divergence(J), rhs);
}

/// Constructs the current J with D_x J = Q^alpha f_alpha on a 1-D base by
/// repeated integration by parts in the jet variables. Unique up to an
/// additive constant; this construction fixes the constant to zero.
inline CurrentDensity construct_current_ode(const std::vector<JetExpr>& Q, const SourceForm& delta) {
    const JetSpace& s = delta.space();
    if (s.base_dim() != 1)
        throw UnsupportedInputError("current construction is implemented for a 1-D base only");
    if (static_cast<int>(Q.size()) != s.fiber_dim())
        throw Error("characteristic needs one component per fiber coordinate");

    JetExpr target(s);
    for (int a = 0; a < s.fiber_dim(); ++a) target += Q[a] * delta.coefficient(a);

    JetExpr g = target;
    JetExpr J(s);
    while (g.order() >= 1) {
        const int r = g.order();
        const MultiIndex top(std::vector<int>(static_cast<std::size_t>(r), 0));
        const MultiIndex sub(std::vector<int>(static_cast<std::size_t>(r - 1), 0));

        // affine-linearity in the top-order coordinates is necessary for
        // exactness: g = A + u^a_(r) B_a with B_a of lower order
        JetExpr contracted(s);
        for (int a = 0; a < s.fiber_dim(); ++a) {
            const JetExpr B = g.partial_jet(a, top);
            if (B.order() >= r)
                throw NoCurrentError("expression is not a total derivative: "
                                     "nonlinear dependence on the top-order coordinates");
            contracted += JetExpr::coordinate(s, a, sub) * B;
        }

        // potential in the order-(r-1) coordinates, exact per monomial
        JetExpr J1(s);
        for (const auto& [mono, c] : contracted.terms()) {
            int d = 0;
            for (int a = 0; a < s.fiber_dim(); ++a) d += mono.jet_exponent(JetVar{a, sub});
            if (d == 0) throw Error("internal: potential monomial lost its integration variable");
            J1.add_term(mono, c / d);
        }

        J += J1;
        g -= J1.total_derivative(0);
        if (g.order() >= r)
            throw NoCurrentError("expression is not a total derivative: "
                                 "integration by parts failed to lower the order");
    }

    if (!g.depends_only_on_x())
        throw NoCurrentError("expression is not a total derivative: "
                             "order-zero remainder still depends on fiber coordinates");
    if (!g.is_zero()) {
        if (!g.is_x_polynomial())
            throw NoCurrentError("non-polynomial base-coordinate remainder cannot be integrated in closed form");
        J += JetExpr::from_xpoly(s, g.to_xpoly().antiderivative(0));
    }

    if (!(J.total_derivative(0) - target).is_zero())
        throw NoCurrentError("expression is not a total derivative");
    return CurrentDensity(s, {J});
}

} // namespace varkit
