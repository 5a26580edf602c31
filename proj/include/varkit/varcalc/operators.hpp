#pragma once

#include "varkit/varcalc/forms.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace varkit {

/// Euler-Lagrange operator: f_alpha = sum_l (-1)^l D_{i1}..D_{il}
/// d^{i1..il}_alpha L. The Einstein sum over unordered index tuples
/// collapses to one plain partial per sorted multi-index.
inline SourceForm euler_lagrange(const LagrangeForm& lambda) {
    const JetSpace& s = lambda.space();
    const int k = lambda.L.order();
    if (2 * k > s.max_order()) throw CapacityError(2 * k, s.max_order());
    std::vector<JetExpr> f;
    f.reserve(static_cast<std::size_t>(s.fiber_dim()));
    for (int a = 0; a < s.fiber_dim(); ++a) {
        JetExpr acc(s);
        for (const auto& I : multi_indices_up_to(s.base_dim(), k)) {
            const JetExpr part = lambda.L.partial_jet(a, I);
            if (part.is_zero()) continue;
            const JetExpr term = part.total_derivative(I);
            acc += (I.order() % 2 == 0) ? term : -term;
        }
        f.push_back(std::move(acc));
    }
    return SourceForm(s, std::move(f));
}

/// Total divergence D_i J^i of a current density.
inline JetExpr total_divergence(const CurrentDensity& J) {
    JetExpr acc(J.space());
    for (int i = 0; i < J.space().base_dim(); ++i) acc += J.component(i).total_derivative(i);
    return acc;
}

inline void require_second_order(const SourceForm& delta, const char* what) {
    if (delta.order() > 2)
        throw UnsupportedOrderError(std::string(what) + " is only defined for source forms of order <= 2, got order " +
                                    std::to_string(delta.order()));
}

/// Helmholtz expressions of a second-order source form:
///   H_ab    = d_b f_a - d_a f_b + D_i d^i_a f_b - D_i D_j d^ij_a f_b
///   H^i_ab  = d^i_b f_a + d^i_a f_b - 2 D_j d^ij_a f_b
///   H^ij_ab = d^ij_b f_a - d^ij_a f_b
inline HelmholtzTensor helmholtz(const SourceForm& delta) {
    require_second_order(delta, "the Helmholtz operator");
    const JetSpace& s = delta.space();
    const int n = s.base_dim();
    const int m = s.fiber_dim();
    HelmholtzTensor t(s);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            const JetExpr& fa = delta.coefficient(a);
            const JetExpr& fb = delta.coefficient(b);
            JetExpr h = fa.partial_jet(b, {}) - fb.partial_jet(a, {});
            for (int i = 0; i < n; ++i) {
                h += fb.weighted_partial(a, {i}).total_derivative(i);
                for (int j = 0; j < n; ++j) {
                    const JetExpr p = fb.weighted_partial(a, {i, j});
                    if (!p.is_zero()) h -= p.total_derivative(j).total_derivative(i);
                }
            }
            t.set_H(a, b, std::move(h));
            for (int i = 0; i < n; ++i) {
                JetExpr hi = fa.weighted_partial(b, {i}) + fb.weighted_partial(a, {i});
                for (int j = 0; j < n; ++j) {
                    const JetExpr p = fb.weighted_partial(a, {i, j});
                    if (!p.is_zero()) hi -= Rational(2) * p.total_derivative(j);
                }
                t.set_Hi(i, a, b, std::move(hi));
                for (int j = 0; j < n; ++j)
                    t.set_Hij(i, j, a, b, fa.weighted_partial(b, {i, j}) - fb.weighted_partial(a, {i, j}));
            }
        }
    }
    return t;
}

/// Verdict of the Helmholtz conditions. `probabilistic` is set when a
/// component's vanishing was decided by randomized evaluation (atoms).
struct VariationalityResult {
    bool variational = false;
    bool probabilistic = false;
    HelmholtzTensor tensor;
};

/// A source form is locally variational iff every Helmholtz expression
/// vanishes identically.
inline VariationalityResult is_locally_variational(const SourceForm& delta) {
    VariationalityResult out{true, false, helmholtz(delta)};
    const JetSpace& s = delta.space();
    const JetExpr zero = JetExpr::zero(s);
    auto test = [&](const JetExpr& e) {
        if (e.is_zero()) return;
        const Equality eq = check_equal(e, zero);
        out.variational = out.variational && eq.equal;
        out.probabilistic = out.probabilistic || eq.probabilistic;
    };
    for (int a = 0; a < s.fiber_dim(); ++a)
        for (int b = 0; b < s.fiber_dim(); ++b) {
            test(out.tensor.H(a, b));
            for (int i = 0; i < s.base_dim(); ++i) {
                test(out.tensor.Hi(i, a, b));
                for (int j = 0; j < s.base_dim(); ++j) test(out.tensor.Hij(i, j, a, b));
            }
        }
    return out;
}

/// The three Helmholtz dependency residuals. They vanish identically for
/// every second-order source form, variational or not.
struct HelmholtzDependencies {
    std::vector<JetExpr> r1;  // indexed (a,b): H_ab + H_ba - D_i H^i_ab + D_i D_j H^ij_ab
    std::vector<JetExpr> r2;  // indexed (i,a,b): H^i_ab - H^i_ba - 2 D_j H^ij_ab
    std::vector<JetExpr> r3;  // indexed (i,j,a,b): H^ij_ab + H^ij_ba

    bool all_zero() const {
        auto zero = [](const std::vector<JetExpr>& v) {
            return std::all_of(v.begin(), v.end(), [](const JetExpr& e) { return e.is_zero(); });
        };
        return zero(r1) && zero(r2) && zero(r3);
    }
};

inline HelmholtzDependencies helmholtz_dependency_residuals(const SourceForm& delta) {
    const HelmholtzTensor t = helmholtz(delta);
    const JetSpace& s = delta.space();
    const int n = s.base_dim();
    const int m = s.fiber_dim();
    HelmholtzDependencies out;
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            JetExpr r = t.H(a, b) + t.H(b, a);
            for (int i = 0; i < n; ++i) {
                r -= t.Hi(i, a, b).total_derivative(i);
                for (int j = 0; j < n; ++j) {
                    const JetExpr& hij = t.Hij(i, j, a, b);
                    if (!hij.is_zero()) r += hij.total_derivative(j).total_derivative(i);
                }
            }
            out.r1.push_back(std::move(r));
            for (int i = 0; i < n; ++i) {
                JetExpr r2 = t.Hi(i, a, b) - t.Hi(i, b, a);
                for (int j = 0; j < n; ++j) {
                    const JetExpr& hij = t.Hij(i, j, a, b);
                    if (!hij.is_zero()) r2 -= Rational(2) * hij.total_derivative(j);
                }
                out.r2.push_back(std::move(r2));
                for (int j = 0; j < n; ++j) out.r3.push_back(t.Hij(i, j, a, b) + t.Hij(i, j, b, a));
            }
        }
    }
    return out;
}

/// Upper bound on the number of independent Helmholtz expressions of a
/// second-order source form after discounting the dependency identities:
///   m(m-1)/2 + n m(m+1)/2 + n(n+1)/2 * m(m-1)/2.
inline long long independent_helmholtz_count(long long n, long long m) {
    if (n < 1 || m < 1) throw Error("dimensions must be at least 1");
    return m * (m - 1) / 2 + n * (m * (m + 1) / 2) + (n * (n + 1) / 2) * (m * (m - 1) / 2);
}

/// Vainberg-Tonti Lagrangian L = int_0^1 f_alpha(x, t u, t Du, t D^2 u)
/// u^alpha dt, integrated exactly per monomial: a fiber-degree-d monomial of
/// f_alpha picks up the factor 1/(d+1).
inline LagrangeForm vainberg_tonti(const SourceForm& delta) {
    require_second_order(delta, "the Vainberg-Tonti construction");
    const JetSpace& s = delta.space();
    JetExpr L(s);
    for (int a = 0; a < s.fiber_dim(); ++a) {
        const Monomial ua = Monomial{}.times_jet(JetVar{a, {}});
        for (const auto& [mono, c] : delta.coefficient(a).terms()) {
            const int d = mono.fiber_degree();
            L.add_term(mono.times(ua), c / (d + 1));
        }
    }
    return LagrangeForm(std::move(L));
}

/// Structure conditions a variational second-order source form must satisfy:
/// the symmetrized second and third derivatives in the second-order
/// coordinates vanish and each coefficient is polynomial of degree <= n in
/// the second-order coordinates. Necessary, not sufficient.
struct AndersonDuchampReport {
    struct Violation {
        std::string condition;
        std::string detail;
    };

    bool fourth_order_linear = true;   // symmetrized d^(ij) d^kl) f = 0
    bool third_order_degree_two = true; // symmetrized d^(rs d^k)(l d^ij) f = 0
    bool degree_bounded = true;         // degree in second-order coordinates <= n
    std::vector<Violation> violations;

    bool pass() const { return fourth_order_linear && third_order_degree_two && degree_bounded; }
};

namespace detail {

inline const std::vector<std::vector<int>>& permutations4() {
    static const std::vector<std::vector<int>> perms = [] {
        std::vector<std::vector<int>> out;
        std::vector<int> p{0, 1, 2, 3};
        do out.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        return out;
    }();
    return perms;
}

inline const std::vector<std::vector<int>>& permutations3() {
    static const std::vector<std::vector<int>> perms = [] {
        std::vector<std::vector<int>> out;
        std::vector<int> p{0, 1, 2};
        do out.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        return out;
    }();
    return perms;
}

} // namespace detail

inline AndersonDuchampReport anderson_duchamp_check(const SourceForm& delta) {
    require_second_order(delta, "the structure check");
    const JetSpace& s = delta.space();
    const int n = s.base_dim();
    const int m = s.fiber_dim();
    AndersonDuchampReport report;

    auto record = [&](bool& flag, const std::string& condition, const std::string& detail) {
        flag = false;
        report.violations.push_back({condition, detail});
    };

    // Symmetrized second derivatives in the second-order coordinates:
    // sum over all assignments of (i,j,k,l) to the two derivative slots.
    for (int b = 0; b < m; ++b) {
        const JetExpr& f = delta.coefficient(b);
        for (int g = 0; g < m; ++g) {
            for (int a = 0; a < m; ++a) {
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j)
                        for (int k = j; k < n; ++k)
                            for (int l = k; l < n; ++l) {
                                const int idx[4] = {i, j, k, l};
                                JetExpr sym(s);
                                for (const auto& p : detail::permutations4())
                                    sym += f.weighted_partial(a, {idx[p[2]], idx[p[3]]})
                                               .weighted_partial(g, {idx[p[0]], idx[p[1]]});
                                if (!sym.is_zero())
                                    record(report.fourth_order_linear, "symmetrized second derivative",
                                           "d^(" + s.base_name(i) + s.base_name(j) + "_" + s.fiber_name(g) +
                                               " d^" + s.base_name(k) + s.base_name(l) + ")_" + s.fiber_name(a) +
                                               " of f_" + s.fiber_name(b) + " = " + sym.to_string());
                            }
            }
        }
    }

    // Symmetrized third derivatives, symmetrization in (r,s,k) and (l,i,j).
    for (int b = 0; b < m; ++b) {
        const JetExpr& f = delta.coefficient(b);
        for (int dd = 0; dd < m; ++dd)
            for (int g = 0; g < m; ++g)
                for (int a = 0; a < m; ++a)
                    for (int r = 0; r < n; ++r)
                        for (int sidx = r; sidx < n; ++sidx)
                            for (int k = sidx; k < n; ++k)
                                for (int l = 0; l < n; ++l)
                                    for (int i = l; i < n; ++i)
                                        for (int j = i; j < n; ++j) {
                                            const int left[3] = {r, sidx, k};
                                            const int right[3] = {l, i, j};
                                            JetExpr sym(s);
                                            for (const auto& ps : detail::permutations3())
                                                for (const auto& pt : detail::permutations3())
                                                    sym += f.weighted_partial(a, {left[ps[2]], right[pt[0]]})
                                                               .weighted_partial(g, {right[pt[1]], right[pt[2]]})
                                                               .weighted_partial(dd, {left[ps[0]], left[ps[1]]});
                                            if (!sym.is_zero())
                                                record(report.third_order_degree_two,
                                                       "symmetrized third derivative",
                                                       "indices (" + std::to_string(r) + std::to_string(sidx) +
                                                           std::to_string(k) + ")(" + std::to_string(l) +
                                                           std::to_string(i) + std::to_string(j) + ") of f_" +
                                                           s.fiber_name(b) + " = " + sym.to_string());
                                        }
    }

    // Polynomial of degree <= n in the second-order coordinates. The
    // coefficients of that polynomial are automatically first-order
    // functions because the source form itself is second order.
    for (int b = 0; b < m; ++b) {
        const int deg = delta.coefficient(b).degree_in_order(2);
        if (deg > n)
            record(report.degree_bounded, "second-order degree bound",
                   "f_" + s.fiber_name(b) + " has degree " + std::to_string(deg) +
                       " in the second-order coordinates, allowed maximum is " + std::to_string(n));
    }

    return report;
}

/// Reconstruction of a first-order Lagrangian from an energy function
/// E(u, u_x) on the line (n = m = 1): solves E = L - u_x dL/du_x per
/// monomial and recovers the source f = (d_u + (u_xx/u_x) d_{u_x}) E.
struct OdeReconstruction {
    LagrangeForm lagrangian;
    SourceForm source;
    /// The kernel of L - u_x dL/du_x consists of the trivial terms c(u) u_x,
    /// so the returned Lagrangian is the unique representative without them.
    std::string gauge_note = "Lagrangian determined up to a trivial term c(u)*u_x";
};

inline OdeReconstruction reconstruct_lagrangian_ode(const JetExpr& energy) {
    const JetSpace& s = energy.space();
    if (s.base_dim() != 1 || s.fiber_dim() != 1)
        throw UnsupportedInputError("energy reconstruction requires one base and one fiber coordinate");
    if (energy.has_atoms()) throw UnsupportedInputError("energy reconstruction requires polynomial input");
    if (energy.order() > 1)
        throw UnsupportedInputError("energy function must depend on (u, u_x) only");
    const JetVar ux{0, MultiIndex{0}};
    for (const auto& [mono, c] : energy.terms()) {
        if (!mono.x.pow.empty())
            throw UnsupportedInputError("energy function must not depend on the base coordinate");
    }

    // For polynomial E a term linear in u_x is exactly the obstruction to
    // both smoothness and invertibility; diagnose it as resonance.
    for (const auto& [mono, c] : energy.terms()) {
        if (mono.jet_exponent(ux) == 1)
            throw ResonanceError("energy term linear in u_x admits no polynomial Lagrangian "
                                 "(the singular L = -u_x*ln(u_x) case)");
    }

    // Smoothness: dE/du_x must be divisible by u_x.
    const JetExpr dEdux = energy.partial_jet(0, {0});
    JetExpr quotient(s);
    for (const auto& [mono, c] : dEdux.terms()) {
        if (mono.jet_exponent(ux) == 0)
            throw SmoothnessError("dE/du_x is not divisible by u_x; the source would be singular at u_x = 0");
        quotient.add_term(mono.times_jet(ux, -1), c);
    }

    const JetExpr f = energy.partial_jet(0, {}) + JetExpr::coordinate(s, 0, {0, 0}) * quotient;

    // Per-monomial inversion of E = L - u_x dL/du_x: u^a u_x^d -> 1/(1-d).
    JetExpr L(s);
    for (const auto& [mono, c] : energy.terms()) {
        const int d = mono.jet_exponent(ux);
        L.add_term(mono, c / Rational(1 - d));
    }

    OdeReconstruction out{LagrangeForm(L), SourceForm(s, {f})};

    // Both defining relations must hold exactly.
    const JetExpr defect = energy - (L - JetExpr::coordinate(s, 0, {0}) * L.partial_jet(0, {0}));
    if (!defect.is_zero()) throw Error("internal: reconstructed Lagrangian violates E = L - u_x dL/du_x");
    const SourceForm el = euler_lagrange(out.lagrangian);
    if (!(el.coefficient(0) - f).is_zero())
        throw Error("internal: reconstructed Lagrangian does not reproduce the source form");
    return out;
}

} // namespace varkit
