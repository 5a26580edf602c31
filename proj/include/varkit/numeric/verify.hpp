#pragma once

#include "varkit/jet/section.hpp"
#include "varkit/numeric/grid.hpp"
#include "varkit/varcalc/forms.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace varkit {

/// Compact-support surrogate: a polynomial whose value and first
/// derivatives vanish on the whole domain boundary, so first-variation
/// integration by parts picks up no boundary terms.
class TestFunction {
public:
    TestFunction(const GridSpec& grid, XPoly poly) : poly_(std::move(poly)) {
        grid.validate();
        for (int axis = 0; axis < grid.dim; ++axis) {
            for (double bound : {grid.lo[axis], grid.hi[axis]}) {
                const Rational b = rational_from_double(bound);
                if (!poly_.substitute(axis, b).is_zero())
                    throw Error("test function must vanish on the domain boundary");
                if (!poly_.partial(axis).substitute(axis, b).is_zero())
                    throw Error("test function must have vanishing first derivatives on the boundary");
            }
        }
    }

    const XPoly& poly() const { return poly_; }

private:
    XPoly poly_;
};

namespace detail {

inline double quadrature_of(const JetExpr& x_only, const GridSpec& grid) {
    return grid.simpson([&](const std::vector<double>& x) {
        JetPoint p;
        p.x = x;
        return x_only.eval(p);
    });
}

/// Exact integral of a polynomial over the grid domain (bounds converted
/// exactly from their double representation).
inline Rational exact_integral(const XPoly& p, const GridSpec& grid) {
    XPoly acc = p;
    for (int axis = 0; axis < grid.dim; ++axis) {
        const XPoly anti = acc.antiderivative(axis);
        acc = anti.substitute(axis, rational_from_double(grid.hi[axis])) -
              anti.substitute(axis, rational_from_double(grid.lo[axis]));
    }
    if (!acc.is_constant()) throw Error("internal: polynomial integral did not reduce to a constant");
    return acc.constant_value();
}

} // namespace detail

/// Action value I = integral of the pulled-back Lagrangian over the domain.
inline double functional_value(const LagrangeForm& lambda, const SectionPolynomial& s,
                               const GridSpec& grid) {
    if (lambda.space().base_dim() != grid.dim)
        throw Error("quadrature grid dimension does not match the base dimension");
    return detail::quadrature_of(pullback(lambda.L, s), grid);
}

struct WeakFormResult {
    double fd_variation = 0.0;   // central finite difference of the action
    double pairing = 0.0;        // integral of f against the test function
    double residual = 0.0;       // |fd_variation - pairing|
    double relative = 0.0;       // residual / max(|fd|, |pairing|)
    double epsilon = 0.0;
    bool inconclusive = false;   // both terms below the degeneracy floor
    bool pass = false;
};

/// Compares the first variation of the action against the weak-form pairing
/// of the source coefficients: (I(s+eps phi) - I(s-eps phi))/(2 eps) vs
/// integral of f_alpha(s) phi^alpha. On polynomial data both functionals
/// integrate exactly, so the residual carries only the eps^2
/// finite-difference truncation; atom-bearing integrands fall back to
/// Simpson quadrature. The pass threshold carries a second-order allowance
/// on top of the 1e-6 relative target.
inline WeakFormResult weak_form_check(const SourceForm& delta, const LagrangeForm& lambda,
                                      const SectionPolynomial& s,
                                      const std::vector<TestFunction>& phis, const GridSpec& grid,
                                      double epsilon = 1e-4) {
    const JetSpace& sp = delta.space();
    if (static_cast<int>(phis.size()) != sp.fiber_dim())
        throw Error("weak-form check needs one test function per fiber coordinate");
    if (epsilon < 1e-6 || epsilon > 1e-3)
        throw Error("finite-difference step must lie in [1e-6, 1e-3]");
    if (sp.base_dim() != grid.dim)
        throw Error("quadrature grid dimension does not match the base dimension");

    const Rational eps = rational_from_double(epsilon);
    std::vector<XPoly> plus, minus;
    for (int a = 0; a < sp.fiber_dim(); ++a) {
        plus.push_back(s.component(a) + phis[static_cast<std::size_t>(a)].poly() * eps);
        minus.push_back(s.component(a) - phis[static_cast<std::size_t>(a)].poly() * eps);
    }
    const JetExpr pull_plus = pullback(lambda.L, SectionPolynomial(sp, plus));
    const JetExpr pull_minus = pullback(lambda.L, SectionPolynomial(sp, minus));

    JetExpr paired(sp);
    for (int a = 0; a < sp.fiber_dim(); ++a)
        paired += pullback(delta.coefficient(a), s) *
                  JetExpr::from_xpoly(sp, phis[static_cast<std::size_t>(a)].poly());

    WeakFormResult out;
    out.epsilon = epsilon;
    if (pull_plus.is_x_polynomial() && pull_minus.is_x_polynomial() && paired.is_x_polynomial()) {
        const Rational fd = (detail::exact_integral(pull_plus.to_xpoly(), grid) -
                             detail::exact_integral(pull_minus.to_xpoly(), grid)) /
                            (Rational(2) * eps);
        const Rational pairing = detail::exact_integral(paired.to_xpoly(), grid);
        out.fd_variation = to_double(fd);
        out.pairing = to_double(pairing);
        out.residual = std::abs(to_double(fd - pairing));
    } else {
        out.fd_variation =
            (detail::quadrature_of(pull_plus, grid) - detail::quadrature_of(pull_minus, grid)) /
            (2.0 * epsilon);
        out.pairing = detail::quadrature_of(paired, grid);
        out.residual = std::abs(out.fd_variation - out.pairing);
    }

    const double scale = std::max(std::abs(out.fd_variation), std::abs(out.pairing));
    if (scale < 1e-12) {
        out.inconclusive = true;
        out.relative = 0.0;
        out.pass = false;
        return out;
    }
    out.relative = out.residual / scale;
    out.pass = out.relative <= 1e-6 + epsilon * epsilon;
    return out;
}

inline WeakFormResult weak_form_check(const SourceForm& delta, const LagrangeForm& lambda,
                                      const SectionPolynomial& s, const TestFunction& phi,
                                      const GridSpec& grid, double epsilon = 1e-4) {
    return weak_form_check(delta, lambda, s, std::vector<TestFunction>{phi}, grid, epsilon);
}

/// Randomized zero test: evaluates the expression at random jet points with
/// coordinates uniform in [-2,2] and accepts only if every sample is zero
/// relative to the largest term magnitude at that sample.
inline bool randomized_identity_check(const JetExpr& e, int trials,
                                      std::uint64_t seed = global_seed()) {
    if (trials < 20) throw Error("randomized identity check needs at least 20 trials");
    Rng rng(seed);
    const int order = e.order();
    for (int t = 0; t < trials; ++t) {
        const JetPoint p = JetPoint::random(e.space(), order, rng);
        const auto [value, scale] = e.eval_with_scale(p);
        if (std::abs(value) > 1e-9 * (1.0 + scale)) return false;
    }
    return true;
}

} // namespace varkit
