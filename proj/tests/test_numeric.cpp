#include "catch_amalgamated.hpp"

#include "varkit/numeric/verify.hpp"
#include "varkit/varcalc/operators.hpp"
#include "support/random_exprs.hpp"

using namespace varkit;

namespace {

JetSpace line() { return JetSpace(1, 1); }

JetExpr u(const JetSpace& s, std::initializer_list<int> idx = {}) {
    return JetExpr::coordinate(s, 0, MultiIndex(idx));
}

XPoly unit_bump_1d() {
    // x^2 (1-x)^2: vanishes to second order at both ends of [0,1]
    const XPoly x = XPoly::variable(0);
    const XPoly one_minus = XPoly(Rational(1)) - x;
    return x * x * one_minus * one_minus;
}

SourceForm oscillator(const JetSpace& s) { return SourceForm(s, {u(s) + u(s, {0, 0})}); }

LagrangeForm oscillator_lagrangian(const JetSpace& s) {
    return LagrangeForm(JetExpr::constant(s, Rational(1, 2)) * (u(s).pow(2) - u(s, {0}).pow(2)));
}

} // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(GridSpec::interval(0.0, 1.0, 16), Error);   // too few intervals
    CHECK_THROWS_AS(GridSpec::interval(0.0, 1.0, 33), Error);   // odd
    CHECK_THROWS_AS(GridSpec::interval(1.0, 0.0), Error);       // unordered
}

TEST_CASE("functional value of simple Lagrangians") {
    const JetSpace s = line();
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    const SectionPolynomial id(s, {XPoly::variable(0)});

    CHECK(functional_value(LagrangeForm(u(s)), id, g) == Catch::Approx(0.5).epsilon(1e-10));

    const SectionPolynomial sq(s, {XPoly::variable(0) * XPoly::variable(0)});
    const double expected = 0.5 * (1.0 / 5.0) - 0.5 * (4.0 / 3.0);
    CHECK(functional_value(oscillator_lagrangian(s), sq, g) == Catch::Approx(expected).epsilon(1e-10));
}

TEST_CASE("trivial Lagrangians integrate to boundary data") {
    const JetSpace s = line();
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    // L = D_x(u^2): the action depends on the section boundary values only
    const CurrentDensity J(s, {u(s).pow(2)});
    const LagrangeForm trivial(total_divergence(J));
    const XPoly x = XPoly::variable(0);

    const SectionPolynomial s1(s, {x * x + XPoly(Rational(1))});
    CHECK(functional_value(trivial, s1, g) == Catch::Approx(4.0 - 1.0).epsilon(1e-10));

    // any other section with the same boundary values gives the same action
    const SectionPolynomial s2(s, {x * x * x + XPoly(Rational(1))});
    CHECK(functional_value(trivial, s2, g) ==
          Catch::Approx(functional_value(trivial, s1, g)).epsilon(1e-9));
}

TEST_CASE("test function boundary validation") {
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    CHECK_NOTHROW(TestFunction(g, unit_bump_1d()));
    // x(1-x) vanishes at the boundary but its derivative does not
    const XPoly x = XPoly::variable(0);
    CHECK_THROWS_AS(TestFunction(g, x * (XPoly(Rational(1)) - x)), Error);
    CHECK_THROWS_AS(TestFunction(g, x), Error);
}

TEST_CASE("weak form agreement for the oscillator") {
    const JetSpace s = line();
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    const SectionPolynomial sq(s, {XPoly::variable(0) * XPoly::variable(0)});
    const TestFunction phi(g, unit_bump_1d());

    const WeakFormResult r = weak_form_check(oscillator(s), oscillator_lagrangian(s), sq, phi, g);
    CHECK_FALSE(r.inconclusive);
    CHECK(r.pass);
    CHECK(r.relative <= 1e-6);

    const WeakFormResult r2 =
        weak_form_check(oscillator(s), oscillator_lagrangian(s), sq, phi, g, 0.5e-4);
    CHECK(r2.pass);
}

TEST_CASE("weak form is inconclusive for trivial Lagrangians against zero") {
    const JetSpace s = line();
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    const CurrentDensity J(s, {u(s).pow(2)});
    const LagrangeForm trivial(total_divergence(J));
    const SourceForm zero(s, {JetExpr::zero(s)});
    const SectionPolynomial sq(s, {XPoly::variable(0) * XPoly::variable(0)});
    const TestFunction phi(g, unit_bump_1d());

    const WeakFormResult r = weak_form_check(zero, trivial, sq, phi, g);
    // the perturbation never changes boundary data, so both sides vanish
    CHECK(r.residual <= 1e-6);
    CHECK(r.inconclusive);
}

TEST_CASE("weak form detects the non-variational transport form") {
    const JetSpace s = line();
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    const SourceForm transport(s, {u(s, {0})});
    // its formal Lagrangian candidate fails to reproduce it
    const LagrangeForm candidate = vainberg_tonti(transport);
    const SectionPolynomial sq(s, {XPoly::variable(0) * XPoly::variable(0)});
    const TestFunction phi(g, unit_bump_1d());

    const WeakFormResult r = weak_form_check(transport, candidate, sq, phi, g);
    CHECK_FALSE(r.inconclusive);
    CHECK_FALSE(r.pass);
    CHECK(r.relative > 0.1);
}

TEST_CASE("weak form validates the finite-difference step range") {
    const JetSpace s = line();
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    const SectionPolynomial sq(s, {XPoly::variable(0) * XPoly::variable(0)});
    const TestFunction phi(g, unit_bump_1d());
    CHECK_THROWS_AS(weak_form_check(oscillator(s), oscillator_lagrangian(s), sq, phi, g, 1e-2),
                    Error);
}

TEST_CASE("weak form agreement on three independent section/test pairs") {
    const JetSpace s = line();
    const GridSpec g = GridSpec::interval(0.0, 1.0);
    const XPoly x = XPoly::variable(0);
    const XPoly bump = unit_bump_1d();
    const std::vector<SectionPolynomial> sections = {
        SectionPolynomial(s, {x * x}),
        SectionPolynomial(s, {x * x * x - x * Rational(2)}),
        SectionPolynomial(s, {x * x * (x - XPoly(Rational(3)))}),
    };
    const std::vector<XPoly> bumps = {bump, bump * x, bump * (x * x + XPoly(Rational(1)))};
    const LagrangeForm L = vainberg_tonti(oscillator(s));
    for (std::size_t k = 0; k < sections.size(); ++k) {
        const WeakFormResult r =
            weak_form_check(oscillator(s), L, sections[k], TestFunction(g, bumps[k]), g);
        CHECK(r.pass);
    }
}

TEST_CASE("weak form in two dimensions") {
    const JetSpace s(2, 1);
    const GridSpec g = GridSpec::rectangle(0.0, 1.0, 0.0, 1.0);
    const SourceForm ma(s, {u(s, {0, 0}) * u(s, {1, 1}) - u(s, {0, 1}).pow(2)});
    const LagrangeForm L = vainberg_tonti(ma);
    const XPoly x = XPoly::variable(0), y = XPoly::variable(1);
    const SectionPolynomial sec(s, {x * x * y + y * y});
    const XPoly bumpx = x * x * (XPoly(Rational(1)) - x) * (XPoly(Rational(1)) - x);
    const XPoly bumpy = y * y * (XPoly(Rational(1)) - y) * (XPoly(Rational(1)) - y);
    const TestFunction phi(g, bumpx * bumpy);

    const WeakFormResult r1 = weak_form_check(ma, L, sec, phi, g, 1e-4);
    CHECK(r1.pass);
    const WeakFormResult r2 = weak_form_check(ma, L, sec, phi, g, 0.5e-4);
    CHECK(r2.pass);
    // cubic action: the central difference truncation is exactly eps^2 I'''/6,
    // so halving the step divides the residual by exactly four
    REQUIRE(r1.residual > 0.0);
    CHECK(r1.residual / r2.residual == Catch::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("randomized identity checks") {
    const JetSpace s = line();
    CHECK_THROWS_AS(randomized_identity_check(u(s), 5), Error);

    // H^x of the transport form minus 2 is identically zero
    const SourceForm transport(s, {u(s, {0})});
    const HelmholtzTensor t = helmholtz(transport);
    CHECK(randomized_identity_check(t.Hi(0, 0, 0) - JetExpr::constant(s, 2), 20));

    CHECK_FALSE(randomized_identity_check(u(s, {0}), 20));

    // dependency residual of a random source form
    Rng rng(1201);
    const JetSpace s22(2, 2);
    std::vector<JetExpr> f;
    for (int a = 0; a < 2; ++a) f.push_back(testing::random_polynomial(s22, rng, 2));
    const HelmholtzDependencies dep = helmholtz_dependency_residuals(SourceForm(s22, f));
    CHECK(randomized_identity_check(dep.r1.front(), 20));

    // trigonometric identity visible only to sampling
    const JetExpr sinx = JetExpr::atom_expr(s, AtomKind::sin, XPoly::variable(0));
    const JetExpr cosx = JetExpr::atom_expr(s, AtomKind::cos, XPoly::variable(0));
    CHECK(randomized_identity_check(sinx.pow(2) + cosx.pow(2) - JetExpr::constant(s, 1), 20));
}
