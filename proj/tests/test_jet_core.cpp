#include "catch_amalgamated.hpp"

#include "varkit/jet/expr.hpp"
#include "varkit/jet/section.hpp"
#include "support/random_exprs.hpp"

using namespace varkit;

namespace {

JetSpace line() { return JetSpace(1, 1); }   // n = m = 1, coordinates (x, u)
JetSpace plane() { return JetSpace(2, 1); }  // n = 2, coordinates (x, y, u)

JetExpr u(const JetSpace& s, std::initializer_list<int> idx = {}) {
    return JetExpr::coordinate(s, 0, MultiIndex(idx));
}

} // namespace

TEST_CASE("multi-index identification and weights") {
    MultiIndex ij{1, 0};
    CHECK(ij == MultiIndex{0, 1});
    CHECK(ij.appended(0).entries() == std::vector<int>{0, 0, 1});

    // weight = l_1!...l_n!/l! is a positive rational <= 1
    CHECK(MultiIndex{0, 1}.weight(2) == Rational(1, 2));
    CHECK(MultiIndex{0, 0}.weight(2) == Rational(1));
    CHECK(MultiIndex{0, 0, 1}.weight(2) == Rational(1, 3));
    for (const auto& I : multi_indices_up_to(3, 4)) {
        const Rational w = I.weight(3);
        CHECK(w > 0);
        CHECK(w <= 1);
    }
}

TEST_CASE("jet space validation") {
    CHECK_THROWS_AS(JetSpace(0, 1), Error);
    CHECK_THROWS_AS(JetSpace(1, 0), Error);
    CHECK_THROWS_AS(JetSpace(1, 1, 1), Error);
    CHECK_THROWS_AS(JetSpace(1, 1, 6, {"x"}, {"x"}), Error);
    CHECK_THROWS_AS(JetSpace(2, 1, 6, {"x", "x"}, {"u"}), Error);
    const JetSpace s(2, 2);
    CHECK(s.base_name(1) == "y");
    CHECK(s.fiber_name(1) == "v");
}

TEST_CASE("total derivative: product rule and coordinates") {
    const JetSpace s = line();
    const JetExpr x = JetExpr::base_coord(s, 0);

    // D_x(u*u_x) = u_x^2 + u*u_xx
    const JetExpr lhs = (u(s) * u(s, {0})).total_derivative(0);
    const JetExpr rhs = u(s, {0}).pow(2) + u(s) * u(s, {0, 0});
    CHECK(lhs.to_string() == "u*u_xx + u_x^2");
    CHECK((lhs - rhs).is_zero());

    // D_x(x) = 1
    CHECK(x.total_derivative(0).to_string() == "1");
}

TEST_CASE("total derivative appends and sorts the index") {
    const JetSpace s(3, 1);
    // D_x(u_{yz}) = u_{xyz}
    const JetExpr d = u(s, {1, 2}).total_derivative(0);
    CHECK((d - u(s, {0, 1, 2})).is_zero());
}

TEST_CASE("total derivative capacity error names the needed order") {
    const JetSpace s(1, 1, 2);
    JetExpr e = u(s, {0, 0});
    try {
        e.total_derivative(0);
        FAIL("expected capacity error");
    } catch (const CapacityError& err) {
        CHECK(err.needed_order == 3);
    }
}

TEST_CASE("weighted partial derivatives") {
    const JetSpace s = plane();
    // d^{xy}_u (u_xy) = 1/2 since the weight is 1!1!/2!
    CHECK(u(s, {0, 1}).weighted_partial(0, {0, 1}).to_string() == "1/2");
    // d^{xx}_u (u_xx) = 1 since the weight is 2!/2!
    CHECK(u(s, {0, 0}).weighted_partial(0, {0, 0}).to_string() == "1");

    // permutation invariance in I on a random expression
    Rng rng(7);
    for (int t = 0; t < 10; ++t) {
        const JetExpr e = testing::random_polynomial(s, rng, 3);
        const JetExpr a = e.weighted_partial(0, {0, 1});
        const JetExpr b = e.weighted_partial(0, {1, 0});
        CHECK((a - b).is_zero());
    }
}

TEST_CASE("order of expressions") {
    const JetSpace s = line();
    CHECK((u(s, {0}) * u(s, {0, 0})).order() == 2);
    CHECK(JetExpr::atom_expr(s, AtomKind::sin, XPoly::variable(0)).order() == 0);
    CHECK(JetExpr::constant(s, Rational(5)).order() == 0);

    const JetSpace s2(2, 3);
    // u^beta_i u^gamma_kl is a second order function
    const JetExpr e = JetExpr::coordinate(s2, 1, {0}) * JetExpr::coordinate(s2, 2, {0, 1});
    CHECK(e.order() == 2);
}

TEST_CASE("degree in the order-r coordinates") {
    const JetSpace s = plane();
    const JetExpr monge = u(s, {0, 0}) * u(s, {1, 1}) - u(s, {0, 1}).pow(2);
    CHECK(monge.degree_in_order(2) == 2);
    CHECK((u(s) + u(s, {0, 0})).degree_in_order(2) == 1);
    CHECK(u(s).degree_in_order(2) == 0);
    CHECK(u(s).degree_in_order(0) == 1);
}

TEST_CASE("pullback along polynomial sections") {
    const JetSpace s = line();
    const XPoly x = XPoly::variable(0);

    // e = u_xx, s = x^3 -> 6x
    const SectionPolynomial cubic(s, {x * x * x});
    CHECK(pullback(u(s, {0, 0}), cubic).to_string() == "6*x");

    // e = u*u_x, s = x^2 -> 2x^3
    const SectionPolynomial square(s, {x * x});
    CHECK(pullback(u(s) * u(s, {0}), square).to_string() == "2*x^3");
}

TEST_CASE("pullback commutes with the total derivative (chain-rule oracle)") {
    const JetSpace s = line();
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const JetExpr e = testing::random_polynomial(s, rng, 3);
        const SectionPolynomial sec(s, {testing::random_xpoly(1, rng, 4)});
        // oracle: d/dx of the pulled-back polynomial, computed on XPoly
        const XPoly direct = pullback(e, sec).to_xpoly().partial(0);
        const XPoly via_jet = pullback(e.total_derivative(0), sec).to_xpoly();
        CHECK(direct == via_jet);
    }
}

TEST_CASE("exact equality on the rational fragment") {
    const JetSpace s = line();
    const JetExpr a = (u(s) + u(s, {0})).pow(2);
    const JetExpr b = u(s).pow(2) + Rational(2) * u(s) * u(s, {0}) + u(s, {0}).pow(2);
    const Equality eq = check_equal(a, b);
    CHECK(eq.equal);
    CHECK_FALSE(eq.probabilistic);

    const JetSpace s2 = plane();
    CHECK(equals(JetExpr::coordinate(s2, 0, {0, 1}), JetExpr::coordinate(s2, 0, {1, 0})));

    const Equality neq = check_equal(u(s), u(s, {0}));
    CHECK_FALSE(neq.equal);
    CHECK_FALSE(neq.probabilistic);
}

TEST_CASE("probabilistic equality for atom-bearing expressions") {
    const JetSpace s = line();
    const XPoly x = XPoly::variable(0);
    const JetExpr sin2 = JetExpr::atom_expr(s, AtomKind::sin, x).pow(2);
    const JetExpr cos2 = JetExpr::atom_expr(s, AtomKind::cos, x).pow(2);
    const Equality eq = check_equal(sin2 + cos2, JetExpr::constant(s, Rational(1)));
    CHECK(eq.equal);
    CHECK(eq.probabilistic);

    const Equality neq = check_equal(sin2, cos2);
    CHECK_FALSE(neq.equal);
    CHECK(neq.probabilistic);

    // identities across distinct atoms are caught as well
    const JetExpr sin_2x = JetExpr::atom_expr(s, AtomKind::sin, x * Rational(2));
    const JetExpr sinx = JetExpr::atom_expr(s, AtomKind::sin, x);
    const JetExpr cosx = JetExpr::atom_expr(s, AtomKind::cos, x);
    CHECK(check_equal(sin_2x, Rational(2) * sinx * cosx).equal);
    const JetExpr expx = JetExpr::atom_expr(s, AtomKind::exp, x);
    const JetExpr exp_minus = JetExpr::atom_expr(s, AtomKind::exp, -x);
    CHECK(check_equal(expx * exp_minus, JetExpr::constant(s, Rational(1))).equal);
}

TEST_CASE("total derivatives commute") {
    const JetSpace s(2, 2);
    Rng rng(23);
    for (int t = 0; t < 15; ++t) {
        const JetExpr e = testing::random_polynomial(s, rng, 3);
        const JetExpr a = e.total_derivative(0).total_derivative(1);
        const JetExpr b = e.total_derivative(1).total_derivative(0);
        CHECK((a - b).is_zero());
    }
}

TEST_CASE("commutator of weighted partial and total derivative") {
    // [d^I_alpha, D_i] e = (l_i/|I|) d^{I\i}_alpha e  when i occurs in I, else 0.
    const JetSpace s(2, 1);
    Rng rng(31);
    const std::vector<MultiIndex> cases = {{0}, {0, 0}, {0, 1}, {1, 1}, {0, 0, 1}};
    for (const auto& I : cases) {
        for (int i = 0; i < 2; ++i) {
            const JetExpr e = testing::random_polynomial(s, rng, 2);
            const JetExpr lhs = e.total_derivative(i).weighted_partial(0, I) -
                                e.weighted_partial(0, I).total_derivative(i);
            JetExpr expected(s);
            if (I.contains(i))
                expected = e.weighted_partial(0, I.removed(i)) *
                           Rational(I.multiplicity(i), I.order());
            CHECK((lhs - expected).is_zero());
        }
    }
}

TEST_CASE("total derivative raises order affine-linearly") {
    const JetSpace s(2, 1);
    Rng rng(41);
    for (int t = 0; t < 15; ++t) {
        const JetExpr e = testing::random_polynomial(s, rng, 2);
        const int r = e.order();
        const JetExpr d = e.total_derivative(static_cast<int>(rng.uniform_int(0, 1)));
        CHECK(d.order() <= r + 1);
        CHECK(d.degree_in_order(r + 1) <= 1);
    }
}

TEST_CASE("canonical form is construction-order independent and idempotent") {
    const JetSpace s = plane();
    // same expression assembled in two different orders
    const JetExpr a = (u(s) * u(s, {1}) + u(s, {0, 0}) * Rational(3)) - u(s) * u(s, {1});
    const JetExpr b = Rational(3) * u(s, {0, 0});
    CHECK(a.to_string() == b.to_string());
    CHECK((a - b).is_zero());
    // re-serializing a canonical expression changes nothing
    CHECK(a.to_string() == (a + JetExpr::zero(s)).to_string());
}

TEST_CASE("expression serialization is stable and readable") {
    const JetSpace s = plane();
    const JetExpr e = u(s, {0, 0}) * u(s, {1, 1}) - u(s, {0, 1}).pow(2);
    CHECK(e.to_string() == "u_xx*u_yy - u_xy^2");
    const JetExpr f = JetExpr::constant(s, Rational(1, 2)) * u(s).pow(2) -
                      JetExpr::base_coord(s, 0) * u(s, {0});
    CHECK(f.to_string() == "1/2*u^2 - x*u_x");
}

TEST_CASE("evaluation at jet points") {
    const JetSpace s = line();
    JetPoint p;
    p.x = {2.0};
    p.jets[{0, MultiIndex{}}] = 3.0;
    p.jets[{0, MultiIndex{0}}] = -1.0;
    const JetExpr e = u(s) * u(s, {0}) + JetExpr::base_coord(s, 0).pow(2);
    CHECK(e.eval(p) == Catch::Approx(3.0 * -1.0 + 4.0));

    const JetExpr trig = JetExpr::atom_expr(s, AtomKind::sin, XPoly::variable(0));
    CHECK(trig.eval(p) == Catch::Approx(std::sin(2.0)));
}
