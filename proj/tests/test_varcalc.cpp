#include "catch_amalgamated.hpp"

#include "varkit/numeric/grid.hpp"
#include "varkit/symmetry/vector_field.hpp"
#include "varkit/varcalc/operators.hpp"
#include "support/random_exprs.hpp"

using namespace varkit;

namespace {

JetSpace line() { return JetSpace(1, 1); }
JetSpace plane() { return JetSpace(2, 1); }

JetExpr u(const JetSpace& s, std::initializer_list<int> idx = {}) {
    return JetExpr::coordinate(s, 0, MultiIndex(idx));
}

JetExpr half(const JetSpace& s) { return JetExpr::constant(s, Rational(1, 2)); }

SourceForm oscillator(const JetSpace& s) { return SourceForm(s, {u(s) + u(s, {0, 0})}); }

SourceForm monge_ampere(const JetSpace& s) {
    return SourceForm(s, {u(s, {0, 0}) * u(s, {1, 1}) - u(s, {0, 1}).pow(2)});
}

} // namespace

TEST_CASE("Euler-Lagrange of the oscillator Lagrangian") {
    const JetSpace s = line();
    const LagrangeForm lam(half(s) * u(s).pow(2) - half(s) * u(s, {0}).pow(2));
    const SourceForm f = euler_lagrange(lam);
    CHECK(f.coefficient(0).to_string() == "u + u_xx");
}

TEST_CASE("Euler-Lagrange annihilates total divergences") {
    Rng rng(101);
    for (const JetSpace& s : {JetSpace(1, 1), JetSpace(2, 2)}) {
        for (int t = 0; t < 10; ++t) {
            std::vector<JetExpr> comps;
            for (int i = 0; i < s.base_dim(); ++i)
                comps.push_back(testing::random_polynomial(s, rng, 1));
            const JetExpr div = total_divergence(CurrentDensity(s, comps));
            const SourceForm el = euler_lagrange(LagrangeForm(div));
            for (int a = 0; a < s.fiber_dim(); ++a) CHECK(el.coefficient(a).is_zero());
        }
    }
}

TEST_CASE("Euler-Lagrange of the Monge-Ampere Lagrangian") {
    const JetSpace s = plane();
    const SourceForm ma = monge_ampere(s);
    const LagrangeForm lam(u(s) * ma.coefficient(0) / Rational(3));
    const SourceForm el = euler_lagrange(lam);
    CHECK((el.coefficient(0) - ma.coefficient(0)).is_zero());
}

TEST_CASE("total divergence examples") {
    const JetSpace s = line();
    // J = 1/2(u^2 + u_x^2): D_x J = u u_x + u_x u_xx
    const CurrentDensity J(s, {half(s) * (u(s).pow(2) + u(s, {0}).pow(2))});
    CHECK(total_divergence(J).to_string() == "u*u_x + u_x*u_xx");

    const CurrentDensity C(s, {JetExpr::constant(s, Rational(7))});
    CHECK(total_divergence(C).is_zero());
}

TEST_CASE("Helmholtz tensor of the oscillator vanishes") {
    const JetSpace s = line();
    const auto result = is_locally_variational(oscillator(s));
    CHECK(result.variational);
}

TEST_CASE("Helmholtz tensor of the transport form") {
    const JetSpace s = line();
    const SourceForm transport(s, {u(s, {0})});
    const HelmholtzTensor t = helmholtz(transport);
    CHECK(t.H(0, 0).is_zero());
    CHECK(t.Hi(0, 0, 0).to_string() == "2");
    CHECK(t.Hij(0, 0, 0, 0).is_zero());
    CHECK_FALSE(is_locally_variational(transport).variational);
}

TEST_CASE("order-zero source forms reduce to the curl conditions") {
    const JetSpace s(1, 2);
    const JetExpr uu = JetExpr::coordinate(s, 0);
    const JetExpr vv = JetExpr::coordinate(s, 1);
    const SourceForm d(s, {uu * vv, uu * vv});
    const HelmholtzTensor t = helmholtz(d);
    // H_ab = d_b f_a - d_a f_b, every term with a derivative slot vanishes
    CHECK((t.H(0, 1) - (uu - vv)).is_zero());
    CHECK((t.H(1, 0) - (vv - uu)).is_zero());
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            CHECK(t.Hi(0, a, b).is_zero());
            CHECK(t.Hij(0, 0, a, b).is_zero());
        }
}

TEST_CASE("Monge-Ampere is locally variational") {
    const JetSpace s = plane();
    const auto result = is_locally_variational(monge_ampere(s));
    CHECK(result.variational);
}

TEST_CASE("Helmholtz rejects third-order source forms") {
    const JetSpace s = line();
    const SourceForm third(s, {u(s, {0, 0, 0})});
    CHECK_THROWS_AS(helmholtz(third), UnsupportedOrderError);
}

TEST_CASE("Helmholtz dependencies vanish identically") {
    const JetSpace s = line();
    const SourceForm transport(s, {u(s, {0})});
    CHECK(helmholtz_dependency_residuals(transport).all_zero());

    const SourceForm zero(s, {JetExpr::zero(s)});
    CHECK(helmholtz_dependency_residuals(zero).all_zero());

    Rng rng(211);
    const JetSpace s22(2, 2);
    for (int t = 0; t < 8; ++t) {
        std::vector<JetExpr> f;
        for (int a = 0; a < 2; ++a) f.push_back(testing::random_polynomial(s22, rng, 2));
        CHECK(helmholtz_dependency_residuals(SourceForm(s22, f)).all_zero());
    }
}

TEST_CASE("independent Helmholtz expression count") {
    CHECK(independent_helmholtz_count(1, 1) == 1);
    CHECK(independent_helmholtz_count(1, 2) == 5);
    CHECK(independent_helmholtz_count(2, 1) == 2);
    CHECK(independent_helmholtz_count(2, 2) == 10);
    CHECK_THROWS_AS(independent_helmholtz_count(0, 1), Error);
}

TEST_CASE("Vainberg-Tonti Lagrangian of the oscillator") {
    const JetSpace s = line();
    const LagrangeForm L = vainberg_tonti(oscillator(s));
    const JetExpr expected = half(s) * u(s).pow(2) + half(s) * u(s) * u(s, {0, 0});
    CHECK((L.L - expected).is_zero());
    CHECK((euler_lagrange(L).coefficient(0) - oscillator(s).coefficient(0)).is_zero());
}

TEST_CASE("Vainberg-Tonti Lagrangian of Monge-Ampere") {
    const JetSpace s = plane();
    const SourceForm ma = monge_ampere(s);
    const LagrangeForm L = vainberg_tonti(ma);
    const JetExpr expected = u(s) * ma.coefficient(0) / Rational(3);
    CHECK((L.L - expected).is_zero());
    CHECK((euler_lagrange(L).coefficient(0) - ma.coefficient(0)).is_zero());
}

TEST_CASE("Vainberg-Tonti of the zero form is zero") {
    const JetSpace s = line();
    CHECK(vainberg_tonti(SourceForm(s, {JetExpr::zero(s)})).L.is_zero());
}

TEST_CASE("Euler-Lagrange recovers every variational polynomial source form") {
    // Vainberg-Tonti is a section of the Euler-Lagrange operator on its image.
    Rng rng(307);
    for (const JetSpace& s : {JetSpace(1, 1), JetSpace(2, 2)}) {
        for (int t = 0; t < 8; ++t) {
            const LagrangeForm L(testing::random_polynomial(s, rng, 1));
            const SourceForm delta = euler_lagrange(L);
            if (delta.order() > 2) continue;
            const LagrangeForm vt = vainberg_tonti(delta);
            const SourceForm back = euler_lagrange(vt);
            for (int a = 0; a < s.fiber_dim(); ++a)
                CHECK((back.coefficient(a) - delta.coefficient(a)).is_zero());
        }
    }
}

TEST_CASE("Helmholtz annihilates Euler-Lagrange output") {
    Rng rng(401);
    for (const JetSpace& s : {JetSpace(1, 1), JetSpace(2, 2)}) {
        for (int t = 0; t < 8; ++t) {
            const LagrangeForm L(testing::random_polynomial(s, rng, 1));
            const SourceForm delta = euler_lagrange(L);
            if (delta.order() > 2) continue;
            CHECK(is_locally_variational(delta).variational);
        }
    }
}

TEST_CASE("Helmholtz expressions satisfy their defining integration-by-parts identity") {
    // For vertical fields V, W the antisymmetrized second variation of the
    // source coefficients splits into Helmholtz pairings plus an explicit
    // divergence:
    //   V^a j2W(f_a) - W^a j2V(f_a)
    //     = V^a W^b H_ab + V^a (D_i W^b) H^i_ab + V^a (D_j D_i W^b) H^ij_ab
    //       + D_i[ V^b D_j(W^a d^ij_b f_a) - W^a V^b d^i_b f_a
    //              - W^a (D_j V^b) d^ij_b f_a ].
    Rng rng(1301);
    for (const JetSpace& s : {JetSpace(1, 1), JetSpace(2, 2)}) {
        const int n = s.base_dim(), m = s.fiber_dim();
        for (int trial = 0; trial < 6; ++trial) {
            std::vector<JetExpr> f;
            for (int a = 0; a < m; ++a) f.push_back(testing::random_polynomial(s, rng, 2, 3));
            const SourceForm delta(s, f);
            const HelmholtzTensor t = helmholtz(delta);

            auto vertical = [&] {
                std::vector<JetExpr> base(static_cast<std::size_t>(n), JetExpr::zero(s));
                std::vector<JetExpr> fiber;
                for (int a = 0; a < m; ++a) fiber.push_back(testing::random_polynomial(s, rng, 0));
                return ProjectableVectorField(s, base, fiber);
            };
            const ProjectableVectorField V = vertical();
            const ProjectableVectorField W = vertical();
            const ProlongedVectorField jV = prolong(V, 2);
            const ProlongedVectorField jW = prolong(W, 2);

            JetExpr lhs(s);
            for (int a = 0; a < m; ++a)
                lhs += V.fiber_component(a) * jW.apply(f[static_cast<std::size_t>(a)]) -
                       W.fiber_component(a) * jV.apply(f[static_cast<std::size_t>(a)]);

            JetExpr core(s);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    const JetExpr& Va = V.fiber_component(a);
                    const JetExpr& Wb = W.fiber_component(b);
                    core += Va * Wb * t.H(a, b);
                    for (int i = 0; i < n; ++i) {
                        core += Va * Wb.total_derivative(i) * t.Hi(i, a, b);
                        for (int j = 0; j < n; ++j)
                            core += Va * Wb.total_derivative(i).total_derivative(j) * t.Hij(i, j, a, b);
                    }
                }

            JetExpr divergence(s);
            for (int i = 0; i < n; ++i) {
                JetExpr Ti(s);
                for (int b = 0; b < m; ++b) {
                    for (int j = 0; j < n; ++j) {
                        JetExpr inner(s);
                        for (int a = 0; a < m; ++a)
                            inner += W.fiber_component(a) *
                                     f[static_cast<std::size_t>(a)].weighted_partial(b, {i, j});
                        Ti += V.fiber_component(b) * inner.total_derivative(j);
                        for (int a = 0; a < m; ++a)
                            Ti -= W.fiber_component(a) * V.fiber_component(b).total_derivative(j) *
                                  f[static_cast<std::size_t>(a)].weighted_partial(b, {i, j});
                    }
                    for (int a = 0; a < m; ++a)
                        Ti -= W.fiber_component(a) * V.fiber_component(b) *
                              f[static_cast<std::size_t>(a)].weighted_partial(b, {i});
                }
                divergence += Ti.total_derivative(i);
            }

            CHECK((lhs - core - divergence).is_zero());
        }
    }
}

TEST_CASE("Vainberg-Tonti agrees with quadrature of its defining integral") {
    // L(x, u, Du, D2u) = integral over t in [0,1] of f(x, tu, tDu, tD2u) u;
    // checked numerically at random jet points.
    Rng rng(1409);
    for (const JetSpace& s : {JetSpace(1, 1), JetSpace(2, 2)}) {
        for (int trial = 0; trial < 4; ++trial) {
            std::vector<JetExpr> f;
            for (int a = 0; a < s.fiber_dim(); ++a)
                f.push_back(testing::random_polynomial(s, rng, 2, 3));
            const SourceForm delta(s, f);
            const LagrangeForm L = vainberg_tonti(delta);
            for (int sample = 0; sample < 3; ++sample) {
                const JetPoint p = JetPoint::random(s, 2, rng);
                const GridSpec unit = GridSpec::interval(0.0, 1.0, 256);
                const double quad = unit.simpson([&](const std::vector<double>& tv) {
                    const double t = tv[0];
                    JetPoint scaled = p;
                    for (auto& [coord, value] : scaled.jets) value *= t;
                    double integrand = 0.0;
                    for (int a = 0; a < s.fiber_dim(); ++a)
                        integrand += delta.coefficient(a).eval(scaled) * p.jet_value(a, {});
                    return integrand;
                });
                const double direct = L.L.eval(p);
                CHECK(direct == Catch::Approx(quad).margin(1e-9 * (1.0 + std::abs(quad))));
            }
        }
    }
}

TEST_CASE("structure check passes for Monge-Ampere") {
    const auto report = anderson_duchamp_check(monge_ampere(plane()));
    CHECK(report.pass());
    CHECK(report.violations.empty());
}

TEST_CASE("structure check fails for (u_xx)^2 on the line") {
    const JetSpace s = line();
    const SourceForm bad(s, {u(s, {0, 0}).pow(2)});
    const auto report = anderson_duchamp_check(bad);
    CHECK_FALSE(report.pass());
    CHECK_FALSE(report.fourth_order_linear);
    CHECK_FALSE(report.degree_bounded);
}

TEST_CASE("structure check passes for the oscillator") {
    const auto report = anderson_duchamp_check(oscillator(line()));
    CHECK(report.pass());
}

TEST_CASE("variational implies the structure conditions") {
    Rng rng(503);
    const JetSpace s = plane();
    for (int t = 0; t < 8; ++t) {
        const LagrangeForm L(testing::random_polynomial(s, rng, 1));
        const SourceForm delta = euler_lagrange(L);
        if (delta.order() > 2) continue;
        if (is_locally_variational(delta).variational) CHECK(anderson_duchamp_check(delta).pass());
    }
}

TEST_CASE("energy reconstruction of the oscillator") {
    const JetSpace s = line();
    const JetExpr E = half(s) * (u(s).pow(2) + u(s, {0}).pow(2));
    const OdeReconstruction rec = reconstruct_lagrangian_ode(E);
    const JetExpr expectedL = half(s) * u(s).pow(2) - half(s) * u(s, {0}).pow(2);
    CHECK((rec.lagrangian.L - expectedL).is_zero());
    CHECK(rec.source.coefficient(0).to_string() == "u + u_xx");
    // both defining relations hold exactly
    const JetExpr back = rec.lagrangian.L - u(s, {0}) * rec.lagrangian.L.partial_jet(0, {0});
    CHECK((back - E).is_zero());
    CHECK((euler_lagrange(rec.lagrangian).coefficient(0) - rec.source.coefficient(0)).is_zero());
}

TEST_CASE("energy reconstruction of a kinetic-only energy") {
    const JetSpace s = line();
    const OdeReconstruction rec = reconstruct_lagrangian_ode(u(s, {0}).pow(2));
    CHECK((rec.lagrangian.L + u(s, {0}).pow(2)).is_zero()); // L = -u_x^2
    CHECK(rec.source.coefficient(0).to_string() == "2*u_xx");
}

TEST_CASE("energy reconstruction of zero") {
    const JetSpace s = line();
    const OdeReconstruction rec = reconstruct_lagrangian_ode(JetExpr::zero(s));
    CHECK(rec.lagrangian.L.is_zero());
    CHECK(rec.source.coefficient(0).is_zero());
}

TEST_CASE("energy reconstruction error paths") {
    const JetSpace s = line();
    CHECK_THROWS_AS(reconstruct_lagrangian_ode(u(s) * u(s, {0})), ResonanceError);
    CHECK_THROWS_AS(reconstruct_lagrangian_ode(u(s, {0, 0})), UnsupportedInputError);
    CHECK_THROWS_AS(reconstruct_lagrangian_ode(JetExpr::base_coord(s, 0) * u(s)),
                    UnsupportedInputError);
    const JetSpace s2(2, 1);
    CHECK_THROWS_AS(reconstruct_lagrangian_ode(JetExpr::coordinate(s2, 0)), UnsupportedInputError);
}
