#include <doctest.h>

#include <cmath>
#include <vector>

#include "ambistop/error.hpp"
#include "ambistop/excessive.hpp"
#include "ambistop/special_functions.hpp"
#include "hp_oracle.hpp"

using namespace ambistop;

namespace {

struct Derivs {
    double v, d1, d2;
};

// w^psi F(w) and its z-derivatives from the contiguous relations of F, not from the ODE.
Derivs chain(double psi, double z, double sigma, double f, double f1, double f2)
{
    const double w = 2.0 / (sigma * sigma * z);
    const double g0 = std::pow(w, psi) * f;
    const double g1 = psi * std::pow(w, psi - 1) * f + std::pow(w, psi) * f1;
    const double g2 = psi * (psi - 1) * std::pow(w, psi - 2) * f + 2 * psi * std::pow(w, psi - 1) * f1 + std::pow(w, psi) * f2;
    const double dw = -w / z, d2w = 2 * w / (z * z);
    return {g0, g1 * dw, g2 * dw * dw + g1 * d2w};
}

Derivs contiguous_p(const FundamentalPair& pr, double z)
{
    const double a = pr.roots().psi, b = 1 + a - pr.roots().phi;
    const double w = 2.0 / (pr.model().sigma * pr.model().sigma * z);
    return chain(a, z, pr.model().sigma, tricomi_u(a, b, w).value, -a * tricomi_u(a + 1, b + 1, w).value,
                 a * (a + 1) * tricomi_u(a + 2, b + 2, w).value);
}

Derivs contiguous_q(const FundamentalPair& pr, double z)
{
    const double a = pr.roots().psi, b = 1 + a - pr.roots().phi;
    const double w = 2.0 / (pr.model().sigma * pr.model().sigma * z);
    return chain(a, z, pr.model().sigma, kummer_m(a, b, w).value, a / b * kummer_m(a + 1, b + 1, w).value,
                 a * (a + 1) / (b * (b + 1)) * kummer_m(a + 2, b + 2, w).value);
}

double residual(const FundamentalPair& pr, double z, double v, double d1, double d2)
{
    const double s2 = pr.model().sigma * pr.model().sigma;
    return 0.5 * s2 * z * z * d2 + (1 - pr.delta() * z) * d1 - pr.rho() * v;
}

const ModelParams kFloor = make_model(0.0, 0.5, 0.05, 1.75);

}  // namespace

TEST_CASE("switch function starts at -1 and the switch point is unique")
{
    for (double c : {0.0854, 0.5, 2.0, 10.0}) {
        const ExcessiveFunction u = build_excessive(kFloor, Reference::finite(c));
        CHECK(std::fabs(u.eval(c, 1) * c - u.eval(c, 0) + 1.0) < 1e-12);
        CHECK(u.hat_z() > c);
        // D_c = U'z - U increasing on [c, inf), sign change only at hat z.
        double prev = -1.0;
        int changes = 0;
        for (double lz = std::log10(c); lz < std::log10(c) + 4; lz += 0.01) {
            const double z = std::pow(10.0, lz);
            const double d = -u.delta(z);
            CHECK(d >= prev - 1e-9 * std::fabs(prev));
            if ((d > 0) != (prev > 0))
                ++changes;
            prev = d;
        }
        CHECK(changes == 1);
        CHECK(std::fabs(u.delta(u.hat_z())) < 1e-10 * u.eval(u.hat_z(), 0));
    }
}

TEST_CASE("reference values of the switch point")
{
    const double zbar = solve_zbar(kFloor);
    CHECK(std::fabs(solve_hat_z(kFloor, 1e-8) - zbar) < 1e-4 * zbar);
    CHECK(std::fabs(solve_hat_z(kFloor, 0.0854) - 22.6858) < 1e-2);
    CHECK_THROWS_AS(solve_hat_z(kFloor, 0.0), Error);
}

TEST_CASE("boundary members of the family")
{
    const ExcessiveFunction inf = build_excessive(kFloor, Reference::infinity());
    const ExcessiveFunction zero = build_excessive(kFloor, Reference::zero());
    const FundamentalPair& pr = inf.plus();
    CHECK(std::isnan(inf.hat_z()));
    for (double z : {0.05, 0.3, 1.0, 5.0, 22.0, 60.0, 400.0}) {
        for (int k = 0; k < 3; ++k)
            CHECK(eval_u(inf, z, k) == eval_q(pr, z, k));
        if (z <= zero.hat_z())
            CHECK(eval_u(zero, z, 0) == eval_p(pr, z, 0));
    }
    CHECK(zero.hat_z() == solve_zbar(kFloor));
}

TEST_CASE("boundary conditions at the reference point")
{
    const ExcessiveFunction u = build_excessive(kFloor, Reference::finite(2.0));
    CHECK(std::fabs(eval_u(u, 2.0, 0) - 1.0) < 1e-12);
    CHECK(std::fabs(eval_u(u, 2.0, 1)) < 1e-12);
}

TEST_CASE("C2 pasting at the switch point")
{
    for (double c : {0.0854, 2.0}) {
        const ExcessiveFunction u = build_excessive(kFloor, Reference::finite(c));
        const double h = u.hat_z();
        const double lo = eval_u(u, h * (1 - 1e-14), 2), hi = eval_u(u, h * (1 + 1e-14), 2);
        CHECK(std::fabs(lo - hi) < 1e-6 * std::fabs(lo));
        CHECK(std::fabs(eval_u(u, h * (1 + 1e-14), 0) - eval_u(u, h * (1 - 1e-14), 0)) < 1e-10 * eval_u(u, h, 0));
    }
}

TEST_CASE("branch ODE residuals with second derivatives from contiguous relations")
{
    for (double c : {0.0854, 2.0}) {
        const ExcessiveFunction u = build_excessive(kFloor, Reference::finite(c));
        const double ea = std::exp(u.log_alpha()), eb = std::exp(u.log_beta());
        for (double z : {0.5 * c + 0.05, c, 3.0, 0.9 * u.hat_z()}) {
            const Derivs q = contiguous_q(u.plus(), z), p = contiguous_p(u.plus(), z);
            const double d2 = ea * q.d2 + eb * p.d2;
            const double v = eval_u(u, z, 0);
            CHECK(std::fabs(residual(u.plus(), z, v, eval_u(u, z, 1), d2)) < 1e-8 * v);
        }
        // Upper branch: continuation against the -kappa basis with the paper's coefficients.
        REQUIRE(std::isfinite(u.c1()));
        for (double z : {1.1 * u.hat_z(), 2.0 * u.hat_z(), 30.0 * u.hat_z()}) {
            const Derivs pm = contiguous_p(u.minus(), z), qm = contiguous_q(u.minus(), z);
            const double v = u.c1() * pm.v + u.c2() * qm.v;
            const double d1 = u.c1() * pm.d1 + u.c2() * qm.d1;
            const double d2 = u.c1() * pm.d2 + u.c2() * qm.d2;
            CHECK(std::fabs(eval_u(u, z, 0) - v) < 1e-9 * v);
            CHECK(std::fabs(eval_u(u, z, 1) - d1) < 1e-9 * std::fabs(d1));
            CHECK(std::fabs(residual(u.minus(), z, eval_u(u, z, 0), eval_u(u, z, 1), d2)) < 1e-8 * v);
        }
    }
}

TEST_CASE("degenerate -kappa basis is handled by the continuation")
{
    // psi_{-kappa} = 0 here, so P_{-kappa} = Q_{-kappa} = 1.
    const ModelParams m = make_model(0.02, 0.1, 0.05, 0.3);
    CHECK(characteristic_roots(m, DriftSign::MinusKappa).psi == doctest::Approx(0.0).epsilon(1e-12));
    const ExcessiveFunction u = build_excessive(m, Reference::zero());
    CHECK(std::isnan(u.c1()));
    // Residual of the -kappa ODE using a Richardson-extrapolated difference of U'.
    for (double f : {1.2, 3.0, 10.0}) {
        const double z = f * u.hat_z();
        auto d1 = [&](double t) { return eval_u(u, t, 1); };
        const double h = 1e-3 * z;
        const double d2 = (-d1(z + 2 * h) + 8 * d1(z + h) - 8 * d1(z - h) + d1(z - 2 * h)) / (12 * h);
        CHECK(std::fabs(d2 - eval_u(u, z, 2)) < 1e-7 * std::fabs(d2));
    }
}

TEST_CASE("upper coefficients against extended precision")
{
    // psi_{-kappa} > 0 here, so both bases are regular.
    const ModelParams m = make_model(0.0, 0.5, 0.05, 0.05);
    REQUIRE(characteristic_roots(m, DriftSign::MinusKappa).psi > 0.0);
    const ExcessiveFunction u = build_excessive(m, Reference::zero());
    const double zh = u.hat_z();
    const RegimeCoefficients cp = regime_coefficients(m, DriftSign::PlusKappa);
    const RegimeCoefficients cm = regime_coefficients(m, DriftSign::MinusKappa);
    const hp::real s = m.sigma;
    const hp::Triple up = hp::fundamental_p(cp.delta, cp.rho, s, zh);
    const hp::Triple pm = hp::fundamental_p(cm.delta, cm.rho, s, zh);
    const hp::Triple qm = hp::fundamental_q(cm.delta, cm.rho, s, zh);
    const hp::Roots rm = hp::roots(cm.delta, cm.rho, s);
    const hp::real bm = hp::gamma(1 + rm.psi - rm.phi) / hp::gamma(rm.psi) * pow(2 / (s * s), rm.psi + rm.phi);
    const hp::real sm = pow(hp::real(zh), 2 * cm.delta / (s * s)) * exp(2 / (s * s * zh));
    const double c1 = static_cast<double>(up.d1 * (qm.v - qm.d1 * zh) / (bm * sm));
    const double c2 = static_cast<double>(up.d1 * (pm.d1 * zh - pm.v) / (bm * sm));
    CHECK(std::fabs(u.c1() - c1) < 1e-9 * std::fabs(c1));
    CHECK(std::fabs(u.c2() - c2) < 1e-9 * std::fabs(c2));
    // The switch point lies below the -kappa regime's own first-order root, so
    // P_{-kappa}' z - P_{-kappa} < 0 there and c2 comes out negative.
    CHECK(c2 < 0.0);
    CHECK(u.c2() < 0.0);
}

TEST_CASE("convexity and positivity on log grids")
{
    for (const ModelParams& m : {kFloor, make_model(0.0, 0.5, 0.05, 0.5), make_model(0.02, 0.1, 0.05, 0.3)}) {
        std::vector<Reference> refs = {Reference::zero(), Reference::infinity(), Reference::finite(0.3),
                                       Reference::finite(3.0)};
        for (const Reference& ref : refs) {
            const ExcessiveFunction u = build_excessive(m, ref);
            for (double lz = -1.5; lz <= 3.0; lz += 0.02) {
                const ScaledTriple t = u.eval_scaled(std::pow(10.0, lz));
                CHECK(t.d[0] > 0.0);
                CHECK(t.d[2] > 0.0);
            }
        }
    }
}

TEST_CASE("switch point depends continuously on the reference point")
{
    for (double c : {0.05, 0.5, 4.0}) {
        const double base = solve_hat_z(kFloor, c);
        double prev = INFINITY;
        for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const double gap = std::fabs(solve_hat_z(kFloor, c * (1 + d)) - base);
            CHECK(gap <= std::fmax(prev, 1e-11 * base));
            prev = gap;
        }
        CHECK(prev < 1e-6 * base);
    }
}

TEST_CASE("evaluation domain")
{
    const ExcessiveFunction u = build_excessive(kFloor, Reference::finite(2.0));
    CHECK_THROWS_AS(eval_u(u, 0.0, 0), Error);
    CHECK_THROWS_AS(eval_u(u, 1.0, 5), Error);
    CHECK_THROWS_AS(build_excessive(kFloor, Reference::finite(-1.0)), Error);
}
