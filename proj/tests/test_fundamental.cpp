#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ambistop/error.hpp"
#include "ambistop/fundamental.hpp"
#include "hp_oracle.hpp"

using namespace ambistop;

namespace {

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

std::vector<ModelParams> model_sweep()
{
    std::vector<ModelParams> out;
    out.push_back(make_model(0.0, 0.5, 0.05, 0.0));
    out.push_back(make_model(0.0, 0.5, 0.05, 0.5));
    out.push_back(make_model(0.0, 0.5, 0.05, 1.75));
    out.push_back(make_model(0.02, 0.1, 0.05, 0.3));
    out.push_back(make_model(0.02, 0.3, 0.05, 0.1));
    out.push_back(make_model(-0.03, 0.25, 0.08, 0.8));
    return out;
}

}  // namespace

TEST_CASE("P tends to one at the entrance boundary")
{
    for (const ModelParams& m : model_sweep()) {
        const FundamentalPair pair(m, DriftSign::PlusKappa);
        CHECK(std::fabs(eval_p(pair, 1e-8, 0) - 1.0) < 1e-4);
    }
}

TEST_CASE("P and Q against extended-precision hypergeometric evaluation")
{
    const ModelParams m = make_model(0.0, 0.5, 0.05, 0.5);
    const FundamentalPair pair(m, DriftSign::PlusKappa);
    const RegimeCoefficients c = regime_coefficients(m, DriftSign::PlusKappa);
    for (double z : {0.1, 1.0, 10.0, 80.0}) {
        const hp::Triple p = hp::fundamental_p(c.delta, c.rho, m.sigma, z);
        const hp::Triple q = hp::fundamental_q(c.delta, c.rho, m.sigma, z);
        for (int k = 0; k < 3; ++k) {
            const hp::real pv = k == 0 ? p.v : (k == 1 ? p.d1 : p.d2);
            const hp::real qv = k == 0 ? q.v : (k == 1 ? q.d1 : q.d2);
            // Second derivatives come from the ODE and lose a few digits to cancellation.
            const double tol = k == 2 ? 1e-9 : 1e-11;
            INFO("z=" << z << " k=" << k);
            CHECK(rel(eval_p(pair, z, k), static_cast<double>(pv)) < tol);
            CHECK(rel(eval_q(pair, z, k), static_cast<double>(qv)) < tol);
        }
    }
}

TEST_CASE("ODE residual with independently computed second derivatives")
{
    const ModelParams m = make_model(0.0, 0.5, 0.05, 0.5);
    const FundamentalPair pair(m, DriftSign::PlusKappa);
    const RegimeCoefficients c = regime_coefficients(m, DriftSign::PlusKappa);
    const double s2 = m.sigma * m.sigma;
    for (double z : {0.1, 1.0, 10.0}) {
        const double p2 = static_cast<double>(hp::fundamental_p(c.delta, c.rho, m.sigma, z).d2);
        const double q2 = static_cast<double>(hp::fundamental_q(c.delta, c.rho, m.sigma, z).d2);
        const double p0 = eval_p(pair, z, 0), p1 = eval_p(pair, z, 1);
        const double q0 = eval_q(pair, z, 0), q1 = eval_q(pair, z, 1);
        const double rp = 0.5 * s2 * z * z * p2 + (1 - c.delta * z) * p1 - c.rho * p0;
        const double rq = 0.5 * s2 * z * z * q2 + (1 - c.delta * z) * q1 - c.rho * q0;
        CHECK(std::fabs(rp) < 1e-8 * std::fabs(p0));
        CHECK(std::fabs(rq) < 1e-8 * std::fabs(q0));
    }
}

TEST_CASE("Wronskian constant against extended precision and measured constancy")
{
    const ModelParams m = make_model(0.0, 0.5, 0.05, 0.0);
    const FundamentalPair pair(m, DriftSign::PlusKappa);
    const hp::Roots q = hp::roots(0, hp::real("0.05"), hp::real("0.5"));
    const hp::real b = hp::gamma(1 + q.psi - q.phi) / hp::gamma(q.psi) * pow(hp::real(8), q.psi + q.phi);
    CHECK(rel(wronskian_b(pair), static_cast<double>(b)) < 1e-10);

    for (const ModelParams& mm : model_sweep()) {
        const FundamentalPair pr(mm, DriftSign::PlusKappa);
        std::vector<double> w;
        for (double z : {0.1, 1.0, 10.0}) {
            const ScaledTriple p = pr.p_scaled(z), qq = pr.q_scaled(z);
            const double lg = p.log_scale + qq.log_scale - pr.log_scale_density(z);
            w.push_back((p.d[1] * qq.d[0] - qq.d[1] * p.d[0]) * std::exp(lg - pr.log_abs_wronskian_b()));
        }
        CHECK(wronskian_b(pr) > 0.0);
        CHECK(std::fabs(w[0] - w[1]) < 1e-9 * std::fabs(w[1]));
        CHECK(std::fabs(w[2] - w[1]) < 1e-9 * std::fabs(w[1]));
        CHECK(std::fabs(w[1] - 1.0) < 1e-8);
    }
}

TEST_CASE("first-order condition at the reported integral boundary")
{
    const ModelParams m = make_model(0.0, 0.5, 0.05, 0.5);
    const FundamentalPair pair(m, DriftSign::PlusKappa);
    const double z = 27.9912;
    CHECK(rel(eval_p(pair, z, 1) * z, eval_p(pair, z, 0)) < 1e-3);
}

TEST_CASE("monotonicity, convexity and the sign of zQ' - Q")
{
    for (const ModelParams& m : model_sweep()) {
        const FundamentalPair pair(m, DriftSign::PlusKappa);
        CHECK(eval_q(pair, 1.0, 1) < 0.0);
        for (double lz = -3.0; lz <= 3.0; lz += 0.05) {
            const double z = std::pow(10.0, lz);
            const ScaledTriple p = pair.p_scaled(z), q = pair.q_scaled(z);
            CHECK(p.d[0] > 0.0);
            CHECK(p.d[1] > 0.0);
            CHECK(p.d[2] > 0.0);
            CHECK(q.d[0] > 0.0);
            CHECK(q.d[1] < 0.0);
            CHECK(q.d[2] > 0.0);
            CHECK(z * q.d[1] - q.d[0] < 0.0);
            if (z <= 1.0 / m.r)
                CHECK(p.d[0] - z * p.d[1] > 0.0);
        }
    }
}

TEST_CASE("scale and speed densities")
{
    const ModelParams m = make_model(0.05, 0.5, 0.05, 0.1);  // mu = kappa sigma
    const FundamentalPair pair(m, DriftSign::PlusKappa);
    CHECK(rel(scale_density(pair, 1.0), std::exp(2.0 / 0.25)) < 1e-14);
    for (double z : {0.3, 1.0, 7.0, 40.0}) {
        const double prod = speed_density(pair, z) * scale_density(pair, z) * 0.25 * z * z / 2.0;
        CHECK(std::fabs(prod - 1.0) < 1e-14);
    }
}

TEST_CASE("canonical derivative identities by finite differences")
{
    for (const ModelParams& m : model_sweep()) {
        const FundamentalPair pair(m, DriftSign::PlusKappa);
        const double z = 1.0, h = 1e-4;
        auto ratio = [&](double t) { return eval_p(pair, t, 1) / scale_density(pair, t); };
        auto gap = [&](double t) { return (eval_p(pair, t, 0) - t * eval_p(pair, t, 1)) / scale_density(pair, t); };
        // Fourth-order central difference.
        auto d = [&](auto&& f) { return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h); };
        const double rho = pair.rho();
        CHECK(rel(d(ratio), rho * eval_p(pair, z, 0) * speed_density(pair, z)) < 1e-6);
        CHECK(rel(d(gap), (1 - m.r * z) * eval_p(pair, z, 0) * speed_density(pair, z)) < 1e-6);
    }
}

TEST_CASE("domain errors and overflow reporting")
{
    const FundamentalPair pair(make_model(0.0, 0.5, 0.05, 0.5), DriftSign::PlusKappa);
    CHECK_THROWS_AS(eval_p(pair, 0.0, 0), Error);
    CHECK_THROWS_AS(eval_q(pair, -1.0, 0), Error);
    CHECK_THROWS_AS(eval_p(pair, 1.0, 3), Error);
    try {
        eval_q(pair, 1e-4, 0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Overflow);
    }
    CHECK(std::isfinite(pair.q_scaled(1e-4).log_scale));
}
