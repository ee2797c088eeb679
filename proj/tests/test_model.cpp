#include <doctest.h>

#include <cmath>
#include <random>

#include "ambistop/error.hpp"
#include "ambistop/model.hpp"
#include "hp_oracle.hpp"

using namespace ambistop;

TEST_CASE("make_model accepts valid primitives and rejects invalid ones")
{
    CHECK_NOTHROW(make_model(0.02, 0.10, 0.05, 0.5));
    CHECK_NOTHROW(make_model(0.0, 0.5, 0.05, 1.75));
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::ConfigError;
    };
    CHECK(code_of([] { make_model(0.02, -0.1, 0.05, 0.0); }) == ErrorCode::NonPositiveSigma);
    CHECK(code_of([] { make_model(0.02, 0.1, 0.0, 0.0); }) == ErrorCode::NonPositiveRate);
    CHECK(code_of([] { make_model(0.02, 0.1, 0.05, -0.1); }) == ErrorCode::NegativeKappa);
    CHECK(code_of([] { make_model(0.10, 0.1, 0.05, 0.1); }) == ErrorCode::DegenerateRho);
}

TEST_CASE("upper-boundary flag")
{
    CHECK(make_model(0.02, 0.3, 0.05, 0.1).upper_boundary_ok);
    CHECK_FALSE(make_model(0.0, 0.5, 0.05, 1.75).upper_boundary_ok);
}

TEST_CASE("characteristic roots at kappa = 0 against extended precision")
{
    const ModelParams m = make_model(0.0, 0.5, 0.05, 0.0);
    const CharacteristicRoots r = characteristic_roots(m, DriftSign::PlusKappa);
    // q^2 + q - 0.4 = 0
    const hp::real disc = sqrt(hp::real(1) + hp::real(4) * hp::real("0.4"));
    const double psi = static_cast<double>((disc - 1) / 2);
    const double phi = static_cast<double>((-disc - 1) / 2);
    CHECK(std::fabs(r.psi - psi) < 1e-15);
    CHECK(std::fabs(r.phi - phi) < 1e-15);
    CHECK(std::fabs(r.psi - 0.3062257) < 1e-7);
    const CharacteristicRoots rm = characteristic_roots(m, DriftSign::MinusKappa);
    CHECK(rm.psi == r.psi);
    CHECK(rm.phi == r.phi);
}

TEST_CASE("Vieta identities on a random sweep")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> umu(-0.1, 0.1), us(0.05, 0.8), ur(0.01, 0.2), uk(0.0, 3.0);
    int n = 0;
    while (n < 500) {
        ModelParams m;
        try {
            m = make_model(umu(rng), us(rng), ur(rng), uk(rng));
        } catch (const Error&) {
            continue;
        }
        for (DriftSign s : {DriftSign::PlusKappa, DriftSign::MinusKappa}) {
            const CharacteristicRoots r = characteristic_roots(m, s);
            const RegimeCoefficients c = regime_coefficients(m, s);
            const double s2 = m.sigma * m.sigma;
            const double sum = -(1.0 + 2.0 * c.delta / s2);
            const double prod = -2.0 * c.rho / s2;
            CHECK(std::fabs(r.psi + r.phi - sum) <= 1e-12 * std::fmax(std::fabs(sum), std::fabs(r.phi)));
            CHECK(std::fabs(r.psi * r.phi - prod) <= 1e-12 * std::fmax(std::fabs(prod), 1e-300));
            CHECK(r.psi >= r.phi);
            if (s == DriftSign::PlusKappa) {
                CHECK(r.psi > 0.0);
                CHECK(r.phi < 0.0);
            }
        }
        ++n;
    }
}

TEST_CASE("psi is increasing in kappa")
{
    double prev = -1.0;
    for (int i = 0; i <= 40; ++i) {
        const ModelParams m = make_model(0.02, 0.1, 0.05, 0.05 * i);
        const double psi = characteristic_roots(m, DriftSign::PlusKappa).psi;
        CHECK(psi > prev);
        prev = psi;
    }
}

TEST_CASE("payoff profiles and homogeneity")
{
    const Payoff in = Payoff::integral(), ex = Payoff::exchange(0.5), fl = Payoff::floor();
    CHECK(in.profile(3.0) == 3.0);
    CHECK(ex.profile(0.2) == 0.0);
    CHECK(ex.profile(2.0) == 1.5);
    CHECK(fl.profile(0.3) == 1.0);
    CHECK(fl.profile(4.0) == 4.0);
    CHECK_THROWS_AS(Payoff::exchange(0.0), Error);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double lam = u(rng), x = u(rng), y = u(rng);
        const double pow2 = std::ldexp(1.0, static_cast<int>(lam) - 5);
        for (const Payoff* p : {&in, &ex, &fl}) {
            // Power-of-two scaling is exact in floating point.
            CHECK((*p)(pow2 * x, pow2 * y) == pow2 * (*p)(x, y));
            CHECK((*p)(lam * x, lam * y) == doctest::Approx(lam * (*p)(x, y)).epsilon(1e-12));
        }
    }
    const Payoff put = Payoff::custom([](double z) { return z < 2.0 ? 2.0 - z : 0.0; }, "put");
    CHECK(put.kind() == PayoffKind::Custom);
    CHECK(put(2.0, 1.0) == 2.0 * 1.5);
}
