#include "ambistop/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ambistop/error.hpp"

namespace ambistop {

ModelParams make_model(double mu, double sigma, double r, double kappa)
{
    if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(r) || !std::isfinite(kappa))
        fail(ErrorCode::DomainError, "model parameters must be finite");
    if (!(sigma > 0.0))
        fail(ErrorCode::NonPositiveSigma, "sigma must be > 0");
    if (!(r > 0.0))
        fail(ErrorCode::NonPositiveRate, "r must be > 0");
    if (!(kappa >= 0.0))
        fail(ErrorCode::NegativeKappa, "kappa must be >= 0");
    ModelParams m{mu, sigma, r, kappa, false};
    if (!(m.rho_plus() > 0.0)) {
        std::ostringstream os;
        os << "r - mu + kappa*sigma = " << m.rho_plus() << " must be > 0";
        fail(ErrorCode::DegenerateRho, os.str());
    }
    m.upper_boundary_ok = 2.0 * mu > 2.0 * kappa * sigma - sigma * sigma;
    return m;
}

bool same_model(const ModelParams& a, const ModelParams& b)
{
    return a.mu == b.mu && a.sigma == b.sigma && a.r == b.r && a.kappa == b.kappa;
}

RegimeCoefficients regime_coefficients(const ModelParams& m, DriftSign sign)
{
    const double ks = m.kappa * m.sigma;
    if (sign == DriftSign::PlusKappa)
        return {m.mu - ks, m.r - m.mu + ks};
    return {m.mu + ks, m.r - m.mu - ks};
}

CharacteristicRoots characteristic_roots(const ModelParams& m, DriftSign sign)
{
    const RegimeCoefficients rc = regime_coefficients(m, sign);
    const double s2 = m.sigma * m.sigma;
    const double lin = 1.0 + 2.0 * rc.delta / s2;
    const double con = 2.0 * rc.rho / s2;  // q^2 + lin q - con = 0
    const double disc = lin * lin + 4.0 * con;
    if (disc < 0.0) {
        std::ostringstream os;
        os << "discriminant " << disc << " < 0";
        fail(ErrorCode::ComplexRoots, os.str());
    }
    const double sq = std::sqrt(disc);
    // Larger-magnitude root first, the other by Vieta (product = -con).
    const double big = lin >= 0.0 ? 0.5 * (-lin - sq) : 0.5 * (-lin + sq);
    const double small = big != 0.0 ? -con / big : 0.0;
    CharacteristicRoots out;
    out.psi = std::max(big, small);
    out.phi = std::min(big, small);
    out.drift_sign = sign;
    return out;
}

Payoff Payoff::integral()
{
    Payoff p;
    p.kind_ = PayoffKind::Integral;
    p.name_ = "integral";
    return p;
}

Payoff Payoff::exchange(double strike)
{
    if (!(strike > 0.0) || !std::isfinite(strike))
        fail(ErrorCode::NonPositiveStrike, "exchange strike must be > 0");
    Payoff p;
    p.kind_ = PayoffKind::Exchange;
    p.strike_ = strike;
    p.name_ = "exchange";
    return p;
}

Payoff Payoff::floor()
{
    Payoff p;
    p.kind_ = PayoffKind::Floor;
    p.name_ = "floor";
    return p;
}

Payoff Payoff::custom(std::function<double(double)> profile, std::string name)
{
    Payoff p;
    p.kind_ = PayoffKind::Custom;
    p.name_ = std::move(name);
    p.custom_ = std::make_shared<const std::function<double(double)>>(std::move(profile));
    return p;
}

double Payoff::profile(double z) const
{
    switch (kind_) {
    case PayoffKind::Integral: return z;
    case PayoffKind::Exchange: return z > strike_ ? z - strike_ : 0.0;
    case PayoffKind::Floor: return z > 1.0 ? z : 1.0;
    case PayoffKind::Custom: return (*custom_)(z);
    }
    return 0.0;
}

PayoffKind parse_payoff_kind(const std::string& name)
{
    if (name == "integral") return PayoffKind::Integral;
    if (name == "exchange") return PayoffKind::Exchange;
    if (name == "floor") return PayoffKind::Floor;
    if (name == "custom") return PayoffKind::Custom;
    fail(ErrorCode::ConfigError, "unknown payoff '" + name + "'");
}

}  // namespace ambistop
