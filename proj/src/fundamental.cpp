#include "ambistop/fundamental.hpp"

#include <cmath>
#include <sstream>

#include "ambistop/error.hpp"
#include "ambistop/special_functions.hpp"

namespace ambistop {

namespace {

constexpr double kMaxLog = 709.0;

void require_positive(double z, const char* what)
{
    if (!(z > 0.0) || !std::isfinite(z)) {
        std::ostringstream os;
        os << what << " requires finite z > 0, got " << z;
        fail(ErrorCode::DomainError, os.str());
    }
}

void require_order(int order)
{
    if (order < 0 || order > 2)
        fail(ErrorCode::DomainError, "derivative order must be 0, 1 or 2");
}

double unscaled(const ScaledTriple& t, int order, const char* what, double z)
{
    const double v = t.d[order];
    if (v == 0.0)
        return 0.0;
    const double lg = t.log_scale + std::log(std::fabs(v));
    if (lg > kMaxLog) {
        std::ostringstream os;
        os << what << " at z = " << z << " exceeds double range (log magnitude " << lg << ")";
        fail(ErrorCode::Overflow, os.str());
    }
    return v * std::exp(t.log_scale);
}

}  // namespace

double ScaledTriple::get(int order) const
{
    return d[order] * std::exp(log_scale);
}

FundamentalPair::FundamentalPair(const ModelParams& model, DriftSign sign)
    : model_(model), roots_(characteristic_roots(model, sign)), coef_(regime_coefficients(model, sign))
{
    b_param_ = 1.0 + roots_.psi - roots_.phi;
    const double psi = roots_.psi;
    const double s2 = model_.sigma * model_.sigma;
    // 1/Gamma(psi) vanishes at nonpositive integers; treat near hits as degenerate.
    if (psi <= 0.5 && std::fabs(psi - std::nearbyint(psi)) < 1e-8) {
        log_abs_b_ = -INFINITY;
        b_sign_ = 0;
        return;
    }
    const SignedLogGamma gb = log_abs_gamma(b_param_);
    const SignedLogGamma gp = log_abs_gamma(psi);
    log_abs_b_ = gb.log_abs - gp.log_abs + (psi + roots_.phi) * std::log(2.0 / s2);
    b_sign_ = gb.sign * gp.sign;
}

double FundamentalPair::wronskian_b() const
{
    if (b_sign_ == 0)
        return 0.0;
    return b_sign_ * std::exp(log_abs_b_);
}

ScaledTriple FundamentalPair::p_scaled(double z) const
{
    require_positive(z, "P");
    const double s2 = model_.sigma * model_.sigma;
    const double w = 2.0 / (s2 * z);
    const double psi = roots_.psi;
    const ScaledHypergeometric u = tricomi_u_scaled(psi, b_param_, w);
    // P = w^psi U(w),  dP/dz = -(psi U + w U') w^psi / z
    const double norm = std::fabs(u.value);
    ScaledTriple t;
    t.log_scale = psi * std::log(w) + u.log_scale + std::log(norm);
    t.d[0] = u.value / norm;
    t.d[1] = -(psi * u.value + w * u.derivative_x) / (norm * z);
    t.d[2] = second_derivative(z, t.d[0], t.d[1]);
    return t;
}

ScaledTriple FundamentalPair::q_scaled(double z) const
{
    require_positive(z, "Q");
    const double s2 = model_.sigma * model_.sigma;
    const double w = 2.0 / (s2 * z);
    const double psi = roots_.psi;
    const ScaledHypergeometric m = kummer_m_scaled(psi, b_param_, w);
    const double norm = std::fabs(m.value);
    ScaledTriple t;
    t.log_scale = psi * std::log(w) + m.log_scale + std::log(norm);
    t.d[0] = m.value / norm;
    t.d[1] = -(psi * m.value + w * m.derivative_x) / (norm * z);
    t.d[2] = second_derivative(z, t.d[0], t.d[1]);
    return t;
}

double FundamentalPair::p(double z, int order) const
{
    require_order(order);
    return unscaled(p_scaled(z), order, "P", z);
}

double FundamentalPair::q(double z, int order) const
{
    require_order(order);
    return unscaled(q_scaled(z), order, "Q", z);
}

double FundamentalPair::second_derivative(double z, double h, double hp) const
{
    const double s2 = model_.sigma * model_.sigma;
    return 2.0 * (coef_.rho * h - (1.0 - coef_.delta * z) * hp) / (s2 * z * z);
}

double FundamentalPair::log_scale_density(double z) const
{
    require_positive(z, "S'");
    const double s2 = model_.sigma * model_.sigma;
    return 2.0 * coef_.delta / s2 * std::log(z) + 2.0 / (s2 * z);
}

double FundamentalPair::scale_density(double z) const
{
    const double lg = log_scale_density(z);
    if (lg > kMaxLog)
        fail(ErrorCode::Overflow, "scale density exceeds double range");
    return std::exp(lg);
}

double FundamentalPair::speed_density(double z) const
{
    const double s2 = model_.sigma * model_.sigma;
    return 2.0 / (s2 * z * z) * std::exp(-log_scale_density(z));
}

double eval_p(const FundamentalPair& pair, double z, int order) { return pair.p(z, order); }
double eval_q(const FundamentalPair& pair, double z, int order) { return pair.q(z, order); }
double scale_density(const FundamentalPair& pair, double z) { return pair.scale_density(z); }
double speed_density(const FundamentalPair& pair, double z) { return pair.speed_density(z); }
double wronskian_b(const FundamentalPair& pair) { return pair.wronskian_b(); }

}  // namespace ambistop
