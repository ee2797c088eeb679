#pragma once

#include "ambistop/model.hpp"

namespace ambistop {

// Value and first two z-derivatives sharing one scale:
// f^{(k)}(z) = d[k] * exp(log_scale).
struct ScaledTriple {
    double d[3];
    double log_scale;

    double get(int order) const;
};

// Increasing (P) and decreasing (Q) solutions of
// 1/2 sigma^2 z^2 h'' + (1 - delta z) h' - rho h = 0 for one drift sign.
class FundamentalPair {
public:
    FundamentalPair(const ModelParams& model, DriftSign sign);

    const ModelParams& model() const { return model_; }
    DriftSign drift_sign() const { return roots_.drift_sign; }
    const CharacteristicRoots& roots() const { return roots_; }
    double delta() const { return coef_.delta; }
    double rho() const { return coef_.rho; }

    // B = Gamma(1+psi-phi)/Gamma(psi) (2/sigma^2)^(psi+phi); zero when psi is a
    // nonpositive integer, negative when Gamma(psi) < 0.
    double wronskian_b() const;
    double log_abs_wronskian_b() const { return log_abs_b_; }
    int wronskian_sign() const { return b_sign_; }

    ScaledTriple p_scaled(double z) const;
    ScaledTriple q_scaled(double z) const;
    double p(double z, int order) const;
    double q(double z, int order) const;

    double log_scale_density(double z) const;
    double scale_density(double z) const;
    double speed_density(double z) const;

    // h'' from the ODE given h and h'.
    double second_derivative(double z, double h, double hp) const;

private:
    ModelParams model_;
    CharacteristicRoots roots_;
    RegimeCoefficients coef_;
    double b_param_;
    double log_abs_b_;
    int b_sign_;
};

double eval_p(const FundamentalPair& pair, double z, int order);
double eval_q(const FundamentalPair& pair, double z, int order);
double scale_density(const FundamentalPair& pair, double z);
double speed_density(const FundamentalPair& pair, double z);
double wronskian_b(const FundamentalPair& pair);

}  // namespace ambistop
