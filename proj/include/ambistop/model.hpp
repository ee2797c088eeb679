#pragma once

#include <functional>
#include <memory>
#include <string>

namespace ambistop {

// Market and ambiguity primitives. Build through make_model.
struct ModelParams {
    double mu = 0.0;
    double sigma = 0.0;
    double r = 0.0;
    double kappa = 0.0;
    // True when 2mu > 2 kappa sigma - sigma^2, the precondition of the
    // upper-boundary regime.
    bool upper_boundary_ok = false;

    double rho_plus() const { return r - mu + kappa * sigma; }
    double rho_minus() const { return r - mu - kappa * sigma; }
};

ModelParams make_model(double mu, double sigma, double r, double kappa);

bool same_model(const ModelParams& a, const ModelParams& b);

enum class DriftSign { PlusKappa, MinusKappa };

// Coefficients of 1/2 sigma^2 z^2 h'' + (1 - delta z) h' - rho h = 0.
struct RegimeCoefficients {
    double delta;
    double rho;
};

RegimeCoefficients regime_coefficients(const ModelParams& model, DriftSign sign);

struct CharacteristicRoots {
    double psi;
    double phi;
    DriftSign drift_sign;
};

// Roots of q^2 + (1 + 2 delta/sigma^2) q - 2 rho/sigma^2 = 0, psi the larger.
CharacteristicRoots characteristic_roots(const ModelParams& model, DriftSign sign);

enum class PayoffKind { Integral, Exchange, Floor, Custom };

// Positively homogeneous payoff F(x, y) = x g(y/x), stored via its profile g.
class Payoff {
public:
    static Payoff integral();
    static Payoff exchange(double strike);
    static Payoff floor();
    static Payoff custom(std::function<double(double)> profile, std::string name = "custom");

    PayoffKind kind() const { return kind_; }
    double strike() const { return strike_; }
    const std::string& name() const { return name_; }

    double profile(double z) const;
    double operator()(double x, double y) const { return x * profile(y / x); }

private:
    PayoffKind kind_ = PayoffKind::Integral;
    double strike_ = 0.0;
    std::string name_ = "integral";
    std::shared_ptr<const std::function<double(double)>> custom_;
};

PayoffKind parse_payoff_kind(const std::string& name);

}  // namespace ambistop
