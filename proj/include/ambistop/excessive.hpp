#pragma once

#include <vector>

#include "ambistop/fundamental.hpp"
#include "ambistop/model.hpp"

namespace ambistop {

enum class ReferenceKind { Zero, Finite, Infinity };

struct Reference {
    ReferenceKind kind = ReferenceKind::Zero;
    double c = 0.0;

    static Reference zero() { return {ReferenceKind::Zero, 0.0}; }
    static Reference finite(double c) { return {ReferenceKind::Finite, c}; }
    static Reference infinity() { return {ReferenceKind::Infinity, 0.0}; }
};

// Solution of one regime ODE continued from (z0, h, h') to any z >= z0 by
// Taylor steps.  Nodes are cached on a geometric grid.
class RegimeContinuation {
public:
    RegimeContinuation() = default;
    RegimeContinuation(double sigma, RegimeCoefficients coef, double z0, double h0, double hp0);

    double start() const { return nodes_.empty() ? 0.0 : nodes_.front().z; }
    ScaledTriple eval(double z) const;

private:
    struct Node {
        double z, f, fp, log_scale;
    };
    Node advance(const Node& from, double z) const;
    double second(double z, double f, double fp) const;

    double sigma_ = 0.0;
    RegimeCoefficients coef_{0.0, 0.0};
    std::vector<Node> nodes_;
};

// Unique root z_bar > 1/r of P(z) - z P'(z) for the +kappa regime.
double solve_zbar(const ModelParams& model);

class ExcessiveFunction {
public:
    const ModelParams& model() const { return model_; }
    const Reference& reference() const { return ref_; }
    // Switch point; NaN for the Infinity member.
    double hat_z() const { return hat_z_; }
    // Coefficients of P_{-kappa}, Q_{-kappa} on [hat_z, inf); NaN where that
    // basis is degenerate.
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    // Lower-branch weights P'(c)/(B S'(c)) and -Q'(c)/(B S'(c)) in log form.
    double log_alpha() const { return log_alpha_; }
    double log_beta() const { return log_beta_; }

    const FundamentalPair& plus() const { return plus_; }
    const FundamentalPair& minus() const { return minus_; }

    ScaledTriple eval_scaled(double z) const;
    double eval(double z, int order) const;
    // U(z) - U'(z) z
    double delta(double z) const;
    // g(z) / U(z) computed without overflow.
    double ratio(double g, double z) const;

    friend ExcessiveFunction build_excessive(const ModelParams& model, Reference ref);

private:
    ExcessiveFunction(const ModelParams& model, Reference ref);
    ScaledTriple lower_scaled(double z) const;

    ModelParams model_;
    Reference ref_;
    FundamentalPair plus_;
    FundamentalPair minus_;
    double hat_z_ = 0.0;
    double c1_ = 0.0;
    double c2_ = 0.0;
    double log_alpha_ = 0.0;
    double log_beta_ = 0.0;
    RegimeContinuation upper_;
};

// Switch point hat z_c > c of U_c, the root of U'(z) z - U(z).
double solve_hat_z(const ModelParams& model, double c);

ExcessiveFunction build_excessive(const ModelParams& model, Reference ref);

double eval_u(const ExcessiveFunction& f, double z, int order);

}  // namespace ambistop
