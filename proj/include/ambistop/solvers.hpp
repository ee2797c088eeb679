#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ambistop/excessive.hpp"
#include "ambistop/model.hpp"

namespace ambistop {

enum class Regime { LowerBoundary, UpperBoundary, TwoSided };

const char* regime_name(Regime regime);

// Optimal stopping rule and value for one model and payoff. For
// LowerBoundary the continuation set is z < z_star, for UpperBoundary it is
// z > z_star, for TwoSided it is z1 < z < z2.
struct StoppingSolution {
    ModelParams model;
    Payoff payoff;
    Regime regime = Regime::LowerBoundary;
    double z_star = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double c_star = 0.0;
    std::shared_ptr<const ExcessiveFunction> excessive;
    double pi_star = 0.0;

    // Open continuation interval in z; infinite ends where there is no boundary.
    std::pair<double, double> continuation_band() const;
    bool stops_at(double z) const;
    // Point where the worst-case generator switches from +kappa to -kappa.
    double switch_point() const;
};

double integral_boundary(const ModelParams& model);

// Root of U_0(z) - (z - K) U_0'(z) on (max(z_bar, K), inf).
double exchange_boundary(const ModelParams& model, double strike);

// Integral form of the exchange first-order condition, in units of the
// boundary term K U_0'(z_bar) / S'_{-kappa}(z_bar).
struct ExchangeIntegralCheck {
    double boundary_term;
    double integral;
    double quadrature_error;
    double relative_residual;
};

ExchangeIntegralCheck exchange_integral_check(const ModelParams& model, double strike, double z_star);

StoppingSolution integral_solve(const ModelParams& model);
StoppingSolution exchange_solve(const ModelParams& model, double strike);
StoppingSolution floor_solve(const ModelParams& model);

// Single-boundary solutions for custom payoffs, with the boundary at the
// maximiser of g / U_0 (lower) or g / Q (upper).
StoppingSolution lower_boundary_solve(const ModelParams& model, const Payoff& payoff);
StoppingSolution upper_boundary_solve(const ModelParams& model, const Payoff& payoff);

// Integral, exchange and floor payoffs; custom payoffs need an explicit regime.
StoppingSolution solve(const ModelParams& model, const Payoff& payoff);

// (z_bar - P(z_bar)) / z_bar, whose sign selects the floor regime.
double floor_regime_indicator(const ModelParams& model);

double critical_kappa_floor(double mu, double sigma, double r, double kappa_max = 10.0);

double value(const StoppingSolution& solution, double x, double y);

double worst_case_generator(const StoppingSolution& solution, double x, double y);

// Maximisers of g / U_c among the local maxima found on the grid, each
// polished by a bracketed line search.
std::vector<double> stopping_set_test(const ModelParams& model, const Payoff& payoff, Reference ref,
                                      const std::vector<double>& z_grid);

}  // namespace ambistop
