#pragma once

namespace ambistop {

struct HypergeometricEval {
    double value;
    double derivative_x;
    double est_rel_error;
};

// The represented numbers are value * exp(log_scale) and derivative_x * exp(log_scale).
struct ScaledHypergeometric {
    double value;
    double derivative_x;
    double log_scale;
    double est_rel_error;
};

struct SignedLogGamma {
    double log_abs;
    int sign;
};

double log_gamma(double x);

// log|Gamma(x)| and the sign of Gamma(x) for x not a nonpositive integer.
SignedLogGamma log_abs_gamma(double x);

// Kummer M(a, b, x) = 1F1(a; b; x), x >= 0.
HypergeometricEval kummer_m(double a, double b, double x);
ScaledHypergeometric kummer_m_scaled(double a, double b, double x);

// Tricomi U(a, b, x), x > 0.  Any real a is accepted.
HypergeometricEval tricomi_u(double a, double b, double x);
ScaledHypergeometric tricomi_u_scaled(double a, double b, double x);

// Largest est_rel_error an evaluation may carry before it is rejected.
inline constexpr double kHypergeometricTolerance = 1e-10;

}  // namespace ambistop
