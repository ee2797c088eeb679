#include "ambistop/special_functions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ambistop/error.hpp"

namespace ambistop {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHalfLog2Pi = 0.918938533204672741780329736405617640;
constexpr double kMaxLog = 709.0;

struct Neumaier {
    double s = 0.0;
    double c = 0.0;
    void add(double v)
    {
        const double t = s + v;
        if (std::fabs(s) >= std::fabs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double sum() const { return s + c; }
};

bool is_nonpositive_integer(double v)
{
    return v <= 0.0 && v == std::nearbyint(v);
}

// Stirling series remainder for x >= 10 (terms through B_16).
double stirling_tail(double x)
{
    const double x2 = 1.0 / (x * x);
    double s = -3617.0 / 122400.0;
    s = s * x2 + 1.0 / 156.0;
    s = s * x2 - 691.0 / 360360.0;
    s = s * x2 + 1.0 / 1188.0;
    s = s * x2 - 1.0 / 1680.0;
    s = s * x2 + 1.0 / 1260.0;
    s = s * x2 - 1.0 / 360.0;
    s = s * x2 + 1.0 / 12.0;
    return s / x;
}

double log_gamma_positive(double x)
{
    if (x >= 10.0)
        return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_tail(x);
    double prod = 1.0;
    while (x < 10.0) {
        prod *= x;
        x += 1.0;
    }
    return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_tail(x) - std::log(prod);
}

// sin(pi x) with the argument reduced exactly around the nearest integer.
double sin_pi(double x)
{
    const double n = std::nearbyint(x);
    const double s = std::sin(kPi * (x - n));
    return std::fmod(std::fabs(n), 2.0) == 1.0 ? -s : s;
}

struct SeriesResult {
    double value;
    double derivative;
    double rel_error;
};

// Direct summation of M and M' = sum_{n>=0} t_n (a+n)/(b+n).
SeriesResult kummer_series(double a, double b, double x)
{
    Neumaier sum, dsum;
    sum.add(1.0);
    double term = 1.0;
    double abs_sum = 1.0;
    double abs_dsum = 0.0;
    double last = 0.0;
    const int max_terms = 100000;
    int n = 0;
    for (; n < max_terms; ++n) {
        const double dterm = term * ((a + n) / (b + n));
        dsum.add(dterm);
        abs_dsum += std::fabs(dterm);
        term = dterm * (x / (n + 1));
        sum.add(term);
        abs_sum += std::fabs(term);
        if (dterm == 0.0 && term == 0.0)
            break;
        const double next_ratio = std::fabs((a + n + 1) / (b + n + 1) * x / (n + 2));
        if (next_ratio < 0.5 && std::fabs(term) <= 1e-17 * std::fabs(sum.sum())
            && std::fabs(dterm) <= 1e-17 * std::fabs(dsum.sum())) {
            last = 2.0 * std::fabs(term);
            break;
        }
    }
    SeriesResult out;
    out.value = sum.sum();
    out.derivative = dsum.sum();
    if (n >= max_terms || !std::isfinite(out.value)) {
        out.rel_error = std::numeric_limits<double>::infinity();
        return out;
    }
    const double ev = (4.0 * kEps * abs_sum + last) / std::fabs(out.value);
    const double ed = out.derivative != 0.0 ? 4.0 * kEps * abs_dsum / std::fabs(out.derivative) : 0.0;
    out.rel_error = std::fmax(ev, ed);
    return out;
}

// Dominant asymptotic branch of M for large x.
bool kummer_asymptotic(double a, double b, double x, ScaledHypergeometric& out)
{
    if (is_nonpositive_integer(a))
        return false;
    const SignedLogGamma ga = log_abs_gamma(a);
    const SignedLogGamma gb = log_abs_gamma(b);
    if (!is_nonpositive_integer(b - a)) {
        const SignedLogGamma gba = log_abs_gamma(b - a);
        const double log_ratio = ga.log_abs - gba.log_abs + (b - 2.0 * a) * std::log(x) - x;
        if (log_ratio > -40.0)
            return false;
    }
    double s = 1.0;
    Neumaier sum, dsum;
    sum.add(1.0);
    bool converged = false;
    for (int n = 0; n < 400; ++n) {
        const double next = s * (b - a + n) * (1.0 - a + n) / ((n + 1) * x);
        if (n > 0 && std::fabs(next) >= std::fabs(s))
            return false;
        s = next;
        sum.add(s);
        dsum.add(-(n + 1) * s / x);
        if (std::fabs(s) <= 1e-17 * std::fabs(sum.sum())) {
            converged = true;
            break;
        }
    }
    if (!converged)
        return false;
    const double sign = static_cast<double>(ga.sign * gb.sign);
    const double S = sum.sum();
    out.log_scale = gb.log_abs - ga.log_abs + x + (a - b) * std::log(x);
    out.value = sign * S;
    out.derivative_x = sign * (S * (1.0 + (a - b) / x) + dsum.sum());
    out.est_rel_error = 8.0 * kEps + std::fabs(s / S);
    return true;
}

// Large-x expansion U ~ x^{-a} sum (a)_n (a-b+1)_n / n! (-x)^{-n}.
bool tricomi_asymptotic(double a, double b, double x, ScaledHypergeometric& out)
{
    const double c = a - b + 1.0;
    double s = 1.0;
    Neumaier sum, dsum;
    sum.add(1.0);
    bool converged = false;
    for (int n = 0; n < 2000; ++n) {
        const double next = -s * (a + n) * (c + n) / ((n + 1) * x);
        if (next == 0.0) {
            converged = true;
            s = 0.0;
            break;
        }
        if (n > 0 && std::fabs(next) >= std::fabs(s))
            return false;
        s = next;
        sum.add(s);
        dsum.add(-(n + 1) * s / x);
        if (std::fabs(s) <= 1e-17 * std::fabs(sum.sum())) {
            converged = true;
            break;
        }
    }
    if (!converged)
        return false;
    const double S = sum.sum();
    out.log_scale = -a * std::log(x);
    out.value = S;
    out.derivative_x = -a * S / x + dsum.sum();
    out.est_rel_error = 8.0 * kEps + std::fabs(s / S);
    return true;
}

struct StepResult {
    double f;
    double fp;
    double abs_terms;  // sum |f terms| + x1 * sum |f' terms|, for error tracking
};

// One Taylor step of x f'' + (b - x) f' - a f = 0 from x0 to x0 + t.
StepResult kummer_ode_step(double a, double b, double x0, double t, double f, double fp)
{
    double e0 = f;
    double e1 = fp * t;
    Neumaier F, Fp;
    F.add(e0);
    F.add(e1);
    Fp.add(fp);
    double absF = std::fabs(e0) + std::fabs(e1);
    double absFp = std::fabs(fp);
    const double denom0 = x0;
    for (int n = 0; n < 20000; ++n) {
        const double e2 = ((n + a) * t * t * e0 - (n + 1) * (n + b - x0) * t * e1)
                          / (denom0 * (n + 1) * (n + 2));
        F.add(e2);
        const double d2 = (n + 2) * e2 / t;
        Fp.add(d2);
        absF += std::fabs(e2);
        absFp += std::fabs(d2);
        e0 = e1;
        e1 = e2;
        if (n >= 4) {
            const double tol = 1e-18;
            const bool small_f = std::fabs(e0) + std::fabs(e1) <= tol * std::fabs(F.sum());
            const bool small_d = (n + 2) * (std::fabs(e0) + std::fabs(e1)) / std::fabs(t)
                                 <= tol * std::fabs(Fp.sum());
            if ((small_f && small_d) || (e0 == 0.0 && e1 == 0.0))
                break;
        }
    }
    StepResult out;
    out.f = F.sum();
    out.fp = Fp.sum();
    out.abs_terms = absF + (x0 + t) * absFp;
    return out;
}

void check_accuracy(const char* what, double a, double b, double x, double err)
{
    if (!(err <= kHypergeometricTolerance)) {
        std::ostringstream os;
        os << what << "(" << a << ", " << b << ", " << x << "): estimated relative error " << err;
        fail(ErrorCode::NoConvergence, os.str());
    }
}

HypergeometricEval unscale(const ScaledHypergeometric& s, const char* what, double a, double b, double x)
{
    if (s.log_scale > kMaxLog) {
        std::ostringstream os;
        os << what << "(" << a << ", " << b << ", " << x << ") exceeds double range";
        fail(ErrorCode::Overflow, os.str());
    }
    const double scale = std::exp(s.log_scale);
    return {s.value * scale, s.derivative_x * scale, s.est_rel_error};
}

}  // namespace

SignedLogGamma log_abs_gamma(double x)
{
    if (std::isnan(x) || is_nonpositive_integer(x))
        fail(ErrorCode::DomainError, "Gamma has a pole at a nonpositive integer");
    if (x > 0.0)
        return {log_gamma_positive(x), 1};
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    const double sp = sin_pi(x);
    return {std::log(kPi / std::fabs(sp)) - log_gamma_positive(1.0 - x), sp < 0.0 ? -1 : 1};
}

double log_gamma(double x)
{
    if (!(x > 0.0))
        fail(ErrorCode::DomainError, "log_gamma requires x > 0");
    if (std::isinf(x))
        return x;
    return log_gamma_positive(x);
}

ScaledHypergeometric kummer_m_scaled(double a, double b, double x)
{
    if (is_nonpositive_integer(b))
        fail(ErrorCode::PoleInB, "kummer_m: b is a nonpositive integer");
    if (!(x >= 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x))
        fail(ErrorCode::DomainError, "kummer_m requires finite a, b and x >= 0");
    if (x == 0.0 || a == 0.0)
        return {1.0, a / b, 0.0, 0.0};
    ScaledHypergeometric out;
    if (x >= 25.0 && kummer_asymptotic(a, b, x, out)) {
        check_accuracy("kummer_m", a, b, x, out.est_rel_error);
        return out;
    }
    if (x > 700.0) {
        std::ostringstream os;
        os << "kummer_m(" << a << ", " << b << ", " << x << "): no convergent regime";
        fail(ErrorCode::NoConvergence, os.str());
    }
    const SeriesResult s = kummer_series(a, b, x);
    check_accuracy("kummer_m", a, b, x, s.rel_error);
    return {s.value, s.derivative, 0.0, s.rel_error};
}

HypergeometricEval kummer_m(double a, double b, double x)
{
    return unscale(kummer_m_scaled(a, b, x), "kummer_m", a, b, x);
}

ScaledHypergeometric tricomi_u_scaled(double a, double b, double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        fail(ErrorCode::DomainError, "tricomi_u requires finite x > 0");
    if (!std::isfinite(a) || !std::isfinite(b))
        fail(ErrorCode::DomainError, "tricomi_u requires finite a, b");
    if (a == 0.0)
        return {1.0, 0.0, 0.0, 0.0};
    ScaledHypergeometric start;
    if (tricomi_asymptotic(a, b, x, start)) {
        check_accuracy("tricomi_u", a, b, x, start.est_rel_error);
        return start;
    }
    double xa = std::fmax(x, 40.0 + 2.0 * (std::fabs(a) + std::fabs(a - b + 1.0)));
    int tries = 0;
    while (!tricomi_asymptotic(a, b, xa, start)) {
        xa *= 1.5;
        if (++tries > 60)
            fail(ErrorCode::NoConvergence, "tricomi_u: asymptotic regime not reached");
    }
    // Integrate the Kummer equation inward; U is the stable direction.
    double f = start.value;
    double fp = start.derivative_x;
    double log_scale = start.log_scale;
    // Absolute error in the current normalisation, propagated with the
    // envelope |f| + x|f'| of the solution.
    double err = start.est_rel_error * (std::fabs(f) + xa * std::fabs(fp));
    double x0 = xa;
    const double q = (std::fabs(a) + std::fabs(b) <= 40.0) ? 0.5 : 0.35;
    while (x0 > x) {
        const double x1 = std::fmax(x, x0 * (1.0 - q));
        const StepResult st = kummer_ode_step(a, b, x0, x1 - x0, f, fp);
        const double env0 = std::fabs(f) + x0 * std::fabs(fp);
        const double env1 = std::fabs(st.f) + x1 * std::fabs(st.fp);
        err = err * (env1 / env0) + 4.0 * kEps * st.abs_terms;
        const double norm = std::fabs(st.f);
        if (!(norm > 0.0) || !std::isfinite(norm))
            fail(ErrorCode::NoConvergence, "tricomi_u: inward integration broke down");
        f = st.f / norm;
        fp = st.fp / norm;
        err /= norm;
        log_scale += std::log(norm);
        x0 = x1;
    }
    const double rel_err = err / std::fabs(f);
    check_accuracy("tricomi_u", a, b, x, rel_err);
    return {f, fp, log_scale, rel_err};
}

HypergeometricEval tricomi_u(double a, double b, double x)
{
    return unscale(tricomi_u_scaled(a, b, x), "tricomi_u", a, b, x);
}

}  // namespace ambistop
