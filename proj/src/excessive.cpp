#include "ambistop/excessive.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ambistop/error.hpp"
#include "ambistop/roots.hpp"

namespace ambistop {

namespace {

constexpr double kNodeRatio = 1.5;
constexpr int kCachedNodes = 48;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxLog = 709.0;

void require_positive(double z, const char* what)
{
    if (!(z > 0.0) || !std::isfinite(z)) {
        std::ostringstream os;
        os << what << " requires finite z > 0, got " << z;
        fail(ErrorCode::DomainError, os.str());
    }
}

}  // namespace

RegimeContinuation::RegimeContinuation(double sigma, RegimeCoefficients coef, double z0, double h0, double hp0)
    : sigma_(sigma), coef_(coef)
{
    const double norm = std::fabs(h0);
    nodes_.reserve(kCachedNodes);
    nodes_.push_back({z0, h0 / norm, hp0 / norm, std::log(norm)});
    for (int k = 1; k < kCachedNodes; ++k)
        nodes_.push_back(advance(nodes_.back(), nodes_.back().z * kNodeRatio));
}

double RegimeContinuation::second(double z, double f, double fp) const
{
    return 2.0 * (coef_.rho * f - (1.0 - coef_.delta * z) * fp) / (sigma_ * sigma_ * z * z);
}

// Taylor step of 1/2 s^2 z^2 f'' + (1 - delta z) f' - rho f = 0 about from.z;
// requires 0 <= z - from.z <= from.z / 2.
RegimeContinuation::Node RegimeContinuation::advance(const Node& from, double z) const
{
    const double z0 = from.z;
    const double t = z - z0;
    if (t == 0.0)
        return from;
    const double s2 = sigma_ * sigma_;
    const double lead = 0.5 * s2 * z0 * z0;
    double e0 = from.f;
    double e1 = from.fp * t;
    double F = e0 + e1;
    double Fp = from.fp;
    for (int n = 0; n < 4000; ++n) {
        const double b1 = (s2 * z0 * n * (n + 1) + (1.0 - coef_.delta * z0) * (n + 1)) * t;
        const double b0 = (0.5 * s2 * n * (n - 1) - coef_.delta * n - coef_.rho) * t * t;
        const double e2 = -(b1 * e1 + b0 * e0) / (lead * (n + 1) * (n + 2));
        F += e2;
        Fp += (n + 2) * e2 / t;
        e0 = e1;
        e1 = e2;
        if (n >= 4 && std::fabs(e0) + std::fabs(e1) <= 1e-18 * std::fabs(F)
            && (n + 2) * (std::fabs(e0) + std::fabs(e1)) <= 1e-18 * std::fabs(Fp * t))
            break;
    }
    const double norm = std::fabs(F);
    return {z, F / norm, Fp / norm, from.log_scale + std::log(norm)};
}

ScaledTriple RegimeContinuation::eval(double z) const
{
    const double z0 = nodes_.front().z;
    int k = static_cast<int>(std::floor(std::log(z / z0) / std::log(kNodeRatio)));
    k = std::max(0, std::min(k, static_cast<int>(nodes_.size()) - 1));
    // Guard against rounding in the node index.
    while (k > 0 && nodes_[k].z > z)
        --k;
    Node node = nodes_[k];
    while (z > node.z * kNodeRatio)
        node = advance(node, node.z * kNodeRatio);
    const Node at = advance(node, z);
    ScaledTriple out;
    out.log_scale = at.log_scale;
    out.d[0] = at.f;
    out.d[1] = at.fp;
    out.d[2] = second(z, at.f, at.fp);
    return out;
}

double solve_zbar(const ModelParams& model)
{
    const FundamentalPair pair(model, DriftSign::PlusKappa);
    auto foc = [&pair](double z) {
        const ScaledTriple p = pair.p_scaled(z);
        return (p.d[0] - z * p.d[1]) / p.d[0];
    };
    const double lo = 1.0 / model.r;
    const double flo = foc(lo);
    if (!(flo > 0.0)) {
        std::ostringstream os;
        os << "P - zP' = " << flo << " at z = 1/r; expected > 0";
        fail(ErrorCode::BracketFailure, os.str());
    }
    double fhi = 0.0;
    const double hi = detail::expand_until_sign_change(foc, lo, flo, 2.0, 200, fhi, "integral boundary");
    const double below = 0.5 * hi;
    return detail::bracketed_root(foc, below, hi, foc(below), fhi, 1e-15, "integral boundary");
}

ExcessiveFunction::ExcessiveFunction(const ModelParams& model, Reference ref)
    : model_(model), ref_(ref), plus_(model, DriftSign::PlusKappa), minus_(model, DriftSign::MinusKappa)
{
}

ScaledTriple ExcessiveFunction::lower_scaled(double z) const
{
    switch (ref_.kind) {
    case ReferenceKind::Zero: return plus_.p_scaled(z);
    case ReferenceKind::Infinity: return plus_.q_scaled(z);
    case ReferenceKind::Finite: break;
    }
    const ScaledTriple q = plus_.q_scaled(z);
    const ScaledTriple p = plus_.p_scaled(z);
    const double la = log_alpha_ + q.log_scale;
    const double lb = log_beta_ + p.log_scale;
    const double top = std::fmax(la, lb);
    const double wa = std::exp(la - top);
    const double wb = std::exp(lb - top);
    ScaledTriple out;
    out.log_scale = top;
    for (int k = 0; k < 3; ++k)
        out.d[k] = wa * q.d[k] + wb * p.d[k];
    return out;
}

ScaledTriple ExcessiveFunction::eval_scaled(double z) const
{
    require_positive(z, "U_c");
    if (ref_.kind == ReferenceKind::Infinity || z <= hat_z_)
        return lower_scaled(z);
    return upper_.eval(z);
}

double ExcessiveFunction::eval(double z, int order) const
{
    if (order < 0 || order > 2)
        fail(ErrorCode::DomainError, "derivative order must be 0, 1 or 2");
    const ScaledTriple t = eval_scaled(z);
    const double v = t.d[order];
    if (v != 0.0 && t.log_scale + std::log(std::fabs(v)) > kMaxLog) {
        std::ostringstream os;
        os << "U_c at z = " << z << " exceeds double range";
        fail(ErrorCode::Overflow, os.str());
    }
    return v * std::exp(t.log_scale);
}

double ExcessiveFunction::delta(double z) const
{
    const ScaledTriple t = eval_scaled(z);
    return (t.d[0] - t.d[1] * z) * std::exp(t.log_scale);
}

double ExcessiveFunction::ratio(double g, double z) const
{
    const ScaledTriple t = eval_scaled(z);
    return g / t.d[0] * std::exp(-t.log_scale);
}

ExcessiveFunction build_excessive(const ModelParams& model, Reference ref)
{
    ExcessiveFunction f(model, ref);
    const FundamentalPair& plus = f.plus_;

    if (ref.kind == ReferenceKind::Infinity) {
        f.hat_z_ = kNaN;
        f.c1_ = kNaN;
        f.c2_ = kNaN;
        f.log_alpha_ = 0.0;
        f.log_beta_ = -INFINITY;
        return f;
    }

    if (ref.kind == ReferenceKind::Zero) {
        f.hat_z_ = solve_zbar(model);
        f.log_alpha_ = -INFINITY;
        f.log_beta_ = 0.0;
    } else {
        const double c = ref.c;
        if (!(c > 0.0) || !std::isfinite(c))
            fail(ErrorCode::DomainError, "reference point c must be finite and > 0");
        const ScaledTriple pc = plus.p_scaled(c);
        const ScaledTriple qc = plus.q_scaled(c);
        const double log_bs = plus.log_abs_wronskian_b() + plus.log_scale_density(c);
        f.log_alpha_ = pc.log_scale + std::log(pc.d[1]) - log_bs;
        f.log_beta_ = qc.log_scale + std::log(-qc.d[1]) - log_bs;

        // Switch condition U'(z) z - U(z) = 0, as a fraction of U.
        auto switch_fn = [&f](double z) {
            const ScaledTriple u = f.lower_scaled(z);
            return (u.d[1] * z - u.d[0]) / u.d[0];
        };
        f.hat_z_ = INFINITY;
        double fhi = 0.0;
        const double hi = detail::expand_until_sign_change(switch_fn, c, -1.0, 2.0, 400, fhi, "switch point");
        const double lo = hi / 2.0;
        f.hat_z_ = detail::bracketed_root(switch_fn, lo, hi, lo == c ? -1.0 : switch_fn(lo), fhi, 1e-15,
                                          "switch point");
    }

    const double zh = f.hat_z_;
    const ScaledTriple at = f.lower_scaled(zh);
    const double h0 = at.d[0] * std::exp(at.log_scale);
    const double hp0 = at.d[1] * std::exp(at.log_scale);
    f.upper_ = RegimeContinuation(model.sigma, regime_coefficients(model, DriftSign::MinusKappa), zh, h0, hp0);

    // Coefficients of the -kappa basis, where that basis is usable.
    f.c1_ = kNaN;
    f.c2_ = kNaN;
    const FundamentalPair& minus = f.minus_;
    if (minus.wronskian_sign() != 0) {
        try {
            const ScaledTriple pm = minus.p_scaled(zh);
            const ScaledTriple qm = minus.q_scaled(zh);
            const double lbs = minus.log_abs_wronskian_b() + minus.log_scale_density(zh);
            const double sgn = minus.wronskian_sign();
            const double c1 = hp0 * sgn * (qm.d[0] - qm.d[1] * zh) * std::exp(qm.log_scale - lbs);
            const double c2 = hp0 * sgn * (pm.d[1] * zh - pm.d[0]) * std::exp(pm.log_scale - lbs);
            if (std::isfinite(c1) && std::isfinite(c2)) {
                f.c1_ = c1;
                f.c2_ = c2;
            }
        } catch (const Error&) {
            // Leave NaN: the continuation is the evaluator in any case.
        }
    }
    return f;
}

double solve_hat_z(const ModelParams& model, double c)
{
    if (!(c > 0.0))
        fail(ErrorCode::DomainError, "solve_hat_z requires c > 0");
    return build_excessive(model, Reference::finite(c)).hat_z();
}

double eval_u(const ExcessiveFunction& f, double z, int order)
{
    return f.eval(z, order);
}

}  // namespace ambistop
