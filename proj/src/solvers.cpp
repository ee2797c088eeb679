#include "ambistop/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "ambistop/error.hpp"
#include "ambistop/roots.hpp"

namespace ambistop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEquilibriumTol = 1e-8;
constexpr int kFloorScanPoints = 64;
constexpr double kFloorScanMin = 1e-6;
constexpr double kKappaStep = 0.1;

std::shared_ptr<const ExcessiveFunction> make_excessive(const ModelParams& model, Reference ref)
{
    return std::make_shared<const ExcessiveFunction>(build_excessive(model, ref));
}

double u_value(const ExcessiveFunction& u, double z)
{
    const ScaledTriple t = u.eval_scaled(z);
    return t.d[0] * std::exp(t.log_scale);
}

double pi_ratio(const ExcessiveFunction& u, const Payoff& payoff, double z)
{
    return u.ratio(payoff.profile(z), z);
}

struct RatioMax {
    double z;
    double pi;
};

// Local maxima of g/U on the grid, polished in log z between grid neighbours.
std::vector<RatioMax> ratio_maxima(const ExcessiveFunction& u, const Payoff& payoff, const std::vector<double>& grid)
{
    const std::size_t n = grid.size();
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i)
        pi[i] = pi_ratio(u, payoff, grid[i]);
    std::vector<RatioMax> out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || pi[i] >= pi[i - 1];
        const bool right_ok = i + 1 == n || pi[i] > pi[i + 1];
        if (!left_ok || !right_ok)
            continue;
        RatioMax best{grid[i], pi[i]};
        if (i > 0 && i + 1 < n) {
            auto neg = [&](double s) { return -pi_ratio(u, payoff, std::exp(s)); };
            std::uintmax_t iters = 200;
            const auto r = boost::math::tools::brent_find_minima(neg, std::log(grid[i - 1]), std::log(grid[i + 1]),
                                                                 std::numeric_limits<double>::digits / 2, iters);
            if (-r.second > best.pi)
                best = {std::exp(r.first), -r.second};
        }
        out.push_back(best);
    }
    std::sort(out.begin(), out.end(), [](const RatioMax& a, const RatioMax& b) { return a.pi > b.pi; });
    return out;
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(a + (b - a) * i / (n - 1));
    return g;
}

StoppingSolution lower_solution(const ModelParams& model, const Payoff& payoff, double z_star,
                                std::shared_ptr<const ExcessiveFunction> u)
{
    StoppingSolution s;
    s.model = model;
    s.payoff = payoff;
    s.regime = Regime::LowerBoundary;
    s.z_star = z_star;
    s.pi_star = pi_ratio(*u, payoff, z_star);
    s.excessive = std::move(u);
    return s;
}

}  // namespace

const char* regime_name(Regime regime)
{
    switch (regime) {
    case Regime::LowerBoundary: return "lower";
    case Regime::UpperBoundary: return "upper";
    case Regime::TwoSided: return "two-sided";
    }
    return "unknown";
}

std::pair<double, double> StoppingSolution::continuation_band() const
{
    switch (regime) {
    case Regime::LowerBoundary: return {-kInf, z_star};
    case Regime::UpperBoundary: return {z_star, kInf};
    case Regime::TwoSided: return {z1, z2};
    }
    return {-kInf, kInf};
}

bool StoppingSolution::stops_at(double z) const
{
    const auto [lo, hi] = continuation_band();
    return z <= lo || z >= hi;
}

double StoppingSolution::switch_point() const
{
    switch (regime) {
    case Regime::LowerBoundary: return excessive->hat_z();
    case Regime::UpperBoundary: return kInf;
    case Regime::TwoSided: return z2;
    }
    return kInf;
}

double integral_boundary(const ModelParams& model) { return solve_zbar(model); }

double exchange_boundary(const ModelParams& model, double strike)
{
    if (!(strike > 0.0) || !std::isfinite(strike))
        fail(ErrorCode::NonPositiveStrike, "exchange strike must be finite and > 0");
    const ExcessiveFunction u = build_excessive(model, Reference::zero());
    auto foc = [&](double z) {
        const ScaledTriple t = u.eval_scaled(z);
        return (t.d[0] - (z - strike) * t.d[1]) / t.d[0];
    };
    const double start = std::max(u.hat_z(), strike);
    const double fstart = foc(start);
    if (!(fstart > 0.0)) {
        std::ostringstream os;
        os << "exchange boundary: first-order condition " << fstart << " at z = " << start << "; expected > 0";
        fail(ErrorCode::BracketFailure, os.str());
    }
    double fhi = 0.0;
    const double hi = detail::expand_until_sign_change(foc, start, fstart, 2.0, 200, fhi, "exchange boundary");
    const double lo = std::max(start, 0.5 * hi);
    return detail::bracketed_root(foc, lo, hi, lo == start ? fstart : foc(lo), fhi, 1e-15, "exchange boundary");
}

ExchangeIntegralCheck exchange_integral_check(const ModelParams& model, double strike, double z_star)
{
    if (!(strike > 0.0))
        fail(ErrorCode::NonPositiveStrike, "exchange strike must be > 0");
    const ExcessiveFunction u = build_excessive(model, Reference::zero());
    const FundamentalPair& minus = u.minus();
    const double zbar = u.hat_z();
    const double s2 = model.sigma * model.sigma;
    // Everything is measured in units of U_0'(z_bar) / S'(z_bar).
    const ScaledTriple at = u.eval_scaled(zbar);
    const double log_unit = at.log_scale + std::log(at.d[1]) - minus.log_scale_density(zbar);
    const double rho = minus.rho();
    auto integrand = [&](double t) {
        const ScaledTriple v = u.eval_scaled(t);
        const double log_m = std::log(2.0 / (s2 * t * t)) - minus.log_scale_density(t);
        const double w = 1.0 + rho * strike - model.r * t;
        return w * v.d[0] * std::exp(v.log_scale + log_m - log_unit);
    };
    double err = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, zbar, z_star, 15, 1e-13, &err);
    ExchangeIntegralCheck out;
    out.boundary_term = strike;
    out.integral = integral;
    out.quadrature_error = err;
    out.relative_residual = std::fabs(strike + integral) / strike;
    return out;
}

StoppingSolution integral_solve(const ModelParams& model)
{
    auto u = make_excessive(model, Reference::zero());
    const double zbar = u->hat_z();
    return lower_solution(model, Payoff::integral(), zbar, std::move(u));
}

StoppingSolution exchange_solve(const ModelParams& model, double strike)
{
    const double z = exchange_boundary(model, strike);
    return lower_solution(model, Payoff::exchange(strike), z, make_excessive(model, Reference::zero()));
}

double floor_regime_indicator(const ModelParams& model)
{
    const FundamentalPair plus(model, DriftSign::PlusKappa);
    const double zbar = solve_zbar(model);
    return (zbar - plus.p(zbar, 0)) / zbar;
}

StoppingSolution floor_solve(const ModelParams& model)
{
    const Payoff payoff = Payoff::floor();
    auto u0 = make_excessive(model, Reference::zero());
    const double zbar = u0->hat_z();
    if (zbar >= u_value(*u0, zbar))
        return lower_solution(model, payoff, zbar, std::move(u0));

    // U_c(c) = 1, so Pi_c is equal at c and hat z_c exactly when U_c(hat z_c) = hat z_c.
    auto gap = [&model](double c) {
        const ExcessiveFunction u = build_excessive(model, Reference::finite(c));
        const double zh = u.hat_z();
        return (u_value(u, zh) - zh) / zh;
    };
    const std::vector<double> scan = log_grid(kFloorScanMin, zbar, kFloorScanPoints);
    std::vector<double> g(scan.size());
    std::size_t hit = scan.size();
    for (std::size_t i = 0; i < scan.size(); ++i) {
        g[i] = gap(scan[i]);
        if (i > 0 && (g[i] < 0.0) != (g[i - 1] < 0.0)) {
            hit = i;
            break;
        }
        if (g[i] == 0.0) {
            hit = i;
            break;
        }
    }
    if (hit == scan.size()) {
        std::ostringstream os;
        os << "floor reference point: U_c(hat z_c) - hat z_c has no sign change on [" << scan.front() << ", "
           << scan.back() << "]; values at ends " << g.front() << ", " << g.back();
        fail(ErrorCode::BracketFailure, os.str());
    }
    const double c_star =
        g[hit] == 0.0 ? scan[hit]
                      : detail::bracketed_root(gap, scan[hit - 1], scan[hit], g[hit - 1], g[hit], 1e-15, "floor c*");
    if (c_star > 1.0) {
        std::ostringstream os;
        os << "floor reference point c* = " << c_star << " > 1; the two-sided value formula does not apply";
        fail(ErrorCode::UnexpectedRegime, os.str());
    }

    StoppingSolution s;
    s.model = model;
    s.payoff = payoff;
    s.regime = Regime::TwoSided;
    s.excessive = make_excessive(model, Reference::finite(c_star));
    s.c_star = c_star;
    s.z1 = c_star;
    s.z2 = s.excessive->hat_z();
    const double pi1 = pi_ratio(*s.excessive, payoff, s.z1);
    const double pi2 = pi_ratio(*s.excessive, payoff, s.z2);
    if (std::fabs(pi1 - pi2) > kEquilibriumTol * std::fmax(pi1, pi2)) {
        std::ostringstream os;
        os << "floor ratios differ at the two boundaries: " << pi1 << " vs " << pi2;
        fail(ErrorCode::NotAnEquilibrium, os.str());
    }
    s.pi_star = pi1;
    return s;
}

StoppingSolution lower_boundary_solve(const ModelParams& model, const Payoff& payoff)
{
    auto u = make_excessive(model, Reference::zero());
    const std::vector<double> grid = log_grid(1e-4 / model.r, 1e3 / model.r, 2001);
    const std::vector<RatioMax> m = ratio_maxima(*u, payoff, grid);
    if (m.empty() || !(m.front().pi > 0.0))
        fail(ErrorCode::NoConvergence, "payoff ratio g / U_0 has no positive maximum on the search grid");
    return lower_solution(model, payoff, m.front().z, std::move(u));
}

StoppingSolution upper_boundary_solve(const ModelParams& model, const Payoff& payoff)
{
    if (!model.upper_boundary_ok) {
        std::ostringstream os;
        os << "upper-boundary regime needs 2 mu > 2 kappa sigma - sigma^2; got mu = " << model.mu
           << ", kappa = " << model.kappa << ", sigma = " << model.sigma;
        fail(ErrorCode::UpperBoundaryPrecondition, os.str());
    }
    auto u = make_excessive(model, Reference::infinity());
    const std::vector<double> grid = log_grid(1e-4 / model.r, 1e3 / model.r, 2001);
    const std::vector<RatioMax> m = ratio_maxima(*u, payoff, grid);
    if (m.empty() || !(m.front().pi > 0.0))
        fail(ErrorCode::NoConvergence, "payoff ratio g / Q has no positive maximum on the search grid");
    StoppingSolution s;
    s.model = model;
    s.payoff = payoff;
    s.regime = Regime::UpperBoundary;
    s.z_star = m.front().z;
    s.pi_star = m.front().pi;
    s.excessive = std::move(u);
    return s;
}

StoppingSolution solve(const ModelParams& model, const Payoff& payoff)
{
    switch (payoff.kind()) {
    case PayoffKind::Integral: return integral_solve(model);
    case PayoffKind::Exchange: return exchange_solve(model, payoff.strike());
    case PayoffKind::Floor: return floor_solve(model);
    case PayoffKind::Custom: break;
    }
    fail(ErrorCode::DomainError, "custom payoffs need lower_boundary_solve or upper_boundary_solve");
}

double critical_kappa_floor(double mu, double sigma, double r, double kappa_max)
{
    auto indicator = [&](double k) { return floor_regime_indicator(make_model(mu, sigma, r, k)); };
    double prev_k = 0.0, prev_v = 0.0;
    bool have_prev = false;
    const int steps = static_cast<int>(std::ceil(kappa_max / kKappaStep));
    for (int i = 0; i <= steps; ++i) {
        const double k = std::min(kappa_max, i * kKappaStep);
        double v = 0.0;
        try {
            v = indicator(k);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DegenerateRho)
                continue;
            throw;
        }
        if (v == 0.0)
            return k;
        if (have_prev && (v < 0.0) != (prev_v < 0.0))
            return detail::bracketed_root(indicator, prev_k, k, prev_v, v, 1e-9, "critical kappa");
        prev_k = k;
        prev_v = v;
        have_prev = true;
    }
    std::ostringstream os;
    os << "floor regime indicator z_bar - P(z_bar) keeps its sign on kappa in [0, " << kappa_max << "]";
    fail(ErrorCode::NoSignChange, os.str());
}

double value(const StoppingSolution& solution, double x, double y)
{
    if (!(x > 0.0))
        fail(ErrorCode::DomainError, "value requires x > 0");
    if (!(y >= 0.0))
        fail(ErrorCode::DomainError, "value requires y >= 0");
    const double z = y / x;
    if (solution.stops_at(z))
        return solution.payoff(x, y);
    // Continuation at z = 0 only happens below a lower boundary, where U_0(0+) = P(0+) = 1.
    if (z == 0.0)
        return x * solution.pi_star;
    const ScaledTriple t = solution.excessive->eval_scaled(z);
    return x * solution.pi_star * t.d[0] * std::exp(t.log_scale);
}

double worst_case_generator(const StoppingSolution& solution, double x, double y)
{
    if (!(x > 0.0))
        fail(ErrorCode::DomainError, "generator requires x > 0");
    const double k = solution.model.kappa;
    if (k == 0.0)
        return 0.0;
    return y / x <= solution.switch_point() ? k : -k;
}

std::vector<double> stopping_set_test(const ModelParams& model, const Payoff& payoff, Reference ref,
                                      const std::vector<double>& z_grid)
{
    if (z_grid.empty())
        fail(ErrorCode::EmptyGrid, "stopping_set_test needs a non-empty grid");
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        if (!(z_grid[i] > 0.0) || !std::isfinite(z_grid[i]) || (i > 0 && !(z_grid[i] > z_grid[i - 1])))
            fail(ErrorCode::BadGrid, "stopping_set_test needs a strictly increasing positive grid");
    }
    const ExcessiveFunction u = build_excessive(model, ref);
    const std::vector<RatioMax> m = ratio_maxima(u, payoff, z_grid);
    std::vector<double> out;
    if (m.empty())
        return out;
    const double top = m.front().pi;
    for (const RatioMax& r : m) {
        if (r.pi >= top - kEquilibriumTol * std::fabs(top))
            out.push_back(r.z);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ambistop
