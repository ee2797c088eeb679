#include "ambistop/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "ambistop/error.hpp"
#include "ambistop/oracle_fd.hpp"
#include "ambistop/simulation.hpp"
#include "ambistop/solvers.hpp"
#include "ambistop/special_functions.hpp"
#include "hp_oracle.hpp"

namespace ambistop {

namespace {

using Clock = std::chrono::steady_clock;

std::string str(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

class Log {
public:
    explicit Log(std::ostream& os) : os_(os) {}
    void line(const std::string& s) { os_ << "    " << s << std::endl; }
    std::string summary;

private:
    std::ostream& os_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const char* ok(bool b) { return b ? "ok" : "violated"; }

// Valid models drawn from a fixed seed; same ranges as the unit tests.
std::vector<ModelParams> random_models(std::uint64_t seed, int n)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> um(-0.03, 0.03), us(0.1, 0.6), ur(0.03, 0.1), uk(0.0, 1.5);
    std::vector<ModelParams> out;
    while (static_cast<int>(out.size()) < n) {
        const double mu = um(rng), sigma = us(rng), r = ur(rng), kappa = uk(rng);
        try {
            out.push_back(make_model(mu, sigma, r, kappa));
        } catch (const Error&) {
        }
    }
    return out;
}

std::string model_str(const ModelParams& m)
{
    return str("(mu=%.4g, sigma=%.4g, r=%.4g, kappa=%.4g)", m.mu, m.sigma, m.r, m.kappa);
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
    return g;
}

// Criterion 1

bool critical_kappa(Log& log)
{
    const double k = critical_kappa_floor(0.0, 0.5, 0.05);
    const double below = floor_regime_indicator(make_model(0.0, 0.5, 0.05, k - 1e-3));
    const double above = floor_regime_indicator(make_model(0.0, 0.5, 0.05, k + 1e-3));
    const bool near = std::fabs(k - 1.59795) <= 1e-3;
    const bool flips = below > 0.0 && above < 0.0;
    log.line(str("kappa_hat = %.9f, target 1.59795 +- 1e-3: %s", k, ok(near)));
    log.line(str("regime indicator at kappa_hat -+ 1e-3: %.3e, %.3e: %s", below, above, ok(flips)));
    log.summary = str("kappa_hat=%.6f", k);
    return near && flips;
}

// Criterion 2

bool floor_single(Log& log)
{
    const StoppingSolution s = floor_solve(make_model(0.0, 0.5, 0.05, 0.5));
    const bool lower = s.regime == Regime::LowerBoundary;
    const bool near = std::fabs(s.z_star - 27.9912) <= 1e-2;
    log.line(str("regime %s: %s", regime_name(s.regime), ok(lower)));
    log.line(str("z_bar = %.6f, target 27.9912 +- 1e-2: %s", s.z_star, ok(near)));
    log.summary = str("z_bar=%.5f", s.z_star);
    return lower && near;
}

// Criterion 3

bool floor_two(Log& log)
{
    const StoppingSolution s = floor_solve(make_model(0.0, 0.5, 0.05, 1.75));
    const bool two = s.regime == Regime::TwoSided;
    const bool n1 = std::fabs(s.z1 - 0.0854) <= 1e-2;
    const bool n2 = std::fabs(s.z2 - 22.6858) <= 1e-2;
    log.line(str("regime %s: %s", regime_name(s.regime), ok(two)));
    log.line(str("z1 = %.6f, target 0.0854 +- 1e-2: %s", s.z1, ok(n1)));
    log.line(str("z2 = %.6f, target 22.6858 +- 1e-2: %s", s.z2, ok(n2)));
    log.summary = str("z1=%.5f z2=%.5f", s.z1, s.z2);
    return two && n1 && n2;
}

// Criterion 4: first-order condition residual from a 100-digit evaluation of P.

bool integral_property(Log& log)
{
    double worst = 0.0, min_margin = INFINITY;
    bool all = true;
    for (const ModelParams& m : random_models(4001, 50)) {
        const double z = integral_boundary(m);
        const RegimeCoefficients c = regime_coefficients(m, DriftSign::PlusKappa);
        const hp::Triple p = hp::fundamental_p(c.delta, c.rho, m.sigma, z);
        const double res = static_cast<double>(abs(p.v - z * p.d1) / p.v);
        const bool good = z > 1.0 / m.r && res < 1e-8;
        if (!good)
            log.line(str("%s: z_bar=%.6g 1/r=%.6g residual=%.3e violated", model_str(m).c_str(), z, 1.0 / m.r, res));
        all = all && good;
        worst = std::fmax(worst, res);
        min_margin = std::fmin(min_margin, z * m.r - 1.0);
    }
    log.line(str("50 models: min (z_bar r - 1) = %.4g, max |P - zP'| / P = %.3e", min_margin, worst));
    log.summary = str("max residual %.2e", worst);
    return all;
}

// Criterion 5

bool sweep_shapes(Log& log)
{
    const std::vector<double> sigmas = {0.05, 0.075, 0.10};
    const int steps = 50;
    std::vector<std::vector<double>> zb(sigmas.size(), std::vector<double>(steps + 1));
    for (std::size_t j = 0; j < sigmas.size(); ++j)
        for (int i = 0; i <= steps; ++i)
            zb[j][i] = integral_boundary(make_model(0.02, sigmas[j], 0.05, static_cast<double>(i) / steps));
    bool dec = true, inc = true;
    double min_dec = INFINITY, min_inc = INFINITY;
    for (std::size_t j = 0; j < sigmas.size(); ++j) {
        for (int i = 1; i <= steps; ++i) {
            dec = dec && zb[j][i] < zb[j][i - 1];
            min_dec = std::fmin(min_dec, zb[j][i - 1] - zb[j][i]);
            if (j > 0) {
                inc = inc && zb[j][i] > zb[j - 1][i];
                min_inc = std::fmin(min_inc, zb[j][i] - zb[j - 1][i]);
            }
        }
    }
    log.line(str("integral z_bar on kappa 0:1:50, sigma {0.05, 0.075, 0.10}: decreasing in kappa %s (min step %.3g), "
                 "increasing in sigma %s (min gap %.3g)",
                 ok(dec), min_dec, ok(inc), min_inc));
    std::vector<double> ze(steps + 1);
    for (int i = 0; i <= steps; ++i)
        ze[i] = exchange_boundary(make_model(0.02, 0.1, 0.05, static_cast<double>(i) / steps), 0.5);
    bool edec = true;
    double min_edec = INFINITY;
    for (int i = 1; i <= steps; ++i) {
        edec = edec && ze[i] < ze[i - 1];
        min_edec = std::fmin(min_edec, ze[i - 1] - ze[i]);
    }
    log.line(str("exchange z* (K = 0.5, sigma = 0.1) on kappa 0:1:50: decreasing %s (min step %.3g), %.4f -> %.4f",
                 ok(edec), min_edec, ze.front(), ze.back()));
    log.summary = str("%d boundaries", static_cast<int>(sigmas.size() + 1) * (steps + 1));
    return dec && inc && edec;
}

// Criterion 6

bool exchange_limit(Log& log)
{
    double worst = 0.0;
    for (const ModelParams& m : random_models(6001, 10)) {
        const double zb = integral_boundary(m);
        const double ze = exchange_boundary(m, 1e-10);
        const double rel = std::fabs(ze - zb) / zb;
        worst = std::fmax(worst, rel);
        log.line(str("%s: z_bar=%.10g z*(1e-10)=%.10g rel %.2e %s", model_str(m).c_str(), zb, ze, rel,
                     ok(rel < 1e-6)));
    }
    log.summary = str("max rel %.2e", worst);
    return worst < 1e-6;
}

// Criterion 7

bool oracle_equivalence(Log& log)
{
    struct Case {
        const char* name;
        ModelParams m;
        Payoff p;
    };
    const std::vector<Case> cases = {
        {"integral", make_model(0.0, 0.5, 0.05, 0.5), Payoff::integral()},
        {"exchange K=0.5", make_model(0.02, 0.1, 0.05, 0.5), Payoff::exchange(0.5)},
        {"floor kappa=0.5", make_model(0.0, 0.5, 0.05, 0.5), Payoff::floor()},
        {"floor kappa=1.75", make_model(0.0, 0.5, 0.05, 1.75), Payoff::floor()},
    };
    bool all = true;
    double worst = 0.0;
    for (const Case& c : cases) {
        const StoppingSolution s = solve(c.m, c.p);
        const double e1 = compare(s, solve_obstacle(c.m, c.p, default_grid(c.m, 4000))).max_rel_error;
        const double e2 = compare(s, solve_obstacle(c.m, c.p, default_grid(c.m, 8000))).max_rel_error;
        const bool good = e1 < 1e-3 && e2 < e1;
        log.line(str("%s %s: max rel error N=4000 %.3e, N=8000 %.3e: %s", c.name, model_str(c.m).c_str(), e1, e2,
                     ok(good)));
        all = all && good;
        worst = std::fmax(worst, e1);
    }
    log.summary = str("max rel error %.2e at N=4000", worst);
    return all;
}

// Criterion 8

bool martingales(Log& log)
{
    const ModelParams m = make_model(0.0, 0.5, 0.05, 0.5);
    const std::vector<double> t = {0.25, 0.5, 1.0, 2.0};
    SimConfig cfg;
    cfg.n_paths = 200000;
    cfg.dt = 1e-3;
    cfg.t_max = 2.0;
    struct Run {
        ModelParams m;
        Reference ref;
        Generator gen;
        double z0;
    };
    const ModelParams m0 = make_model(0.0, 0.5, 0.05, 0.0);
    const std::vector<Run> runs = {
        {m, Reference::zero(), Generator::worst_case(), 2.0},
        {m, Reference::zero(), Generator::plus_kappa(), 2.0},
        {m, Reference::zero(), Generator::minus_kappa(), 2.0},
        {m, Reference::finite(10.0), Generator::worst_case(), 20.0},
        {m, Reference::finite(10.0), Generator::plus_kappa(), 20.0},
        {m, Reference::finite(10.0), Generator::minus_kappa(), 20.0},
        {m, Reference::infinity(), Generator::plus_kappa(), 40.0},
        {m, Reference::infinity(), Generator::minus_kappa(), 40.0},
        {m0, Reference::zero(), Generator::worst_case(), 2.0},
    };
    bool all = true;
    int n = 0;
    for (const Run& r : runs) {
        const MartingaleReport rep = martingale_check(r.m, r.ref, r.gen, cfg, 1.0, r.z0, t);
        std::string zs;
        for (const CheckpointStat& c : rep.checkpoints)
            zs += str(" %+.2f", c.z_score);
        const char* ref = r.ref.kind == ReferenceKind::Zero ? "0" : (r.ref.kind == ReferenceKind::Finite ? "10" : "inf");
        log.line(str("kappa=%g c=%s %s z0=%g %s: M0=%.6g z-scores%s: %s", r.m.kappa, ref,
                     generator_name(r.gen.kind), r.z0, rep.matching ? "flat" : "one-sided", rep.m0, zs.c_str(),
                     ok(rep.passed)));
        all = all && rep.passed;
        ++n;
    }
    log.summary = str("%d profiles, n=200000, dt=1e-3", n);
    return all;
}

// Criterion 9

NashReport nash_case(Log& log, const char* name, const ModelParams& m, const StoppingSolution& s, double dt,
                     double t_max, double y0)
{
    SimConfig cfg;
    cfg.n_paths = 200000;
    cfg.dt = dt;
    cfg.t_max = t_max;
    const NashReport r = nash_check(m, s, cfg, 1.0, y0);
    if (r.skipped) {
        log.line(str("%s: skipped (%s)", name, r.skip_reason.c_str()));
        return r;
    }
    log.line(str("%s %s start (1, %g), dt=%g t_max=%g: V=%.6f equilibrium %.6f (se %.2e), stopped %llu", name,
                 model_str(m).c_str(), y0, dt, t_max, r.analytic_value, r.equilibrium.mean, r.equilibrium.std_error,
                 static_cast<unsigned long long>(r.equilibrium.n_stopped)));
    for (const NashComparison& c : r.comparisons) {
        const double z = c.std_error > 0.0 ? (c.estimate - c.reference) / c.std_error : 0.0;
        log.line(str("  %-22s %.6f vs %.6f, (est - ref) / se = %+.2f: %s", c.name.c_str(), c.estimate, c.reference,
                     z, ok(c.passed)));
    }
    return r;
}

bool nash(Log& log)
{
    bool all = true;
    {
        const ModelParams m = make_model(0.0, 0.5, 0.05, 1.75);
        all = nash_case(log, "floor two-sided", m, floor_solve(m), 2.5e-4, 5.0, 1.0).passed && all;
    }
    {
        const ModelParams m = make_model(0.0, 0.5, 0.05, 0.5);
        const StoppingSolution s = integral_solve(m);
        const NashReport r = nash_case(log, "integral", m, s, 1e-3, 20.0, 1.0);
        all = r.passed && all;
        // For a lower boundary the shrunk band stops at 0.9 z_bar.
        const auto it = std::find_if(r.comparisons.begin(), r.comparisons.end(),
                                     [](const NashComparison& c) { return c.name == "band_shrunk_10pct"; });
        const bool strict = it != r.comparisons.end() && it->estimate - it->reference < -3.0 * it->std_error;
        if (it != r.comparisons.end())
            log.line(str("integral premature stop at 0.9 z_bar = %.4f: %.6f vs %.6f, diff / se = %+.2f: %s",
                         0.9 * s.z_star, it->estimate, it->reference, (it->estimate - it->reference) / it->std_error,
                         strict ? "strictly smaller" : "violated"));
        all = all && strict;
    }
    {
        const ModelParams m = make_model(0.1, 0.2, 0.15, 0.1);
        const Payoff put = Payoff::custom([](double z) { return std::fmax(20.0 - z, 0.0); }, "put");
        all = nash_case(log, "put upper-boundary", m, upper_boundary_solve(m, put), 1e-4, 2.0, 16.0).passed && all;
    }
    log.summary = "floor, integral with premature stop, upper put; n=200000";
    return all;
}

// Criterion 10

struct Derivs {
    double v, d1, d2;
};

// w^psi F(w) with w = 2 / (sigma^2 z); z-derivatives from the contiguous
// relations of F, independent of the ODE.
Derivs chain(double psi, double z, double sigma, double f, double f1, double f2)
{
    const double w = 2.0 / (sigma * sigma * z);
    const double g0 = std::pow(w, psi) * f;
    const double g1 = psi * std::pow(w, psi - 1) * f + std::pow(w, psi) * f1;
    const double g2 =
        psi * (psi - 1) * std::pow(w, psi - 2) * f + 2 * psi * std::pow(w, psi - 1) * f1 + std::pow(w, psi) * f2;
    const double dw = -w / z, d2w = 2 * w / (z * z);
    return {g0, g1 * dw, g2 * dw * dw + g1 * d2w};
}

Derivs contiguous_p(const FundamentalPair& pr, double z)
{
    const double a = pr.roots().psi, b = 1 + a - pr.roots().phi;
    const double w = 2.0 / (pr.model().sigma * pr.model().sigma * z);
    return chain(a, z, pr.model().sigma, tricomi_u(a, b, w).value, -a * tricomi_u(a + 1, b + 1, w).value,
                 a * (a + 1) * tricomi_u(a + 2, b + 2, w).value);
}

Derivs contiguous_q(const FundamentalPair& pr, double z)
{
    const double a = pr.roots().psi, b = 1 + a - pr.roots().phi;
    const double w = 2.0 / (pr.model().sigma * pr.model().sigma * z);
    return chain(a, z, pr.model().sigma, kummer_m(a, b, w).value, a / b * kummer_m(a + 1, b + 1, w).value,
                 a * (a + 1) / (b * (b + 1)) * kummer_m(a + 2, b + 2, w).value);
}

double ode_residual(const FundamentalPair& pr, double z, double v, double d1, double d2)
{
    const double s2 = pr.model().sigma * pr.model().sigma;
    return std::fabs(0.5 * s2 * z * z * d2 + (1 - pr.delta() * z) * d1 - pr.rho() * v) / std::fabs(v);
}

// Second derivative of U_c from the basis functions of the branch containing z;
// NaN where the upper basis is degenerate.
double basis_second(const ExcessiveFunction& u, double z)
{
    if (std::isnan(u.hat_z()) || z < u.hat_z()) {
        const double ea = std::exp(u.log_alpha()), eb = std::exp(u.log_beta());
        const double q = ea > 0.0 ? ea * contiguous_q(u.plus(), z).d2 : 0.0;
        const double p = eb > 0.0 ? eb * contiguous_p(u.plus(), z).d2 : 0.0;
        return q + p;
    }
    if (!std::isfinite(u.c1()))
        return NAN;
    return u.c1() * contiguous_p(u.minus(), z).d2 + u.c2() * contiguous_q(u.minus(), z).d2;
}

bool analytic_structure(Log& log)
{
    double ode = 0.0, wr = 0.0, paste = 0.0;
    int convex_bad = 0, convex_points = 0, degenerate = 0;
    for (const ModelParams& m : random_models(10001, 20)) {
        // Unscaled values stay finite while 2 / (sigma^2 z) <= 40.
        const double z_lo = 2.0 / (m.sigma * m.sigma * 40.0);
        const std::vector<double> grid = log_grid(z_lo, 200.0, 41);
        const FundamentalPair plus(m, DriftSign::PlusKappa);
        for (double z : grid) {
            const Derivs p = contiguous_p(plus, z), q = contiguous_q(plus, z);
            ode = std::fmax(ode, ode_residual(plus, z, plus.p(z, 0), plus.p(z, 1), p.d2));
            ode = std::fmax(ode, ode_residual(plus, z, plus.q(z, 0), plus.q(z, 1), q.d2));
        }

        for (DriftSign sign : {DriftSign::PlusKappa, DriftSign::MinusKappa}) {
            const FundamentalPair pr(m, sign);
            if (!(pr.wronskian_b() != 0.0) || !std::isfinite(pr.log_abs_wronskian_b()))
                continue;
            std::vector<double> w;
            for (double z : log_grid(1e-2, 1e3, 41)) {
                const ScaledTriple p = pr.p_scaled(z), q = pr.q_scaled(z);
                const double lg = p.log_scale + q.log_scale - pr.log_scale_density(z) - pr.log_abs_wronskian_b();
                w.push_back((p.d[1] * q.d[0] - q.d[1] * p.d[0]) * std::exp(lg));
            }
            const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
            wr = std::fmax(wr, (*hi - *lo) / std::fabs(w[w.size() / 2]));
        }

        const std::vector<Reference> refs = {Reference::zero(), Reference::finite(2.0 * z_lo),
                                             Reference::finite(0.5 / m.r), Reference::infinity()};
        for (const Reference& ref : refs) {
            const ExcessiveFunction u = build_excessive(m, ref);
            for (double z : grid) {
                if (!std::isnan(u.hat_z()) && std::fabs(z / u.hat_z() - 1.0) < 1e-6)
                    continue;
                const double d2 = basis_second(u, z);
                if (std::isnan(d2)) {
                    ++degenerate;
                    continue;
                }
                const bool lower = std::isnan(u.hat_z()) || z < u.hat_z();
                const FundamentalPair& pr = lower ? u.plus() : u.minus();
                ode = std::fmax(ode, ode_residual(pr, z, eval_u(u, z, 0), eval_u(u, z, 1), d2));
            }
            if (!std::isnan(u.hat_z())) {
                const double h = u.hat_z();
                for (int k = 0; k < 3; ++k) {
                    const double a = eval_u(u, h * (1 - 1e-13), k), b = eval_u(u, h * (1 + 1e-13), k);
                    paste = std::fmax(paste, std::fabs(a - b) / std::fabs(a));
                }
                const double a = basis_second(u, h * (1 - 1e-13)), b = basis_second(u, h * (1 + 1e-13));
                if (std::isfinite(a) && std::isfinite(b))
                    paste = std::fmax(paste, std::fabs(a - b) / std::fabs(a));
            }

            // Convexity: reported second derivatives and secant slopes of the values.
            for (double lz = -3.0; lz <= 3.0; lz += 0.05) {
                ++convex_points;
                if (!(u.eval_scaled(std::pow(10.0, lz)).d[2] > 0.0))
                    ++convex_bad;
            }
            for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
                const double s0 = (eval_u(u, grid[i], 0) - eval_u(u, grid[i - 1], 0)) / (grid[i] - grid[i - 1]);
                const double s1 = (eval_u(u, grid[i + 1], 0) - eval_u(u, grid[i], 0)) / (grid[i + 1] - grid[i]);
                ++convex_points;
                if (!(s1 > s0 - 1e-12 * std::fabs(s0)))
                    ++convex_bad;
            }
        }
        for (double lz = -3.0; lz <= 3.0; lz += 0.05) {
            const double z = std::pow(10.0, lz);
            convex_points += 2;
            convex_bad += !(plus.p_scaled(z).d[2] > 0.0) + !(plus.q_scaled(z).d[2] > 0.0);
        }
    }
    const bool ode_ok = ode < 1e-8, wr_ok = wr < 1e-9, paste_ok = paste < 1e-6, convex_ok = convex_bad == 0;
    log.line(str("20 models, P, Q and U_c (c = 0, two finite, inf) on log grids"));
    log.line(str("max relative ODE residual %.3e (< 1e-8): %s", ode, ok(ode_ok)));
    log.line(str("max relative Wronskian spread %.3e (< 1e-9): %s", wr, ok(wr_ok)));
    log.line(str("max relative jump of U, U', U'' at the switch point %.3e (< 1e-6): %s", paste, ok(paste_ok)));
    log.line(str("convexity: %d of %d points violate: %s", convex_bad, convex_points, ok(convex_ok)));
    if (degenerate > 0)
        log.line(str("%d upper-branch points skipped: degenerate -kappa basis", degenerate));
    log.summary = str("ode %.1e, wronskian %.1e, pasting %.1e", ode, wr, paste);
    return ode_ok && wr_ok && paste_ok && convex_ok;
}

struct Criterion {
    int id;
    const char* title;
    double limit;
    std::function<bool(Log&)> run;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all = {
        {1, "floor critical ambiguity", 10.0, critical_kappa},
        {2, "floor single boundary", 1.0, floor_single},
        {3, "floor two boundaries", 5.0, floor_two},
        {4, "integral boundary property on random models", 30.0, integral_property},
        {5, "boundary monotonicity on sweep grids", 60.0, sweep_shapes},
        {6, "exchange vanishing-strike limit", 10.0, exchange_limit},
        {7, "finite-difference oracle equivalence", 120.0, oracle_equivalence},
        {8, "martingale and submartingale profiles", 300.0, martingales},
        {9, "Nash equilibrium checks", 600.0, nash},
        {10, "analytic structure", 60.0, analytic_structure},
    };
    return all;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& os, const std::vector<int>& only)
{
    std::vector<CriterionResult> out;
    for (const Criterion& c : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
            continue;
        Log log(os);
        os << "criterion " << c.id << ": " << c.title << std::endl;
        CriterionResult res;
        res.id = c.id;
        res.title = c.title;
        res.time_limit = c.limit;
        const Clock::time_point t0 = Clock::now();
        bool passed = false;
        try {
            passed = c.run(log);
        } catch (const std::exception& e) {
            log.line(std::string("error: ") + e.what());
            log.summary = "error";
        }
        res.seconds = seconds_since(t0);
        const bool in_time = res.seconds < c.limit;
        if (!in_time)
            log.line(str("runtime %.1f s exceeds %.0f s", res.seconds, c.limit));
        res.passed = passed && in_time;
        res.summary = log.summary;
        os << (res.passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << res.summary
           << str(" [%.1f s, limit %.0f s]", res.seconds, c.limit) << std::endl;
        out.push_back(res);
    }
    return out;
}

}  // namespace ambistop
