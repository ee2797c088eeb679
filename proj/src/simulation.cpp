#include "ambistop/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ambistop/error.hpp"
#include "ambistop/parallel.hpp"

namespace ambistop {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr double kMaxFlagged = 1e-3;

struct Threshold {
    double switch_z;
    double lo;
    double hi;
};

Threshold threshold_for(GeneratorKind kind, double kappa, double switch_z)
{
    switch (kind) {
    case GeneratorKind::WorstCase:
        if (kappa == 0.0)
            return {INFINITY, 0.0, 0.0};
        if (std::isnan(switch_z))
            return {INFINITY, kappa, kappa};
        return {switch_z, kappa, -kappa};
    case GeneratorKind::ConstantPlusKappa:
        return {INFINITY, kappa, kappa};
    case GeneratorKind::ConstantMinusKappa:
        return {INFINITY, -kappa, -kappa};
    case GeneratorKind::Custom:
        break;
    }
    return {INFINITY, 0.0, 0.0};
}

void check_initial_state(double x0, double y0)
{
    if (!(x0 > 0.0) || !std::isfinite(x0))
        fail(ErrorCode::InvalidInitialState, "x0 must be positive and finite");
    if (!(y0 >= 0.0) || !std::isfinite(y0))
        fail(ErrorCode::InvalidInitialState, "y0 must be nonnegative and finite");
}

// Scalar path loop for arbitrary theta(z), optionally accumulating Y by the
// trapezoidal rule. Shares the noise and the step with the kernels.
void run_generic(const PathParams& p, const std::function<double(double)>& theta, double kappa, PathBatch& out,
                 std::vector<double>* y_end, double y0)
{
    const double mux = p.mu - 0.5 * p.sigma * p.sigma;
    const double muz = p.mu - p.sigma * p.sigma;
    const double sqdt = std::sqrt(p.dt);
    const std::size_t nchk = p.checkpoints.size();
    for (std::size_t i = 0; i < out.status.size(); ++i) {
        const std::uint64_t path = out.first + i;
        double lx = p.log_x0;
        double z = p.z0;
        double y = y0;
        std::int64_t step = 0;
        std::size_t next = 0;
        bool running = true;
        std::array<double, 2> nrm{};
        while (running && step < p.max_steps) {
            if (step % 2 == 0)
                nrm = path_normals(p.seed, path, static_cast<std::uint64_t>(step) / 2);
            const double th = theta(z);
            if (!(std::fabs(th) <= kappa))
                fail(ErrorCode::DomainError, "custom generator left [-kappa, kappa]");
            const double sth = p.sigma * th;
            const double dw = sqdt * nrm[step % 2];
            const double lxn = lx + ((mux - sth) * p.dt + p.sigma * dw);
            const double drift = 1.0 - (muz - sth) * z;
            const double zn = z + (drift * p.dt - (p.sigma * z) * dw);
            if (std::fabs(drift) * p.dt > 0.5 * z)
                ++out.flagged_steps;
            ++out.steps;
            const bool lo = zn <= p.band_lo;
            if (lo || zn >= p.band_hi) {
                const double bnd = lo ? p.band_lo : p.band_hi;
                const double f = (bnd - z) / (zn - z);
                out.tau[i] = (static_cast<double>(step) + f) * p.dt;
                out.log_x[i] = lx + f * (lxn - lx);
                out.z[i] = bnd;
                out.status[i] = static_cast<std::uint8_t>(lo ? PathStatus::ExitLow : PathStatus::ExitHigh);
                running = false;
                break;
            }
            if (y_end)
                y += 0.5 * (std::exp(lx) + std::exp(lxn)) * p.dt;
            lx = lxn;
            z = zn;
            ++step;
            if (next < nchk && step == p.checkpoints[next]) {
                out.chk_log_x[i * nchk + next] = lx;
                out.chk_z[i * nchk + next] = z;
                ++next;
            }
        }
        if (running) {
            out.tau[i] = static_cast<double>(step) * p.dt;
            out.log_x[i] = lx;
            out.z[i] = z;
            out.status[i] = static_cast<std::uint8_t>(PathStatus::Running);
        }
        if (y_end)
            (*y_end)[i] = y;
    }
}

// Runs n paths in fixed chunks; chunk k always covers the same path indices.
std::vector<PathBatch> run_chunked(const PathParams& p, std::uint64_t n, const std::function<double(double)>* theta,
                                   double kappa)
{
    const std::size_t chunks = static_cast<std::size_t>((n + kChunk - 1) / kChunk);
    std::vector<PathBatch> out(chunks);
    const SimdLevel level = active_simd_level();
    parallel_for(chunks, [&](std::size_t k) {
        const std::uint64_t first = k * kChunk;
        out[k].resize(first, static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, n - first)),
                      p.checkpoints.size());
        if (theta)
            run_generic(p, *theta, kappa, out[k], nullptr, 0.0);
        else
            run_paths(p, out[k], level);
    });
    std::uint64_t steps = 0, flagged = 0;
    for (const PathBatch& b : out) {
        steps += b.steps;
        flagged += b.flagged_steps;
    }
    if (steps > 0 && static_cast<double>(flagged) > kMaxFlagged * static_cast<double>(steps)) {
        std::ostringstream os;
        os << "dt |drift| / Z > 0.5 on " << flagged << " of " << steps << " steps";
        fail(ErrorCode::StepTooLarge, os.str());
    }
    return out;
}

double flagged_fraction(const std::vector<PathBatch>& batches)
{
    std::uint64_t steps = 0, flagged = 0;
    for (const PathBatch& b : batches) {
        steps += b.steps;
        flagged += b.flagged_steps;
    }
    return steps ? static_cast<double>(flagged) / static_cast<double>(steps) : 0.0;
}

void mean_and_error(const std::vector<double>& v, double* mean, double* se)
{
    const double n = static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v)
        s += x;
    const double m = s / n;
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    *mean = m;
    *se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

std::int64_t steps_for(double t, double dt)
{
    return static_cast<std::int64_t>(std::llround(t / dt));
}

bool is_matching(const ModelParams& model, Reference c, GeneratorKind kind)
{
    if (kind == GeneratorKind::WorstCase)
        return true;
    if (model.kappa == 0.0 && kind != GeneratorKind::Custom)
        return true;
    return c.kind == ReferenceKind::Infinity && kind == GeneratorKind::ConstantPlusKappa;
}

const char* reference_label(Reference c)
{
    switch (c.kind) {
    case ReferenceKind::Zero:
        return "0";
    case ReferenceKind::Finite:
        return "c";
    case ReferenceKind::Infinity:
        return "inf";
    }
    return "?";
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

}  // namespace

SimConfig resolve_config(const ModelParams& model, SimConfig config)
{
    if (config.t_max == 0.0)
        config.t_max = 40.0 / model.r;
    if (!(config.dt > 0.0) || !std::isfinite(config.dt))
        fail(ErrorCode::ConfigError, "dt must be positive");
    if (!(config.t_max >= 100.0 * config.dt) || !std::isfinite(config.t_max))
        fail(ErrorCode::ConfigError, "t_max must be at least 100 dt");
    if (config.n_paths < 1)
        fail(ErrorCode::ConfigError, "n_paths must be positive");
    return config;
}

const char* generator_name(GeneratorKind kind)
{
    switch (kind) {
    case GeneratorKind::WorstCase:
        return "worst_case";
    case GeneratorKind::ConstantPlusKappa:
        return "plus_kappa";
    case GeneratorKind::ConstantMinusKappa:
        return "minus_kappa";
    case GeneratorKind::Custom:
        return "custom";
    }
    return "?";
}

McEstimate simulate_value(const ModelParams& model, const StoppingSolution& solution, const Generator& generator,
                          const SimConfig& config_in, double x0, double y0, const SimOptions& options)
{
    check_initial_state(x0, y0);
    if (!same_model(model, solution.model))
        fail(ErrorCode::MismatchedModel, "solution was computed for another model");
    const SimConfig config = resolve_config(model, config_in);
    std::pair<double, double> band = solution.continuation_band();
    if (!std::isnan(options.band_lo))
        band.first = options.band_lo;
    if (!std::isnan(options.band_hi))
        band.second = options.band_hi;

    McEstimate est;
    est.n_paths = config.n_paths;
    est.t_max = config.t_max;
    const double z0 = y0 / x0;
    if (z0 <= band.first || z0 >= band.second) {
        est.mean = solution.payoff(x0, y0);
        est.n_stopped = config.n_paths;
        if (options.keep_samples)
            est.samples.assign(config.n_paths, est.mean);
        return est;
    }

    PathParams p;
    p.mu = model.mu;
    p.sigma = model.sigma;
    p.dt = config.dt;
    p.max_steps = steps_for(config.t_max, config.dt);
    p.log_x0 = std::log(x0);
    p.z0 = z0;
    p.band_lo = band.first;
    p.band_hi = band.second;
    p.seed = config.seed;
    const Threshold th = threshold_for(generator.kind, model.kappa, solution.switch_point());
    p.switch_z = th.switch_z;
    p.theta_lo = th.lo;
    p.theta_hi = th.hi;
    const bool custom = generator.kind == GeneratorKind::Custom;
    if (custom && !generator.theta)
        fail(ErrorCode::ConfigError, "custom generator needs a theta function");
    const std::vector<PathBatch> batches =
        run_chunked(p, config.n_paths, custom ? &generator.theta : nullptr, model.kappa);
    est.flagged_fraction = flagged_fraction(batches);

    const double t_end = static_cast<double>(p.max_steps) * config.dt;
    const double disc_end = std::exp(-model.r * t_end);
    const double g_lo = std::isfinite(band.first) ? solution.payoff.profile(band.first) : 0.0;
    const double g_hi = std::isfinite(band.second) ? solution.payoff.profile(band.second) : 0.0;
    std::vector<double> v;
    v.reserve(config.n_paths);
    double max_open = 0.0;
    std::uint64_t open = 0;
    for (const PathBatch& b : batches) {
        for (std::size_t i = 0; i < b.status.size(); ++i) {
            const auto s = static_cast<PathStatus>(b.status[i]);
            if (s != PathStatus::Running) {
                const double g = s == PathStatus::ExitLow ? g_lo : g_hi;
                v.push_back(std::exp(b.log_x[i] - model.r * b.tau[i]) * g);
                continue;
            }
            ++open;
            const double x = std::exp(b.log_x[i]);
            max_open = std::fmax(max_open, x * solution.payoff.profile(b.z[i]));
            v.push_back(options.credit == TerminalCredit::Value ? disc_end * value(solution, x, x * b.z[i]) : 0.0);
        }
    }
    mean_and_error(v, &est.mean, &est.std_error);
    est.n_stopped = config.n_paths - open;
    est.truncation_bias_bound =
        disc_end * max_open * static_cast<double>(open) / static_cast<double>(config.n_paths);
    if (options.keep_samples)
        est.samples = std::move(v);
    return est;
}

double paired_std_error(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.empty())
        fail(ErrorCode::DomainError, "paired samples must have equal nonzero length");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    double m, se;
    mean_and_error(d, &m, &se);
    return se;
}

MartingaleReport martingale_check(const ModelParams& model, Reference c, const Generator& generator,
                                  const SimConfig& config_in, double x0, double y0,
                                  const std::vector<double>& checkpoints)
{
    check_initial_state(x0, y0);
    const SimConfig config = resolve_config(model, config_in);
    if (checkpoints.empty())
        fail(ErrorCode::ConfigError, "martingale_check needs checkpoints");
    std::vector<std::int64_t> steps;
    for (double t : checkpoints) {
        const std::int64_t s = steps_for(t, config.dt);
        if (!(t > 0.0) || t > config.t_max || (!steps.empty() && s <= steps.back()))
            fail(ErrorCode::ConfigError, "checkpoints must be increasing, positive and at most t_max");
        steps.push_back(s);
    }
    const ExcessiveFunction u = build_excessive(model, c);

    MartingaleReport rep;
    rep.reference = c;
    rep.generator = generator.kind;
    rep.matching = is_matching(model, c, generator.kind);
    rep.n_paths = config.n_paths;
    rep.dt = config.dt;
    rep.seed = config.seed;

    const double z0 = y0 / x0;
    const ScaledTriple u0 = u.eval_scaled(z0);
    rep.m0 = x0 * u0.d[0] * std::exp(u0.log_scale);

    PathParams p;
    p.mu = model.mu;
    p.sigma = model.sigma;
    p.dt = config.dt;
    p.max_steps = steps.back();
    p.log_x0 = std::log(x0);
    p.z0 = z0;
    p.seed = config.seed;
    p.checkpoints = steps;
    const Threshold th = threshold_for(generator.kind, model.kappa, u.hat_z());
    p.switch_z = th.switch_z;
    p.theta_lo = th.lo;
    p.theta_hi = th.hi;
    const bool custom = generator.kind == GeneratorKind::Custom;
    if (custom && !generator.theta)
        fail(ErrorCode::ConfigError, "custom generator needs a theta function");
    const std::vector<PathBatch> batches =
        run_chunked(p, config.n_paths, custom ? &generator.theta : nullptr, model.kappa);

    const std::size_t nchk = steps.size();
    const double log_m0 = std::log(x0) + u0.log_scale;
    rep.passed = true;
    for (std::size_t j = 0; j < nchk; ++j) {
        const double t = static_cast<double>(steps[j]) * config.dt;
        std::vector<double> m;
        m.reserve(config.n_paths);
        for (const PathBatch& b : batches) {
            for (std::size_t i = 0; i < b.status.size(); ++i) {
                const ScaledTriple ut = u.eval_scaled(b.chk_z[i * nchk + j]);
                m.push_back(rep.m0 / u0.d[0] * ut.d[0] *
                            std::exp(b.chk_log_x[i * nchk + j] - model.r * t + ut.log_scale - log_m0));
            }
        }
        CheckpointStat cs;
        cs.t = t;
        mean_and_error(m, &cs.mean, &cs.std_error);
        cs.z_score = cs.std_error > 0.0 ? (cs.mean - rep.m0) / cs.std_error : 0.0;
        const double tol = 3.0 * cs.std_error;
        cs.passed = rep.matching ? std::fabs(cs.mean - rep.m0) <= tol : cs.mean >= rep.m0 - tol;
        rep.passed = rep.passed && cs.passed;
        rep.checkpoints.push_back(cs);
    }
    return rep;
}

NashReport nash_check(const ModelParams& model, const StoppingSolution& solution, const SimConfig& config_in,
                      double x0, double y0)
{
    check_initial_state(x0, y0);
    const SimConfig config = resolve_config(model, config_in);
    NashReport rep;
    rep.regime = solution.regime;
    rep.n_paths = config.n_paths;
    rep.dt = config.dt;
    rep.seed = config.seed;
    if (solution.stops_at(y0 / x0))
        fail(ErrorCode::StartInStopRegion, "nash_check needs a start inside the continuation region");
    if (solution.regime == Regime::UpperBoundary && !model.upper_boundary_ok) {
        rep.skipped = true;
        rep.skip_reason = "2mu <= 2 kappa sigma - sigma^2: stopping time not a.s. finite";
        rep.passed = true;
        return rep;
    }
    SimOptions opt;
    opt.credit = TerminalCredit::Value;
    opt.keep_samples = true;
    rep.analytic_value = value(solution, x0, y0);
    rep.equilibrium = simulate_value(model, solution, Generator::worst_case(), config, x0, y0, opt);
    const McEstimate& eq = rep.equilibrium;

    auto compare = [&](const std::string& name, const McEstimate& dev, bool at_least) {
        NashComparison c;
        c.name = name;
        c.estimate = dev.mean;
        c.reference = eq.mean;
        c.std_error = paired_std_error(dev.samples, eq.samples);
        c.passed = at_least ? c.estimate >= c.reference - 3.0 * c.std_error
                            : c.estimate <= c.reference + 3.0 * c.std_error;
        rep.comparisons.push_back(c);
    };
    compare("generator_plus_kappa",
            simulate_value(model, solution, Generator::plus_kappa(), config, x0, y0, opt), true);
    compare("generator_minus_kappa",
            simulate_value(model, solution, Generator::minus_kappa(), config, x0, y0, opt), true);

    const std::pair<double, double> band = solution.continuation_band();
    for (const auto& [name, inner] : {std::pair<const char*, bool>{"band_shrunk_10pct", true},
                                      std::pair<const char*, bool>{"band_expanded_10pct", false}}) {
        SimOptions o = opt;
        o.band_lo = std::isfinite(band.first) ? band.first * (inner ? 1.1 : 0.9) : band.first;
        o.band_hi = std::isfinite(band.second) ? band.second * (inner ? 0.9 : 1.1) : band.second;
        compare(name, simulate_value(model, solution, Generator::worst_case(), config, x0, y0, o), false);
    }

    NashComparison a;
    a.name = "analytic_value";
    a.estimate = eq.mean;
    a.reference = rep.analytic_value;
    a.std_error = eq.std_error;
    a.passed = std::fabs(a.estimate - a.reference) <= 3.0 * a.std_error;
    rep.comparisons.push_back(a);

    rep.passed = std::all_of(rep.comparisons.begin(), rep.comparisons.end(),
                             [](const NashComparison& c) { return c.passed; });
    return rep;
}

std::vector<double> ratio_consistency(const ModelParams& model, double theta, const SimConfig& config_in, double x0,
                                      double y0, double t)
{
    check_initial_state(x0, y0);
    const SimConfig config = resolve_config(model, config_in);
    if (!(std::fabs(theta) <= model.kappa))
        fail(ErrorCode::DomainError, "theta must lie in [-kappa, kappa]");
    PathParams p;
    p.mu = model.mu;
    p.sigma = model.sigma;
    p.dt = config.dt;
    p.max_steps = steps_for(t, config.dt);
    p.log_x0 = std::log(x0);
    p.z0 = y0 / x0;
    p.seed = config.seed;
    PathBatch b;
    b.resize(0, static_cast<std::size_t>(config.n_paths), 0);
    std::vector<double> y(b.status.size());
    run_generic(p, [theta](double) { return theta; }, model.kappa, b, &y, y0);
    std::vector<double> err(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        err[i] = std::fabs(y[i] / std::exp(b.log_x[i]) - b.z[i]);
    return err;
}

std::vector<CsvRow> csv_rows(const MartingaleReport& report)
{
    std::vector<CsvRow> rows;
    const std::string base =
        std::string("M_ref=") + reference_label(report.reference) + "_gen=" + generator_name(report.generator);
    rows.push_back({base + "_t=0", report.m0, 0.0, report.n_paths, report.dt, report.seed});
    for (const CheckpointStat& c : report.checkpoints)
        rows.push_back({base + "_t=" + fmt(c.t), c.mean, c.std_error, report.n_paths, report.dt, report.seed});
    return rows;
}

std::vector<CsvRow> csv_rows(const NashReport& report)
{
    std::vector<CsvRow> rows;
    if (report.skipped)
        return rows;
    rows.push_back({"analytic_value", report.analytic_value, 0.0, report.n_paths, report.dt, report.seed});
    rows.push_back({"equilibrium", report.equilibrium.mean, report.equilibrium.std_error, report.n_paths,
                    report.dt, report.seed});
    for (const NashComparison& c : report.comparisons) {
        if (c.name == "analytic_value")
            continue;
        rows.push_back({c.name, c.estimate, c.std_error, report.n_paths, report.dt, report.seed});
    }
    return rows;
}

void write_sim_csv(const std::vector<CsvRow>& rows, std::ostream& os)
{
    os << "quantity,mean,std_error,n_paths,dt,seed\n";
    os << std::setprecision(12);
    for (const CsvRow& r : rows)
        os << r.quantity << ',' << r.mean << ',' << r.std_error << ',' << r.n_paths << ',' << r.dt << ',' << r.seed
           << '\n';
}

}  // namespace ambistop
