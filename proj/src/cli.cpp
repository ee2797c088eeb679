#include "ambistop/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ambistop/acceptance.hpp"
#include "ambistop/error.hpp"
#include "ambistop/parallel.hpp"
#include "ambistop/simulation.hpp"
#include "ambistop/solvers.hpp"

namespace ambistop {

namespace {

constexpr int kVerifyFailed = 2;

double parse_number(const std::string& s)
{
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (s.empty() || end != begin + s.size() || !std::isfinite(v))
        fail(ErrorCode::ConfigError, "not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(cur);
    if (!s.empty() && s.back() == sep)
        out.push_back("");
    return out;
}

struct Inputs {
    // Defaults are the reference market of the floor examples; kappa is required.
    std::string mu = "0", sigma = "0.5", r = "0.05", kappa;
    std::string payoff = "integral";
    double strike = NAN;
    std::string output;
    std::uint64_t seed = SimConfig{}.seed;

    std::string z = "0:60:600";
    double kappa_max = 10.0;

    std::string mode = "value";
    std::string generator = "worst_case";
    std::string reference = "0";
    std::string checkpoints = "0.25,0.5,1,2";
    std::string credit = "none";
    std::uint64_t n_paths = SimConfig{}.n_paths;
    double dt = SimConfig{}.dt;
    double t_max = 0.0;
    double x0 = 1.0;
    double y0 = 1.0;

    std::string criteria;
};

double scalar(const std::string& text, const char* name)
{
    if (text.empty())
        fail(ErrorCode::ConfigError, std::string("missing --") + name);
    const std::vector<double> v = parse_values(text);
    if (v.size() != 1)
        fail(ErrorCode::ConfigError, std::string("--") + name + " needs a single value here");
    return v[0];
}

std::vector<double> values(const std::string& text, const char* name)
{
    if (text.empty())
        fail(ErrorCode::ConfigError, std::string("missing --") + name);
    return parse_values(text);
}

ModelParams model_of(const Inputs& in)
{
    const double mu = scalar(in.mu, "mu"), sigma = scalar(in.sigma, "sigma"), r = scalar(in.r, "r");
    return make_model(mu, sigma, r, scalar(in.kappa, "kappa"));
}

Payoff payoff_of(const Inputs& in)
{
    switch (parse_payoff_kind(in.payoff)) {
    case PayoffKind::Integral:
        return Payoff::integral();
    case PayoffKind::Exchange:
        if (std::isnan(in.strike))
            fail(ErrorCode::ConfigError, "exchange payoff needs --strike");
        return Payoff::exchange(in.strike);
    case PayoffKind::Floor:
        return Payoff::floor();
    case PayoffKind::Custom:
        break;
    }
    fail(ErrorCode::ConfigError, "custom payoffs are not available from the command line");
}

// 12 significant digits; NaN becomes an empty field.
std::string num(double v)
{
    if (std::isnan(v))
        return "";
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

void roots_cmd(const Inputs& in, std::ostream& out)
{
    const ModelParams m = model_of(in);
    out << "drift,psi,phi\n";
    for (DriftSign s : {DriftSign::PlusKappa, DriftSign::MinusKappa}) {
        const CharacteristicRoots q = characteristic_roots(m, s);
        out << (s == DriftSign::PlusKappa ? "plus_kappa" : "minus_kappa") << ',' << num(q.psi) << ',' << num(q.phi)
            << '\n';
    }
}

void boundary_cmd(const Inputs& in, std::ostream& out)
{
    const StoppingSolution s = solve(model_of(in), payoff_of(in));
    const bool two = s.regime == Regime::TwoSided;
    out << "payoff,regime,z_star,z1,z2,switch_point\n";
    out << s.payoff.name() << ',' << regime_name(s.regime) << ',' << num(two ? NAN : s.z_star) << ','
        << num(two ? s.z1 : NAN) << ',' << num(two ? s.z2 : NAN) << ',' << num(s.switch_point()) << '\n';
}

void value_curve_cmd(const Inputs& in, std::ostream& out)
{
    const StoppingSolution s = solve(model_of(in), payoff_of(in));
    const std::vector<double> z = values(in.z, "z");
    if (z.front() < 0.0)
        fail(ErrorCode::ConfigError, "--z must be nonnegative");
    out << "z,value,payoff,stop\n";
    for (double v : z)
        out << num(v) << ',' << num(value(s, 1.0, v)) << ',' << num(s.payoff.profile(v)) << ','
            << (s.stops_at(v) ? 1 : 0) << '\n';
}

void sweep_kappa_cmd(const Inputs& in, std::ostream& out)
{
    const double mu = scalar(in.mu, "mu"), r = scalar(in.r, "r");
    const std::vector<double> sigmas = values(in.sigma, "sigma");
    const std::vector<double> kappas = values(in.kappa, "kappa");
    const PayoffKind kind = parse_payoff_kind(in.payoff);
    const Payoff payoff = payoff_of(in);
    const std::size_t n = sigmas.size() * kappas.size();
    std::vector<StoppingSolution> sol(n);
    parallel_for(n, [&](std::size_t i) {
        sol[i] = solve(make_model(mu, sigmas[i / kappas.size()], r, kappas[i % kappas.size()]), payoff);
    });
    // Rows come out sorted by (sigma, kappa) because both lists are increasing.
    if (kind == PayoffKind::Floor) {
        out << "sigma,kappa,regime,z_low,z_high\n";
        for (std::size_t i = 0; i < n; ++i) {
            const auto [lo, hi] = sol[i].continuation_band();
            out << num(sol[i].model.sigma) << ',' << num(sol[i].model.kappa) << ',' << regime_name(sol[i].regime)
                << ',' << num(lo > 0.0 ? lo : NAN) << ',' << num(hi) << '\n';
        }
        return;
    }
    out << "sigma,kappa," << (kind == PayoffKind::Integral ? "z_bar" : "z_star") << '\n';
    for (std::size_t i = 0; i < n; ++i)
        out << num(sol[i].model.sigma) << ',' << num(sol[i].model.kappa) << ',' << num(sol[i].z_star) << '\n';
}

void critical_kappa_cmd(const Inputs& in, std::ostream& out)
{
    const double mu = scalar(in.mu, "mu"), sigma = scalar(in.sigma, "sigma"), r = scalar(in.r, "r");
    out << "mu,sigma,r,kappa_hat\n";
    out << num(mu) << ',' << num(sigma) << ',' << num(r) << ',' << num(critical_kappa_floor(mu, sigma, r, in.kappa_max))
        << '\n';
}

Generator generator_of(const std::string& name)
{
    if (name == "worst_case")
        return Generator::worst_case();
    if (name == "plus_kappa")
        return Generator::plus_kappa();
    if (name == "minus_kappa")
        return Generator::minus_kappa();
    fail(ErrorCode::ConfigError, "unknown generator '" + name + "'");
}

Reference reference_of(const std::string& text)
{
    if (text == "0")
        return Reference::zero();
    if (text == "inf")
        return Reference::infinity();
    const double c = parse_number(text);
    if (!(c > 0.0))
        fail(ErrorCode::ConfigError, "--reference must be 0, inf or a positive number");
    return Reference::finite(c);
}

void simulate_cmd(const Inputs& in, std::ostream& out)
{
    const ModelParams m = model_of(in);
    SimConfig cfg;
    cfg.n_paths = in.n_paths;
    cfg.dt = in.dt;
    cfg.t_max = in.t_max;
    cfg.seed = in.seed;
    cfg = resolve_config(m, cfg);
    if (in.mode == "martingale") {
        const MartingaleReport r = martingale_check(m, reference_of(in.reference), generator_of(in.generator), cfg,
                                                    in.x0, in.y0, values(in.checkpoints, "checkpoints"));
        write_sim_csv(csv_rows(r), out);
        return;
    }
    const StoppingSolution s = solve(m, payoff_of(in));
    if (in.mode == "nash") {
        write_sim_csv(csv_rows(nash_check(m, s, cfg, in.x0, in.y0)), out);
        return;
    }
    if (in.mode != "value")
        fail(ErrorCode::ConfigError, "unknown --mode '" + in.mode + "'");
    SimOptions opt;
    if (in.credit == "value")
        opt.credit = TerminalCredit::Value;
    else if (in.credit != "none")
        fail(ErrorCode::ConfigError, "unknown --credit '" + in.credit + "'");
    const McEstimate e = simulate_value(m, s, generator_of(in.generator), cfg, in.x0, in.y0, opt);
    write_sim_csv({{"value", e.mean, e.std_error, cfg.n_paths, cfg.dt, cfg.seed},
                   {"analytic_value", value(s, in.x0, in.y0), 0.0, cfg.n_paths, cfg.dt, cfg.seed},
                   {"stopped_fraction", static_cast<double>(e.n_stopped) / static_cast<double>(e.n_paths), 0.0,
                    cfg.n_paths, cfg.dt, cfg.seed},
                   {"truncation_bias_bound", e.truncation_bias_bound, 0.0, cfg.n_paths, cfg.dt, cfg.seed}},
                  out);
}

int verify_cmd(const Inputs& in, std::ostream& out)
{
    std::vector<int> only;
    if (!in.criteria.empty()) {
        for (const std::string& s : split(in.criteria, ',')) {
            const double v = parse_number(s);
            if (v != std::floor(v) || v < 1 || v > kCriterionCount)
                fail(ErrorCode::ConfigError, "--criteria takes numbers 1 to " + std::to_string(kCriterionCount));
            only.push_back(static_cast<int>(v));
        }
    }
    const std::vector<CriterionResult> res = run_acceptance(out, only);
    for (const CriterionResult& r : res)
        if (!r.passed)
            return kVerifyFailed;
    return 0;
}

std::string one_line(std::string s)
{
    for (char& c : s)
        if (c == '\n' || c == '\r')
            c = ' ';
    while (!s.empty() && s.back() == ' ')
        s.pop_back();
    return s;
}

}  // namespace

std::vector<double> parse_values(const std::string& text)
{
    const std::vector<std::string> range = split(text, ':');
    std::vector<double> v;
    if (range.size() == 3) {
        const double a = parse_number(range[0]), b = parse_number(range[1]);
        const double n = parse_number(range[2]);
        if (n != std::floor(n) || n < 2 || n > 1e7)
            fail(ErrorCode::ConfigError, "range '" + text + "' needs an integer step count >= 2");
        if (!(b > a))
            fail(ErrorCode::ConfigError, "range '" + text + "' must be increasing");
        const int steps = static_cast<int>(n);
        for (int i = 0; i <= steps; ++i)
            v.push_back(i == steps ? b : a + (b - a) * i / steps);
        return v;
    }
    if (range.size() != 1)
        fail(ErrorCode::ConfigError, "malformed range '" + text + "', expected a:b:n");
    for (const std::string& s : split(text, ','))
        v.push_back(parse_number(s));
    if (v.empty())
        fail(ErrorCode::ConfigError, "empty value list");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            fail(ErrorCode::ConfigError, "list '" + text + "' must be strictly increasing");
    return v;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Inputs in;
    CLI::App app{"Optimal stopping under drift ambiguity: boundaries, values and Monte Carlo checks.\n"
                 "Ranges: a:b:n gives n+1 points from a to b; lists: v1,v2,..."};
    app.set_config("--config", "", "Flat key=value file; flags win over its entries");
    app.add_option("--mu", in.mu, "Drift (scalar, or list/range where a sweep allows)")->capture_default_str();
    app.add_option("--sigma", in.sigma, "Volatility")->capture_default_str();
    app.add_option("--r", in.r, "Discount rate")->capture_default_str();
    app.add_option("--kappa", in.kappa, "Ambiguity level");
    app.add_option("--payoff", in.payoff, "integral | exchange | floor")->capture_default_str();
    app.add_option("--strike", in.strike, "Exchange strike K");
    app.add_option("--output", in.output, "Write CSV here instead of stdout");
    app.add_option("--seed", in.seed, "Monte Carlo seed")->capture_default_str();
    app.require_subcommand(1);

    CLI::App* roots = app.add_subcommand("roots", "Characteristic roots of both drift regimes");
    CLI::App* boundary = app.add_subcommand("boundary", "Regime and free boundaries");
    CLI::App* curve = app.add_subcommand("value-curve", "V(1, z) over a z grid");
    curve->add_option("--z", in.z, "z range or list")->capture_default_str();
    CLI::App* sweep = app.add_subcommand("sweep-kappa", "Boundaries over sigma x kappa grids");
    CLI::App* critical = app.add_subcommand("critical-kappa", "Floor ambiguity level where the regime changes");
    critical->add_option("--kappa-max", in.kappa_max, "Upper end of the scan")->capture_default_str();
    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo value, martingale or Nash check");
    sim->add_option("--mode", in.mode, "value | martingale | nash")->capture_default_str();
    sim->add_option("--generator", in.generator, "worst_case | plus_kappa | minus_kappa")->capture_default_str();
    sim->add_option("--reference", in.reference, "Martingale reference c: 0, inf or a number")->capture_default_str();
    sim->add_option("--checkpoints", in.checkpoints, "Martingale checkpoint times")->capture_default_str();
    sim->add_option("--credit", in.credit, "Unstopped paths at t_max: none | value")->capture_default_str();
    sim->add_option("--n-paths", in.n_paths, "Number of paths")->capture_default_str();
    sim->add_option("--dt", in.dt, "Time step")->capture_default_str();
    sim->add_option("--t-max", in.t_max, "Horizon; 0 selects 40 / r")->capture_default_str();
    sim->add_option("--x0", in.x0, "Initial X")->capture_default_str();
    sim->add_option("--y0", in.y0, "Initial Y")->capture_default_str();
    CLI::App* verify = app.add_subcommand("verify", "Run the acceptance suite");
    verify->add_option("--criteria", in.criteria, "Comma list of criterion numbers (default all)");
    for (CLI::App* sub : {roots, boundary, curve, sweep, critical, sim, verify})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: ConfigError: " << one_line(e.what()) << '\n';
        return error_exit_code(ErrorCode::ConfigError);
    }

    try {
        std::ostringstream buf;
        const bool to_file = !in.output.empty();
        std::ostream& os = to_file ? static_cast<std::ostream&>(buf) : out;
        int status = 0;
        if (*roots)
            roots_cmd(in, os);
        else if (*boundary)
            boundary_cmd(in, os);
        else if (*curve)
            value_curve_cmd(in, os);
        else if (*sweep)
            sweep_kappa_cmd(in, os);
        else if (*critical)
            critical_kappa_cmd(in, os);
        else if (*sim)
            simulate_cmd(in, os);
        else if (*verify)
            status = verify_cmd(in, os);
        if (to_file) {
            std::ofstream f(in.output, std::ios::binary);
            if (!f || !(f << buf.str()) || !f.flush())
                fail(ErrorCode::ConfigError, "cannot write '" + in.output + "'");
        }
        return status;
    } catch (const Error& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return error_exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error: Unexpected: " << one_line(e.what()) << '\n';
        return 1;
    }
}

}  // namespace ambistop
