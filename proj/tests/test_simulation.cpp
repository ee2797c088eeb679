#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <sstream>
#include <string>

#include "ambistop/error.hpp"
#include "ambistop/simulation.hpp"

using namespace ambistop;

namespace {

const ModelParams kPaper05 = make_model(0.0, 0.5, 0.05, 0.5);
const ModelParams kPaper175 = make_model(0.0, 0.5, 0.05, 1.75);

SimConfig small(std::uint64_t n = 20000, double t_max = 20.0)
{
    SimConfig c;
    c.n_paths = n;
    c.t_max = t_max;
    c.seed = 77;
    return c;
}

SimOptions with_samples()
{
    SimOptions o;
    o.keep_samples = true;
    return o;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("start in the stop region pays the payoff at once")
{
    const StoppingSolution s = integral_solve(kPaper05);
    const McEstimate e = simulate_value(kPaper05, s, Generator::worst_case(), small(), 1.0, 30.0);
    CHECK(e.mean == 30.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.n_stopped == e.n_paths);
}

TEST_CASE("integral value from y = 0 against the analytic value")
{
    const StoppingSolution s = integral_solve(kPaper05);
    const McEstimate e = simulate_value(kPaper05, s, Generator::worst_case(), small(), 1.0, 0.0);
    const double v = value(s, 1.0, 0.0);
    INFO("mc " << e.mean << " se " << e.std_error << " v " << v);
    CHECK(std::fabs(e.mean - v) <= 3.0 * e.std_error);
    CHECK(e.n_stopped == e.n_paths);
    CHECK(e.truncation_bias_bound == 0.0);
    CHECK(e.flagged_fraction < 1e-3);
}

TEST_CASE("worst case and constant +kappa agree path by path below the lower boundary")
{
    const StoppingSolution s = integral_solve(kPaper05);
    const McEstimate a = simulate_value(kPaper05, s, Generator::worst_case(), small(4000), 1.0, 0.5, with_samples());
    const McEstimate b = simulate_value(kPaper05, s, Generator::plus_kappa(), small(4000), 1.0, 0.5, with_samples());
    CHECK(same_bits(a.samples, b.samples));
}

TEST_CASE("results do not depend on threads or SIMD level")
{
    const StoppingSolution s = floor_solve(kPaper175);
    auto run = [&] {
        return simulate_value(kPaper175, s, Generator::worst_case(), small(10000), 1.0, 1.0, with_samples());
    };
    setenv("AMBISTOP_THREADS", "1", 1);
    setenv("AMBISTOP_SIMD", "scalar", 1);
    const McEstimate base = run();
    setenv("AMBISTOP_THREADS", "3", 1);
    const McEstimate threaded = run();
    setenv("AMBISTOP_SIMD", "auto", 1);
    const McEstimate simd = run();
    unsetenv("AMBISTOP_THREADS");
    unsetenv("AMBISTOP_SIMD");
    CHECK(same_bits(base.samples, threaded.samples));
    CHECK(same_bits(base.samples, simd.samples));
    CHECK(base.mean == simd.mean);
    CHECK(base.std_error == simd.std_error);
}

TEST_CASE("custom generator path agrees with the threshold kernel")
{
    const StoppingSolution s = floor_solve(kPaper175);
    const double sw = s.switch_point();
    const Generator g = Generator::custom([sw](double z) { return z <= sw ? 1.75 : -1.75; });
    const McEstimate a = simulate_value(kPaper175, s, g, small(2000), 1.0, 1.0, with_samples());
    const McEstimate b = simulate_value(kPaper175, s, Generator::worst_case(), small(2000), 1.0, 1.0, with_samples());
    CHECK(same_bits(a.samples, b.samples));
    const Generator bad = Generator::custom([](double) { return 2.0; });
    CHECK(code_of([&] { simulate_value(kPaper175, s, bad, small(10), 1.0, 1.0); }) == ErrorCode::DomainError);
}

TEST_CASE("zero-width band perturbation leaves every path unchanged")
{
    const StoppingSolution s = floor_solve(kPaper175);
    SimOptions o = with_samples();
    o.band_lo = s.z1;
    o.band_hi = s.z2;
    const McEstimate a = simulate_value(kPaper175, s, Generator::worst_case(), small(4000), 1.0, 1.0, o);
    const McEstimate b = simulate_value(kPaper175, s, Generator::worst_case(), small(4000), 1.0, 1.0, with_samples());
    CHECK(same_bits(a.samples, b.samples));
}

TEST_CASE("premature stopping loses value")
{
    const StoppingSolution s = integral_solve(kPaper05);
    SimOptions early = with_samples();
    early.band_hi = 0.9 * s.z_star;
    const SimConfig c = small(50000);
    const McEstimate opt = simulate_value(kPaper05, s, Generator::worst_case(), c, 1.0, 1.0, with_samples());
    const McEstimate pre = simulate_value(kPaper05, s, Generator::worst_case(), c, 1.0, 1.0, early);
    const double se = paired_std_error(pre.samples, opt.samples);
    INFO("diff " << pre.mean - opt.mean << " se " << se);
    CHECK(pre.mean - opt.mean < -3.0 * se);
}

TEST_CASE("dt halving keeps the estimate")
{
    const StoppingSolution s = integral_solve(kPaper05);
    SimConfig c = small();
    const McEstimate a = simulate_value(kPaper05, s, Generator::worst_case(), c, 1.0, 1.0);
    c.dt = 5e-4;
    const McEstimate b = simulate_value(kPaper05, s, Generator::worst_case(), c, 1.0, 1.0);
    CHECK(std::fabs(a.mean - b.mean) <= 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("truncation is reported, not dropped")
{
    const StoppingSolution s = integral_solve(kPaper05);
    SimConfig c = small(2000, 1.0);
    SimOptions o = with_samples();
    const McEstimate e = simulate_value(kPaper05, s, Generator::worst_case(), c, 1.0, 0.5, o);
    CHECK(e.n_stopped < e.n_paths);
    CHECK(e.truncation_bias_bound > 0.0);
    const auto zeros = std::count(e.samples.begin(), e.samples.end(), 0.0);
    CHECK(static_cast<std::uint64_t>(zeros) == e.n_paths - e.n_stopped);
    o.credit = TerminalCredit::Value;
    const McEstimate credited = simulate_value(kPaper05, s, Generator::worst_case(), c, 1.0, 0.5, o);
    CHECK(credited.mean > e.mean);
    CHECK(std::fabs(credited.mean - value(s, 1.0, 0.5)) <= 3.0 * credited.std_error);
}

TEST_CASE("input validation")
{
    const StoppingSolution s = integral_solve(kPaper05);
    const Generator g = Generator::worst_case();
    CHECK(code_of([&] { simulate_value(kPaper05, s, g, small(10), 0.0, 1.0); }) == ErrorCode::InvalidInitialState);
    CHECK(code_of([&] { simulate_value(kPaper05, s, g, small(10), 1.0, -1.0); }) == ErrorCode::InvalidInitialState);
    CHECK(code_of([&] { simulate_value(kPaper05, s, g, small(10, 0.05), 1.0, 1.0); }) == ErrorCode::ConfigError);
    SimConfig coarse = small(10, 100.0);
    coarse.dt = 1.0;
    CHECK(code_of([&] { simulate_value(kPaper05, s, g, coarse, 1.0, 1.0); }) == ErrorCode::StepTooLarge);
    CHECK(code_of([&] { simulate_value(kPaper175, s, g, small(10), 1.0, 1.0); }) == ErrorCode::MismatchedModel);
    CHECK(resolve_config(kPaper05, SimConfig{}).t_max == doctest::Approx(800.0));
}

TEST_CASE("martingale under the matching generator, submartingale otherwise")
{
    const SimConfig c = small(20000);
    const std::vector<double> t = {0.25, 0.5, 1.0, 2.0};
    const MartingaleReport m = martingale_check(kPaper05, Reference::zero(), Generator::worst_case(), c, 1.0, 2.0, t);
    CHECK(m.matching);
    CHECK(m.passed);
    const MartingaleReport up = martingale_check(kPaper05, Reference::zero(), Generator::minus_kappa(), c, 1.0, 2.0, t);
    CHECK_FALSE(up.matching);
    CHECK(up.passed);
    for (const CheckpointStat& s : up.checkpoints)
        CHECK(s.z_score > 3.0);
    for (std::size_t i = 1; i < up.checkpoints.size(); ++i)
        CHECK(up.checkpoints[i].mean > up.checkpoints[i - 1].mean);
    const MartingaleReport inf =
        martingale_check(kPaper05, Reference::infinity(), Generator::plus_kappa(), c, 1.0, 40.0, t);
    CHECK(inf.matching);
    CHECK(inf.passed);
}

TEST_CASE("no ambiguity: every generator is theta = 0")
{
    const ModelParams m0 = make_model(0.0, 0.5, 0.05, 0.0);
    const SimConfig c = small(20000);
    for (const Generator& g : {Generator::worst_case(), Generator::plus_kappa(), Generator::minus_kappa()}) {
        const MartingaleReport r = martingale_check(m0, Reference::zero(), g, c, 1.0, 2.0, {0.5, 1.0});
        CHECK(r.matching);
        CHECK(r.passed);
    }
    CHECK(code_of([&] { martingale_check(m0, Reference::zero(), Generator::worst_case(), c, 1.0, 2.0, {1.0, 0.5}); }) ==
          ErrorCode::ConfigError);
}

TEST_CASE("nash check plumbing")
{
    const StoppingSolution s = floor_solve(kPaper175);
    CHECK(code_of([&] { nash_check(kPaper175, s, small(10), 1.0, 30.0); }) == ErrorCode::StartInStopRegion);

    const ModelParams m = make_model(0.1, 0.2, 0.15, 0.1);
    const Payoff put = Payoff::custom([](double z) { return std::fmax(20.0 - z, 0.0); }, "put");
    const StoppingSolution up = upper_boundary_solve(m, put);
    ModelParams transient = m;
    transient.upper_boundary_ok = false;
    const NashReport skipped = nash_check(transient, up, small(10), 1.0, 16.0);
    CHECK(skipped.skipped);
    CHECK(!skipped.skip_reason.empty());
    CHECK(csv_rows(skipped).empty());

    const NashReport r = nash_check(kPaper175, s, small(4000, 5.0), 1.0, 1.0);
    CHECK(r.comparisons.size() == 5);
    CHECK(r.analytic_value == doctest::Approx(value(s, 1.0, 1.0)));
    std::ostringstream os;
    write_sim_csv(csv_rows(r), os);
    const std::string out = os.str();
    CHECK(out.rfind("quantity,mean,std_error,n_paths,dt,seed\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 7);
    CHECK(out.find(",4000,0.001,77\n") != std::string::npos);
}

// Euler on Z is strong order 1/2, so the pathwise gap shrinks like sqrt(dt).
TEST_CASE("ratio Y / X tracks the simulated Z")
{
    SimConfig c = small(2000);
    auto worst = [&](double dt) {
        c.dt = dt;
        const std::vector<double> e = ratio_consistency(kPaper05, 0.5, c, 1.0, 1.0, 1.0);
        return *std::max_element(e.begin(), e.end());
    };
    const double e1 = worst(1e-3);
    const double e2 = worst(5e-4);
    INFO("max error " << e1 << " -> " << e2);
    CHECK(e1 < 0.15);
    CHECK(e2 < e1 / 1.3);
}
