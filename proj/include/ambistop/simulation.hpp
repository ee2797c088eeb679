#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ambistop/excessive.hpp"
#include "ambistop/kernels.hpp"
#include "ambistop/model.hpp"
#include "ambistop/solvers.hpp"

namespace ambistop {

enum class Scheme { EulerLogXEulerZ };

struct SimConfig {
    std::uint64_t n_paths = 200000;
    double dt = 1e-3;
    // Zero selects 40 / r.
    double t_max = 0.0;
    std::uint64_t seed = 20240601;
    Scheme scheme = Scheme::EulerLogXEulerZ;
};

// Fills t_max and checks dt > 0, t_max >= 100 dt, n_paths >= 1.
SimConfig resolve_config(const ModelParams& model, SimConfig config);

enum class GeneratorKind { WorstCase, ConstantPlusKappa, ConstantMinusKappa, Custom };

struct Generator {
    GeneratorKind kind = GeneratorKind::WorstCase;
    // theta as a function of z; Custom only. Values must lie in [-kappa, kappa].
    std::function<double(double)> theta;

    static Generator worst_case() { return {GeneratorKind::WorstCase, {}}; }
    static Generator plus_kappa() { return {GeneratorKind::ConstantPlusKappa, {}}; }
    static Generator minus_kappa() { return {GeneratorKind::ConstantMinusKappa, {}}; }
    static Generator custom(std::function<double(double)> f) { return {GeneratorKind::Custom, std::move(f)}; }
};

const char* generator_name(GeneratorKind kind);

// What an unstopped path contributes at t_max.
enum class TerminalCredit {
    None,
    // e^{-r t_max} V(X_T, Y_T): exact in expectation at the equilibrium, a
    // one-sided bound for unilateral deviations.
    Value,
};

struct SimOptions {
    TerminalCredit credit = TerminalCredit::None;
    // Continuation band override; NaN keeps the solution's band.
    double band_lo = std::numeric_limits<double>::quiet_NaN();
    double band_hi = std::numeric_limits<double>::quiet_NaN();
    bool keep_samples = false;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t n_stopped = 0;
    double truncation_bias_bound = 0.0;
    double t_max = 0.0;
    double flagged_fraction = 0.0;
    // Discounted per-path payoffs in path order, when requested.
    std::vector<double> samples;
};

McEstimate simulate_value(const ModelParams& model, const StoppingSolution& solution, const Generator& generator,
                          const SimConfig& config, double x0, double y0, const SimOptions& options = {});

// Standard error of the mean of a_i - b_i.
double paired_std_error(const std::vector<double>& a, const std::vector<double>& b);

struct CheckpointStat {
    double t = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    // (mean - M_0) / std_error
    double z_score = 0.0;
    bool passed = false;
};

struct MartingaleReport {
    Reference reference;
    GeneratorKind generator = GeneratorKind::WorstCase;
    // True when the generator is the one under which M is a martingale.
    bool matching = false;
    double m0 = 0.0;
    std::uint64_t n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<CheckpointStat> checkpoints;
    bool passed = false;
};

// Sample means of M_t = e^{-rt} X_t U_c(Z_t). Matching generators must stay
// within 3 SE of M_0; others must not fall below M_0 - 3 SE.
MartingaleReport martingale_check(const ModelParams& model, Reference c, const Generator& generator,
                                  const SimConfig& config, double x0, double y0,
                                  const std::vector<double>& checkpoints);

struct NashComparison {
    std::string name;
    double estimate = 0.0;
    double reference = 0.0;
    // Standard error of estimate - reference (paired under common random numbers).
    double std_error = 0.0;
    bool passed = false;
};

struct NashReport {
    Regime regime = Regime::LowerBoundary;
    bool skipped = false;
    std::string skip_reason;
    double analytic_value = 0.0;
    McEstimate equilibrium;
    std::uint64_t n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<NashComparison> comparisons;
    bool passed = false;
};

// Generator deviations (+kappa, -kappa), stopping deviations (band shrunk and
// expanded by 10%) and the analytic value, all at 3 SE.
NashReport nash_check(const ModelParams& model, const StoppingSolution& solution, const SimConfig& config,
                      double x0, double y0);

// Per-path |Y_T / X_T - Z_T| with Y accumulated by the trapezoidal rule on X,
// no stopping, horizon t.
std::vector<double> ratio_consistency(const ModelParams& model, double theta, const SimConfig& config, double x0,
                                      double y0, double t);

struct CsvRow {
    std::string quantity;
    double mean;
    double std_error;
    std::uint64_t n_paths;
    double dt;
    std::uint64_t seed;
};

std::vector<CsvRow> csv_rows(const MartingaleReport& report);
std::vector<CsvRow> csv_rows(const NashReport& report);
void write_sim_csv(const std::vector<CsvRow>& rows, std::ostream& os);

}  // namespace ambistop
