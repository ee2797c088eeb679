#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace ambistop {

// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Uniform on (0, 1] from 27 + 26 bits of two words.
double uniform_open0(std::uint32_t a, std::uint32_t b);
// Uniform on [0, 1) from 27 + 26 bits of two words.
double uniform_closed0(std::uint32_t a, std::uint32_t b);

// Portable polynomial kernels shared bit-for-bit by every SIMD level.
double kernel_log(double x);
void kernel_sincos_2pi(double u, double* s, double* c);

// Two standard normals for (seed, path, block): Box-Muller on one Philox block.
std::array<double, 2> path_normals(std::uint64_t seed, std::uint64_t path, std::uint64_t block);

// Dynamics of (log X, Z) under a threshold generator theta = z <= switch_z ?
// theta_lo : theta_hi, stopped at the first exit of Z from (band_lo, band_hi).
struct PathParams {
    double mu = 0.0;
    double sigma = 0.0;
    double dt = 1e-3;
    std::int64_t max_steps = 0;
    double log_x0 = 0.0;
    double z0 = 0.0;
    double switch_z = 0.0;
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    double band_lo = -1.0;
    double band_hi = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    // Increasing step indices at which (log X, Z) is recorded; requires an
    // infinite band so that every path reaches each of them.
    std::vector<std::int64_t> checkpoints;
};

enum class PathStatus : std::uint8_t { Running = 0, ExitLow = 1, ExitHigh = 2 };

// Structure of arrays indexed by path - first for a run over [first, first + count).
struct PathBatch {
    std::uint64_t first = 0;
    std::vector<std::uint8_t> status;
    std::vector<double> tau;
    std::vector<double> log_x;
    std::vector<double> z;
    // Row-major count x checkpoints.
    std::vector<double> chk_log_x;
    std::vector<double> chk_z;
    std::uint64_t steps = 0;
    std::uint64_t flagged_steps = 0;

    void resize(std::uint64_t first_path, std::size_t count, std::size_t n_checkpoints);
};

enum class SimdLevel { Scalar, Avx2 };

const char* simd_level_name(SimdLevel level);

// AMBISTOP_SIMD = scalar | avx2 | auto (default), capped by CPU support.
SimdLevel active_simd_level();
bool simd_level_available(SimdLevel level);

void run_paths_scalar(const PathParams& p, PathBatch& out);
void run_paths_avx2(const PathParams& p, PathBatch& out);
void run_paths(const PathParams& p, PathBatch& out, SimdLevel level);

}  // namespace ambistop
