#include <cmath>
#include <cstring>

#include "ambistop/kernels.hpp"
#include "kernel_math.hpp"

namespace ambistop {

using namespace kernel;

namespace {

std::uint32_t mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi)
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    *hi = static_cast<std::uint32_t>(p >> 32);
    return static_cast<std::uint32_t>(p);
}

double bits_to_double(std::uint64_t b)
{
    double d;
    std::memcpy(&d, &b, sizeof d);
    return d;
}

std::uint64_t double_to_bits(double d)
{
    std::uint64_t b;
    std::memcpy(&b, &d, sizeof b);
    return b;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, hi1;
        const std::uint32_t lo0 = mulhilo(kPhiloxM0, ctr[0], &hi0);
        const std::uint32_t lo1 = mulhilo(kPhiloxM1, ctr[2], &hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double uniform_open0(std::uint32_t a, std::uint32_t b)
{
    const double hi = static_cast<double>(a >> 5);
    const double lo = static_cast<double>(b >> 6);
    return (hi * kTwo26 + lo + 1.0) * kTwoM53;
}

double uniform_closed0(std::uint32_t a, std::uint32_t b)
{
    const double hi = static_cast<double>(a >> 5);
    const double lo = static_cast<double>(b >> 6);
    return (hi * kTwo26 + lo) * kTwoM53;
}

double kernel_log(double x)
{
    const std::uint64_t bits = double_to_bits(x);
    double e = static_cast<double>((bits >> 52) & 0x7ff) - 1023.0;
    double m = bits_to_double((bits & 0x000fffffffffffffull) | 0x3ff0000000000000ull);
    if (m > kSqrt2) {
        m = m * 0.5;
        e = e + 1.0;
    }
    const double s = (m - 1.0) / (m + 1.0);
    const double s2 = s * s;
    double p = log_coef(kLogTerms - 1);
    for (int k = kLogTerms - 2; k >= 0; --k)
        p = p * s2 + log_coef(k);
    return e * kLn2Hi + (e * kLn2Lo + (s + s) * p);
}

void kernel_sincos_2pi(double u, double* s, double* c)
{
    const double v = u * 4.0;
    const double q = std::floor(v);
    const double f = v - q;
    const bool big = f > 0.5;
    const double g = big ? 1.0 - f : f;
    const double x = g * kHalfPi;
    const double x2 = x * x;
    double sp = sin_coef(kTrigTerms - 1);
    double cp = cos_coef(kTrigTerms - 1);
    for (int k = kTrigTerms - 2; k >= 0; --k) {
        sp = sp * x2 + sin_coef(k);
        cp = cp * x2 + cos_coef(k);
    }
    sp = x * sp;
    const double c0 = big ? sp : cp;
    const double s0 = big ? cp : sp;
    const bool odd = q == 1.0 || q == 3.0;
    double cc = odd ? s0 : c0;
    double ss = odd ? c0 : s0;
    if (q == 1.0 || q == 2.0)
        cc = -cc;
    if (q == 2.0 || q == 3.0)
        ss = -ss;
    *s = ss;
    *c = cc;
}

std::array<double, 2> path_normals(std::uint64_t seed, std::uint64_t path, std::uint64_t block)
{
    const std::array<std::uint32_t, 4> w = philox4x32_10(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), static_cast<std::uint32_t>(path),
         static_cast<std::uint32_t>(path >> 32)},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    const double u1 = uniform_open0(w[0], w[1]);
    const double u2 = uniform_closed0(w[2], w[3]);
    const double rad = std::sqrt(-2.0 * kernel_log(u1));
    double s, c;
    kernel_sincos_2pi(u2, &s, &c);
    return {rad * c, rad * s};
}

void run_paths_scalar(const PathParams& p, PathBatch& out)
{
    const StepConsts k = step_consts(p);
    const std::size_t n = out.status.size();
    const std::size_t nchk = p.checkpoints.size();
    const double max_steps = static_cast<double>(p.max_steps);
    double steps = 0.0;
    double flagged = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t path = out.first + i;
        double lx = p.log_x0;
        double z = p.z0;
        double step = 0.0;
        std::size_t next = 0;
        bool running = true;
        while (running && step < max_steps) {
            double nrm[kSteps];
            for (int b = 0; b < kBlocks; ++b) {
                const std::array<double, 2> pair =
                    path_normals(p.seed, path, static_cast<std::uint64_t>(step) / 2 + b);
                nrm[2 * b] = pair[0];
                nrm[2 * b + 1] = pair[1];
            }
            for (int j = 0; j < kSteps && running && step < max_steps; ++j) {
                const double th = z <= p.switch_z ? p.theta_lo : p.theta_hi;
                const double dw = k.sqdt * nrm[j];
                const double lxn = lx + ((k.mux - k.sig * th) * k.dt + k.sig * dw);
                const double drift = 1.0 - (k.muz - k.sig * th) * z;
                const double zn = z + (drift * k.dt - (k.sig * z) * dw);
                if (std::fabs(drift) * k.dt > 0.5 * z)
                    flagged += 1.0;
                steps += 1.0;
                const bool lo = zn <= p.band_lo;
                if (lo || zn >= p.band_hi) {
                    const double bnd = lo ? p.band_lo : p.band_hi;
                    const double f = (bnd - z) / (zn - z);
                    out.tau[i] = (step + f) * k.dt;
                    out.log_x[i] = lx + f * (lxn - lx);
                    out.z[i] = bnd;
                    out.status[i] = static_cast<std::uint8_t>(lo ? PathStatus::ExitLow : PathStatus::ExitHigh);
                    running = false;
                    break;
                }
                lx = lxn;
                z = zn;
                step = step + 1.0;
                if (next < nchk && step == static_cast<double>(p.checkpoints[next])) {
                    out.chk_log_x[i * nchk + next] = lx;
                    out.chk_z[i * nchk + next] = z;
                    ++next;
                }
            }
        }
        if (running) {
            out.tau[i] = step * k.dt;
            out.log_x[i] = lx;
            out.z[i] = z;
            out.status[i] = static_cast<std::uint8_t>(PathStatus::Running);
        }
    }
    out.steps = static_cast<std::uint64_t>(steps);
    out.flagged_steps = static_cast<std::uint64_t>(flagged);
}

}  // namespace ambistop
