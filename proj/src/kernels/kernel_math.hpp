#pragma once

#include <cmath>
#include <cstdint>

#include "ambistop/kernels.hpp"

namespace ambistop::kernel {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

// Steps advance in batches of this many Philox blocks.
constexpr int kBlocks = 4;
constexpr int kSteps = 2 * kBlocks;

constexpr double kTwo26 = 67108864.0;
constexpr double kTwoM53 = 1.0 / 9007199254740992.0;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kHalfPi = 1.5707963267948966;

// 2 atanh(s) = 2 s sum_k s^{2k} / (2k + 1)
constexpr int kLogTerms = 12;
constexpr double log_coef(int k) { return 1.0 / (2 * k + 1); }

constexpr double inv_factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return 1.0 / f;
}

// sin(x) = x sum_k S_k x^{2k}, cos(x) = sum_k C_k x^{2k} on [0, pi/4].
constexpr int kTrigTerms = 9;
constexpr double sin_coef(int k) { return (k % 2 ? -1.0 : 1.0) * inv_factorial(2 * k + 1); }
constexpr double cos_coef(int k) { return (k % 2 ? -1.0 : 1.0) * inv_factorial(2 * k); }

struct StepConsts {
    double mux;
    double muz;
    double sig;
    double dt;
    double sqdt;
};

inline StepConsts step_consts(const PathParams& p)
{
    return {p.mu - 0.5 * p.sigma * p.sigma, p.mu - p.sigma * p.sigma, p.sigma, p.dt, std::sqrt(p.dt)};
}

}  // namespace ambistop::kernel
