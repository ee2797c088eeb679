#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "ambistop/error.hpp"

namespace ambistop::detail {

// Root of f on [lo, hi] given values of opposite sign at the ends.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double flo, double fhi, double rel_width, const char* what)
{
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        std::ostringstream os;
        os << what << ": no sign change on [" << lo << ", " << hi << "] (values " << flo << ", " << fhi << ")";
        fail(ErrorCode::BracketFailure, os.str());
    }
    auto tol = [rel_width](double a, double b) {
        return std::fabs(a - b) <= rel_width * std::fmax(1.0, std::fmin(std::fabs(a), std::fabs(b)));
    };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

// Expands hi geometrically from start until f changes sign relative to f(start).
template <class F>
double expand_until_sign_change(F&& f, double start, double f_start, double factor, int max_steps, double& hi_value, const char* what)
{
    double z = start;
    for (int i = 0; i < max_steps; ++i) {
        z *= factor;
        const double v = f(z);
        if ((v < 0.0) != (f_start < 0.0) || v == 0.0) {
            hi_value = v;
            return z;
        }
    }
    std::ostringstream os;
    os << what << ": no sign change on [" << start << ", " << z << "]";
    fail(ErrorCode::BracketFailure, os.str());
}

}  // namespace ambistop::detail
