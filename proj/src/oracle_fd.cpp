#include "ambistop/oracle_fd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ambistop/error.hpp"
#include "ambistop/excessive.hpp"

namespace ambistop {

namespace {

constexpr int kEdgeCells = 5;
constexpr double kPolicyTol = 1e-11;

struct Row {
    double l, c, u;
};

// Row of 1/2 s^2 z^2 h'' + (1 - (mu - s theta) z) h' - (r - mu + s theta) h at an
// interior node: central differences where they keep an M-matrix, upwind otherwise.
Row interior_row(const ModelParams& m, double theta, double zm, double z, double zp)
{
    const double hm = z - zm, hp = zp - z, hs = hm + hp;
    const double a = 0.5 * m.sigma * m.sigma * z * z;
    const double b = 1.0 - (m.mu - m.sigma * theta) * z;
    const double rho = m.r - m.mu + m.sigma * theta;
    const double l2 = 2.0 / (hm * hs), u2 = 2.0 / (hp * hs);
    double l = a * l2 - b * hp / (hm * hs);
    double u = a * u2 + b * hm / (hp * hs);
    double c = -a * (l2 + u2) + b * (hp - hm) / (hm * hp);
    if (l < 0.0 || u < 0.0) {
        l = a * l2;
        u = a * u2;
        c = -a * (l2 + u2);
        if (b > 0.0) {
            u += b / hp;
            c -= b / hp;
        } else {
            l -= b / hm;
            c += b / hm;
        }
    }
    return {l, c - rho, u};
}

// Entrance end: no boundary data, the operator with the diffusion term
// dropped and a forward difference for h'.
Row left_row(const ModelParams& m, double theta, double z, double zp)
{
    const double b = 1.0 - (m.mu - m.sigma * theta) * z;
    const double rho = m.r - m.mu + m.sigma * theta;
    const double hp = zp - z;
    return {0.0, -b / hp - rho, b / hp};
}

double apply(const Row& row, const std::vector<double>& h, std::size_t i)
{
    double v = row.c * h[i];
    if (i > 0)
        v += row.l * h[i - 1];
    if (i + 1 < h.size())
        v += row.u * h[i + 1];
    return v;
}

double magnitude(const Row& row, const std::vector<double>& h, std::size_t i)
{
    double v = std::fabs(row.c * h[i]);
    if (i > 0)
        v += std::fabs(row.l * h[i - 1]);
    if (i + 1 < h.size())
        v += std::fabs(row.u * h[i + 1]);
    return v;
}

// Tridiagonal solve, overwriting rhs with the solution.
void thomas(std::vector<double>& lo, std::vector<double>& di, std::vector<double>& up, std::vector<double>& rhs)
{
    const std::size_t n = di.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lo[i] / di[i - 1];
        di[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

}  // namespace

GridSpec default_grid(const ModelParams& model, int nodes)
{
    GridSpec g;
    g.nodes = nodes;
    g.z_min = 1e-4 / model.r;
    g.z_max = 50.0 * std::max(1.0 / model.r, solve_zbar(model));
    return g;
}

namespace {

// Halving the node count down to this size gives warm starts for the policy.
constexpr int kCoarsestNodes = 400;

GridSolution solve_on_grid(const ModelParams& model, const Payoff& payoff, const GridSpec& spec, const GridSolution* warm);

}  // namespace

GridSolution solve_obstacle(const ModelParams& model, const Payoff& payoff, const GridSpec& spec_in)
{
    GridSpec spec = spec_in;
    if (spec.z_min == 0.0 || spec.z_max == 0.0) {
        const GridSpec d = default_grid(model, spec.nodes);
        if (spec.z_min == 0.0)
            spec.z_min = d.z_min;
        if (spec.z_max == 0.0)
            spec.z_max = d.z_max;
    }
    if (spec.nodes < 200 || !(spec.z_min > 0.0) || !(spec.z_max > spec.z_min) || !std::isfinite(spec.z_max)) {
        std::ostringstream os;
        os << "grid needs N >= 200 and 0 < z_min < z_max; got N = " << spec.nodes << ", [" << spec.z_min << ", "
           << spec.z_max << "]";
        fail(ErrorCode::BadGrid, os.str());
    }

    // Howard iteration moves a free boundary about one cell per solve, so the
    // policy is carried up from successively coarser grids.
    std::vector<int> sizes = {spec.nodes};
    while (sizes.back() > 2 * kCoarsestNodes)
        sizes.push_back(sizes.back() / 2);
    GridSolution warm;
    for (std::size_t lvl = sizes.size(); lvl-- > 0;) {
        GridSpec level = spec;
        level.nodes = sizes[lvl];
        GridSolution next = solve_on_grid(model, payoff, level, lvl + 1 == sizes.size() ? nullptr : &warm);
        warm = std::move(next);
    }
    return warm;
}

namespace {

GridSolution solve_on_grid(const ModelParams& model, const Payoff& payoff, const GridSpec& spec, const GridSolution* warm)
{
    const std::size_t n = static_cast<std::size_t>(spec.nodes);
    GridSolution out;
    out.model = model;
    out.payoff_name = payoff.name();
    out.z_nodes.resize(n);
    const double la = std::log(spec.z_min), lb = std::log(spec.z_max);
    for (std::size_t i = 0; i < n; ++i)
        out.z_nodes[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.z_nodes.back() = spec.z_max;
    const std::vector<double>& z = out.z_nodes;

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = payoff.profile(z[i]);

    // Rows for both generators; index 0 is +kappa, 1 is -kappa.
    const double k = model.kappa;
    std::vector<Row> rows[2];
    for (int s = 0; s < 2; ++s) {
        const double theta = s == 0 ? k : -k;
        rows[s].resize(n);
        rows[s][0] = left_row(model, theta, z[0], z[1]);
        for (std::size_t i = 1; i + 1 < n; ++i)
            rows[s][i] = interior_row(model, theta, z[i - 1], z[i], z[i + 1]);
    }
    double decay = 0.0;
    if (spec.right == RightBoundary::Decay) {
        const double psi = characteristic_roots(model, DriftSign::PlusKappa).psi;
        decay = std::pow(z[n - 1] / z[n - 2], -psi);
    }

    std::vector<double> h = g;
    if (spec.right == RightBoundary::Decay)
        h[n - 1] = decay * h[n - 2];
    std::vector<int> pol_theta(n, 0);
    std::vector<std::uint8_t> pol_stop(n, 0);
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    std::vector<double> prev_outer;
    if (warm) {
        const std::vector<double>& wz = warm->z_nodes;
        std::size_t j = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            while (j + 1 < wz.size() && std::fabs(std::log(wz[j + 1] / z[i])) <= std::fabs(std::log(wz[j] / z[i])))
                ++j;
            pol_stop[i] = warm->stop_mask[j];
            pol_theta[i] = warm->active_theta[j] == k ? 0 : 1;
        }
    }

    // Stop decision for fixed theta, switching only on a margin above rounding noise.
    auto update_stop = [&]() {
        bool changed = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const Row& row = rows[pol_theta[i]][i];
            const double tol = kPolicyTol * magnitude(row, h, i);
            const double cont = -apply(row, h, i);
            const double gap = h[i] - g[i];
            std::uint8_t st = pol_stop[i];
            if (st && cont < gap - tol)
                st = 0;
            else if (!st && gap < cont - tol)
                st = 1;
            changed = changed || st != pol_stop[i];
            pol_stop[i] = st;
        }
        return changed;
    };
    auto update_theta = [&]() {
        bool changed = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double tol = kPolicyTol * magnitude(rows[0][i], h, i);
            const double lp = apply(rows[0][i], h, i), lm = apply(rows[1][i], h, i);
            int th = pol_theta[i];
            if (th == 0 && lm < lp - tol)
                th = 1;
            else if (th == 1 && lp < lm - tol)
                th = 0;
            changed = changed || th != pol_theta[i];
            pol_theta[i] = th;
        }
        return changed;
    };
    auto linear_solve = [&]() {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (pol_stop[i]) {
                lo[i] = 0.0;
                di[i] = 1.0;
                up[i] = 0.0;
                rhs[i] = g[i];
            } else {
                const Row& r = rows[pol_theta[i]][i];
                lo[i] = r.l;
                di[i] = r.c;
                up[i] = r.u;
                rhs[i] = 0.0;
            }
        }
        if (spec.right == RightBoundary::Payoff) {
            lo[n - 1] = 0.0;
            rhs[n - 1] = g[n - 1];
        } else {
            lo[n - 1] = -decay;
            rhs[n - 1] = 0.0;
        }
        di[n - 1] = 1.0;
        up[n - 1] = 0.0;
        pol_stop[n - 1] = spec.right == RightBoundary::Payoff ? 1 : 0;
        thomas(lo, di, up, rhs);
        h.swap(rhs);
    };

    int it = 0;
    for (;;) {
        // Inner Howard iteration on the stopping policy.
        do {
            if (++it > spec.max_iter) {
                std::ostringstream os;
                os << "policy iteration did not settle within " << spec.max_iter << " linear solves";
                fail(ErrorCode::NoConvergence, os.str());
            }
            linear_solve();
        } while (update_stop());
        if (!prev_outer.empty()) {
            double hmax = 0.0, inc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                hmax = std::max(hmax, std::fabs(h[i]));
                inc = std::max(inc, h[i] - prev_outer[i]);
            }
            out.max_increase = std::max(out.max_increase, inc / hmax);
        }
        prev_outer = h;
        if (k == 0.0 || !update_theta())
            break;
    }
    out.iterations = it;

    double hmax = 0.0, res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        hmax = std::max(hmax, std::fabs(h[i]));
    out.active_theta.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double lp = apply(rows[0][i], h, i), lm = apply(rows[1][i], h, i);
        const int s = lm < lp ? 1 : 0;
        out.active_theta[i] = s == 0 ? k : -k;
        const double lv = s == 0 ? lp : lm;
        const double scaled = -lv / std::fabs(rows[s][i].c);
        res = std::max(res, std::fabs(std::min(h[i] - g[i], scaled)));
    }
    out.active_theta[n - 1] = out.active_theta[n - 2];
    out.residual = res / hmax;
    out.h_values = std::move(h);
    out.stop_mask = std::move(pol_stop);
    return out;
}

}  // namespace

OracleComparison compare(const StoppingSolution& solution, const GridSolution& oracle)
{
    if (!same_model(solution.model, oracle.model) || solution.payoff.name() != oracle.payoff_name)
        fail(ErrorCode::MismatchedModel, "oracle and analytic solution were built for different inputs");
    OracleComparison out;
    const std::vector<double>& z = oracle.z_nodes;
    const std::size_t n = z.size();
    for (std::size_t i = kEdgeCells; i + kEdgeCells < n; ++i) {
        const double v = value(solution, 1.0, z[i]);
        const double e = std::fabs(oracle.h_values[i] - v) / std::fabs(v);
        ++out.nodes_compared;
        if (e > out.max_rel_error) {
            out.max_rel_error = e;
            out.worst_z = z[i];
        }
    }
    switch (solution.regime) {
    case Regime::LowerBoundary:
    case Regime::UpperBoundary: out.analytic_boundaries = {solution.z_star}; break;
    case Regime::TwoSided: out.analytic_boundaries = {solution.z1, solution.z2}; break;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (oracle.stop_mask[i] != oracle.stop_mask[i - 1])
            out.oracle_boundaries.push_back(std::sqrt(z[i] * z[i - 1]));
    }
    const double cell = std::log(z[1] / z[0]);
    for (double b : out.analytic_boundaries) {
        double best = INFINITY;
        for (double o : out.oracle_boundaries)
            best = std::min(best, std::fabs(std::log(o / b)) / cell);
        out.boundary_cells.push_back(best);
    }
    return out;
}

void write_grid_csv(const GridSolution& oracle, std::ostream& os)
{
    os << "z,h,theta,stop\n";
    os << std::setprecision(12);
    for (std::size_t i = 0; i < oracle.z_nodes.size(); ++i)
        os << oracle.z_nodes[i] << ',' << oracle.h_values[i] << ',' << oracle.active_theta[i] << ','
           << static_cast<int>(oracle.stop_mask[i]) << '\n';
}

}  // namespace ambistop
