#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ambistop/model.hpp"
#include "ambistop/solvers.hpp"

namespace ambistop {

enum class RightBoundary {
    // h(z_max) = g(z_max): the stop region contains a neighbourhood of infinity.
    Payoff,
    // h ~ z^{-psi} at z_max: continuation at infinity under the +kappa regime.
    Decay,
};

// Zero extents are filled in by default_grid.
struct GridSpec {
    double z_min = 0.0;
    double z_max = 0.0;
    int nodes = 4000;
    int max_iter = 500;
    RightBoundary right = RightBoundary::Payoff;
};

// z_min = 1e-4 / r, z_max = 50 max(1/r, z_bar).
GridSpec default_grid(const ModelParams& model, int nodes);

struct GridSolution {
    ModelParams model;
    std::string payoff_name;
    std::vector<double> z_nodes;
    std::vector<double> h_values;
    std::vector<double> active_theta;
    std::vector<std::uint8_t> stop_mask;
    int iterations = 0;
    // max over nodes of |min(h - g, -L h / |diag|)| / max |h|
    double residual = 0.0;
    // Largest increase of h between successive iterates after the first, relative to max |h|.
    double max_increase = 0.0;
};

GridSolution solve_obstacle(const ModelParams& model, const Payoff& payoff, const GridSpec& spec);

struct OracleComparison {
    double max_rel_error = 0.0;
    double worst_z = 0.0;
    int nodes_compared = 0;
    std::vector<double> analytic_boundaries;
    std::vector<double> oracle_boundaries;
    // Distance in grid cells from each analytic boundary to the nearest oracle one.
    std::vector<double> boundary_cells;
};

// Interior nodes only: 5 cells next to each end of the grid are excluded.
OracleComparison compare(const StoppingSolution& solution, const GridSolution& oracle);

void write_grid_csv(const GridSolution& oracle, std::ostream& os);

}  // namespace ambistop
