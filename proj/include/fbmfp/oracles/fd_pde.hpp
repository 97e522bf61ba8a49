#pragma once

#include "fbmfp/params.hpp"

#include <vector>

namespace fbmfp::oracles {

/// Finite-volume solver for u_t = (a t^{2v-1} x u)_xx - ((b x + c) u)_x on
/// [0, x_max] with zero flux at both ends.
///
/// Cells are graded quadratically towards x = 0. The interface flux is the
/// exponentially fitted (Scharfetter-Gummel type) form that is exact for the
/// local zero-flux profile x^{c/A - 1} e^{b x / A}. Time stepping is backward
/// Euler with step-doubling error control; the diffusion coefficient is
/// averaged over each step, so the run can start at t = 0 even when v < 1/2.
struct FdSolverConfig {
    double x_max = 0.0;    ///< 0 selects 8 max(center, E(t))
    int n_x = 400;
    double step_tolerance = 1e-7;  ///< L1 local error per step
    double initial_step = 1e-5;
    double max_step = 2e-2;
    int max_steps = 200000;
};

struct FdSolution {
    double t = 0.0;
    std::vector<double> edges;    ///< n_x + 1 cell edges, edges[0] = 0
    std::vector<double> centers;
    std::vector<double> u;        ///< cell averages
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double max_step_mass_drift = 0.0;
    int steps = 0;
    int rejected_steps = 0;
    double min_value = 0.0;
};

/// Runs from a normal bump (center, width) given as exact cell averages.
FdSolution fd_pde_solve(const FdSolverConfig& cfg, const FpkParams& params, double bump_center,
                        double bump_width, double t);

}  // namespace fbmfp::oracles
