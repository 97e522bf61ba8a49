#pragma once

#include "fbmfp/laplace_domain.hpp"

#include <vector>

namespace fbmfp {

struct FluxSolverConfig {
    /// Lavrentiev shift added to the diagonal of the collocation system.
    double lavrentiev_shift = 0.0;
    /// Nodes where |g(t)| is below this are solved as f = 0 without
    /// requiring c / (a t^{2v-1}) < 1 there.
    double negligible_rhs = 1e-14;
};

struct FluxDiagnostics {
    double lavrentiev_shift = 0.0;
    int negligible_nodes = 0;           ///< nodes solved as f = 0 (see negligible_rhs)
    double max_exponent = 0.0;          ///< max of c / (a t^{2v-1}) over the active nodes
    double min_diagonal = 0.0;          ///< smallest collocation diagonal weight
    double max_weight_ratio = 0.0;      ///< max row weight / diagonal, a conditioning proxy
};

/// Boundary flux f(t) on a time grid. Internally f is piecewise constant on
/// the grid cells (product midpoint collocation); nodal values are linear
/// interpolants of the cell values.
class FluxFunction {
public:
    FluxFunction(std::vector<double> grid, std::vector<double> cell_values,
                 std::vector<double> rhs, std::vector<std::vector<double>> kernel_exponent,
                 FluxDiagnostics diagnostics);

    const std::vector<double>& grid() const { return grid_; }
    /// f at the grid nodes.
    const std::vector<double>& values() const { return values_; }
    /// f on cell [t_j, t_{j+1}].
    const std::vector<double>& cell_values() const { return cells_; }
    /// g(t_i) at each node.
    const std::vector<double>& rhs() const { return rhs_; }
    /// Row i: int_0^tau c / Delta(mu, t_i) dmu at the midpoints tau of cells j < i.
    const std::vector<std::vector<double>>& kernel_exponent() const { return kernel_exponent_; }
    const FluxDiagnostics& diagnostics() const { return diagnostics_; }

    double t_max() const { return grid_.back(); }
    /// Piecewise-constant value at time tau in [0, t_max].
    double operator()(double tau) const;

private:
    std::vector<double> grid_;
    std::vector<double> cells_;
    std::vector<double> values_;
    std::vector<double> rhs_;
    std::vector<std::vector<double>> kernel_exponent_;
    FluxDiagnostics diagnostics_;
};

/// Uniform grid of n intervals on [0, t_max].
std::vector<double> uniform_time_grid(double t_max, int n);

/// Solve int_0^t K(t, tau) f(tau) dtau = -g(t) at every grid node, where
/// K(t, tau) = exp(int_0^tau c / Delta(mu, t) dmu) and g(t) = pi(-1/Psi(t)).
/// The kernel is weakly singular like (t - tau)^{-c/(a t^{2v-1})}; the last
/// cell of each row is integrated with that weight factored out.
FluxFunction solve_flux(const std::vector<double>& t_grid, const InitialDistribution& init,
                        const FpkParams& params, const FluxSolverConfig& cfg = {});

/// |int_0^t K(t, tau) f(tau) dtau + g(t)| evaluated by a quadrature independent
/// of the collocation weights used in solve_flux.
double flux_condition_residual(const FluxFunction& flux, double t, const InitialDistribution& init,
                       const FpkParams& params);

}  // namespace fbmfp
