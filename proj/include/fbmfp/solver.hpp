#pragma once

#include "fbmfp/flux.hpp"
#include "fbmfp/inversion.hpp"
#include "fbmfp/laplace_domain.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbmfp {

enum class BoundaryMode { reflecting, flux };

BoundaryMode parse_boundary_mode(const std::string& name);
std::string to_string(BoundaryMode m);

struct SolverOptions {
    LaplaceOptions laplace;
    int flux_nodes = 64;  ///< uniform flux grid on [0, t] in flux mode
    FluxSolverConfig flux;
    unsigned threads = 0;  ///< 0 = default_thread_count()
};

struct DensityDiagnostics {
    double normalization = 0.0;     ///< trapezoid + below-grid mass + origin atom
    double trapezoid = 0.0;         ///< trapezoid integral over the grid
    double below_grid_mass = 0.0;   ///< int_0^{x_min} u, by inverting the transform divided by s
    double origin_mass = 0.0;       ///< atom at x = 0 (reflecting, c = 0)
    double min_value = 0.0;
    double peak = 0.0;
    double boundary_extrapolation = 0.0;  ///< quadratic extrapolation of u to x = 0
    double max_discrepancy = 0.0;   ///< over points where u > 1e-3 peak
    int failed_points = 0;
    int flagged_points = 0;
    int negative_points = 0;        ///< u < -1e-6 peak
    std::optional<FluxDiagnostics> flux;
};

/// Recovered density u(t, x) on an x-grid.
struct DensityCurve {
    double t = 0.0;
    double xi = 0.0;  ///< location of the initial data
    BoundaryMode mode = BoundaryMode::reflecting;
    std::vector<double> x_grid;
    std::vector<double> u;  ///< NaN at failed points
    std::vector<double> discrepancy;
    std::vector<std::vector<std::string>> flags;  ///< "failed:<reason>" marks failures
    DensityDiagnostics diagnostics;
};

/// Geometric grid over [xi/50, 8 max(xi, E(t))].
std::vector<double> default_x_grid(double t, const InitialDistribution& init,
                                   const FpkParams& params, int n = 256);

std::vector<double> geometric_grid(double x_min, double x_max, int n);

/// Laplace transform in x of the density at time t, minus the atom at the
/// origin when one is present (reflecting mode with c = 0).
struct DensityTransform {
    double t;
    const InitialDistribution* init;
    const FluxFunction* flux;
    FpkParams params;
    LaplaceOptions laplace;
    double atom = 0.0;

    cplx operator()(cplx s) const;
};

DensityCurve density_curve(double t, const std::vector<double>& x_grid,
                           const InitialDistribution& init, BoundaryMode mode,
                           const FpkParams& params, const InversionConfig& inv,
                           const SolverOptions& opts = {});

/// u(t, x) at a single point (reflecting mode), atom removed.
double density_at(double t, double x, const InitialDistribution& init, const FpkParams& params,
                  const InversionConfig& inv = {}, const LaplaceOptions& laplace = {});

/// Cumulative distribution P(X_t <= x) in reflecting mode, from inverting
/// omega / s (the atom at the origin, if any, is included).
double distribution_at(double t, double x, const InitialDistribution& init,
                       const FpkParams& params, const LaplaceOptions& laplace = {},
                       int talbot_nodes = 48);

/// Richardson extrapolation of u(t, x) to x -> 0 from x0, x0/2, x0/4, x0/8.
double extrapolate_to_origin(double t, const InitialDistribution& init, const FpkParams& params,
                             double x0 = 1e-2, const InversionConfig& inv = {});

struct MomentReport {
    double computed = 0.0;
    double expected = 0.0;
    double relative_deviation = 0.0;
    double edge_mass = 0.0;  ///< mass estimate in the last 5% of the grid
    bool edge_warning = false;
};

/// Compares int x u dx with xi e^{bt} + (c/b)(e^{bt} - 1) (xi + ct at b = 0).
MomentReport moment_check(const DensityCurve& curve, const FpkParams& params);

}  // namespace fbmfp
