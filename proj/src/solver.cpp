#include "fbmfp/solver.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace fbmfp {

BoundaryMode parse_boundary_mode(const std::string& name) {
    if (name == "reflecting") return BoundaryMode::reflecting;
    if (name == "flux") return BoundaryMode::flux;
    throw DomainError("unknown mode '" + name + "' (expected reflecting or flux)");
}

std::string to_string(BoundaryMode m) {
    return m == BoundaryMode::reflecting ? "reflecting" : "flux";
}

std::vector<double> geometric_grid(double x_min, double x_max, int n) {
    if (!(x_min > 0.0) || !(x_max >= x_min) || n < 1)
        throw DomainError("grid needs 0 < x_min <= x_max and n >= 1");
    if (n == 1) return {x_min};
    if (x_max == x_min) throw DomainError("grid with n > 1 needs x_min < x_max");
    std::vector<double> g(static_cast<std::size_t>(n));
    const double ratio = std::log(x_max / x_min) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = x_min * std::exp(ratio * i);
    g.front() = x_min;
    g.back() = x_max;
    return g;
}

std::vector<double> default_x_grid(double t, const InitialDistribution& init,
                                   const FpkParams& params, int n) {
    const double xi = init.location();
    const double mean = params.mean(xi, t);
    return geometric_grid(xi / 50.0, 8.0 * std::max(xi, mean), n);
}

cplx DensityTransform::operator()(cplx s) const {
    return omega(t, s, *init, flux, params, laplace).omega - atom;
}

namespace {

// Thread-safe memo of real-axis transform values.
class RealCache {
public:
    explicit RealCache(const DensityTransform& f) : f_(f) {}
    cplx operator()(cplx s) {
        if (s.imag() != 0.0) return f_(s);
        {
            std::lock_guard<std::mutex> lock(m_);
            auto it = values_.find(s.real());
            if (it != values_.end()) return it->second;
        }
        const cplx v = f_(s);
        std::lock_guard<std::mutex> lock(m_);
        values_.emplace(s.real(), v);
        return v;
    }

private:
    const DensityTransform& f_;
    std::mutex m_;
    std::map<double, cplx> values_;
};

double origin_atom(double t, const InitialDistribution& init, BoundaryMode mode,
                   const FpkParams& params) {
    if (mode == BoundaryMode::reflecting && params.c == 0.0) return boundary_limit(t, init, params);
    return 0.0;
}

}  // namespace

DensityCurve density_curve(double t, const std::vector<double>& x_grid,
                           const InitialDistribution& init, BoundaryMode mode,
                           const FpkParams& params, const InversionConfig& inv_in,
                           const SolverOptions& opts) {
    params.validate();
    inv_in.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("density_curve requires t > 0");
    if (x_grid.empty()) throw DomainError("density_curve requires a non-empty x grid");
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (!(x_grid[i] > 0.0) || !std::isfinite(x_grid[i]))
            throw DomainError("x grid must be positive and finite");
        if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
            throw DomainError("x grid must be strictly increasing");
    }
    if (mode == BoundaryMode::reflecting && params.c < 0.0)
        throw DomainError("reflecting mode with c < 0 does not yield an integrable density");

    // Below 1e-10 of a unit mass spread over the typical location, contour
    // sums need not agree in relative terms.
    InversionConfig inv = inv_in;
    if (inv.absolute_tolerance == 0.0)
        inv.absolute_tolerance = 1e-10 / std::max(init.location(), params.mean(init.location(), t));

    DensityCurve curve;
    curve.t = t;
    curve.xi = init.location();
    curve.mode = mode;
    curve.x_grid = x_grid;
    const std::size_t n = x_grid.size();
    curve.u.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.discrepancy.assign(n, 0.0);
    curve.flags.assign(n, {});

    std::optional<FluxFunction> flux;
    if (mode == BoundaryMode::flux) {
        flux = solve_flux(uniform_time_grid(t, opts.flux_nodes), init, params, opts.flux);
        curve.diagnostics.flux = flux->diagnostics();
    }

    DensityTransform transform{t, &init, flux ? &*flux : nullptr, params, opts.laplace,
                               origin_atom(t, init, mode, params)};
    curve.diagnostics.origin_mass = transform.atom;
    RealCache cached(transform);

    parallel_for(
        n,
        [&](std::size_t i) {
            try {
                const auto res = invert([&](cplx s) { return cached(s); }, x_grid[i], inv);
                curve.u[i] = res.value;
                curve.discrepancy[i] = res.discrepancy;
                curve.flags[i] = res.flags;
            } catch (const Error& e) {
                curve.flags[i] = {"failed:" + e.reason()};
            }
        },
        opts.threads);

    auto& d = curve.diagnostics;
    d.peak = 0.0;
    d.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(curve.u[i])) {
            ++d.failed_points;
            continue;
        }
        d.peak = std::max(d.peak, curve.u[i]);
        d.min_value = std::min(d.min_value, curve.u[i]);
        if (!curve.flags[i].empty()) ++d.flagged_points;
    }
    if (d.failed_points == static_cast<int>(n)) d.min_value = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(curve.u[i])) continue;
        if (curve.u[i] < -1e-6 * d.peak) ++d.negative_points;
        if (curve.u[i] > 1e-3 * d.peak) d.max_discrepancy = std::max(d.max_discrepancy, curve.discrepancy[i]);
    }

    // Normalization: trapezoid over valid neighbours.
    for (std::size_t i = 1; i < n; ++i)
        if (!std::isnan(curve.u[i]) && !std::isnan(curve.u[i - 1]))
            d.trapezoid += 0.5 * (curve.u[i] + curve.u[i - 1]) * (x_grid[i] - x_grid[i - 1]);
    // Mass on (0, x_min) from the cumulative transform (omega - atom) / s.
    try {
        d.below_grid_mass = invert_talbot([&](cplx s) { return transform(s) / s; }, x_grid[0],
                                          inv.talbot_nodes, inv.absolute_tolerance);
    } catch (const Error&) {
        d.below_grid_mass = std::numeric_limits<double>::quiet_NaN();
    }
    d.normalization = d.trapezoid + d.below_grid_mass + d.origin_mass;

    if (n >= 3 && !std::isnan(curve.u[0]) && !std::isnan(curve.u[1]) && !std::isnan(curve.u[2])) {
        const double x0 = x_grid[0], x1 = x_grid[1], x2 = x_grid[2];
        const double l0 = x1 * x2 / ((x0 - x1) * (x0 - x2));
        const double l1 = x0 * x2 / ((x1 - x0) * (x1 - x2));
        const double l2 = x0 * x1 / ((x2 - x0) * (x2 - x1));
        d.boundary_extrapolation = l0 * curve.u[0] + l1 * curve.u[1] + l2 * curve.u[2];
    } else {
        d.boundary_extrapolation = std::isnan(curve.u[0]) ? std::numeric_limits<double>::quiet_NaN()
                                                          : curve.u[0];
    }
    return curve;
}

double density_at(double t, double x, const InitialDistribution& init, const FpkParams& params,
                  const InversionConfig& inv, const LaplaceOptions& laplace) {
    const auto curve = density_curve(t, {x}, init, BoundaryMode::reflecting, params, inv,
                                     SolverOptions{laplace, 64, {}, 1});
    if (std::isnan(curve.u[0])) throw InversionError("density inversion failed: " + curve.flags[0][0]);
    return curve.u[0];
}

double distribution_at(double t, double x, const InitialDistribution& init,
                       const FpkParams& params, const LaplaceOptions& laplace, int talbot_nodes) {
    params.validate();
    if (!(x > 0.0)) return 0.0;
    return invert_talbot([&](cplx s) { return omega(t, s, init, nullptr, params, laplace).omega / s; },
                         x, talbot_nodes);
}

double extrapolate_to_origin(double t, const InitialDistribution& init, const FpkParams& params,
                             double x0, const InversionConfig& inv) {
    constexpr int kLevels = 4;
    std::vector<double> xs(kLevels);
    for (int k = 0; k < kLevels; ++k) xs[static_cast<std::size_t>(k)] = x0 / std::pow(2.0, kLevels - 1 - k);
    const auto curve = density_curve(t, xs, init, BoundaryMode::reflecting, params, inv);
    // Neville table for the polynomial through (x_k, u_k) evaluated at 0.
    std::vector<double> p(curve.u);
    for (std::size_t k = 0; k < p.size(); ++k)
        if (std::isnan(p[k])) throw InversionError("boundary extrapolation hit a failed point");
    for (std::size_t m = 1; m < p.size(); ++m)
        for (std::size_t k = 0; k + m < p.size(); ++k)
            p[k] = (xs[k + m] * p[k] - xs[k] * p[k + 1]) / (xs[k + m] - xs[k]);
    return p[0];
}

MomentReport moment_check(const DensityCurve& curve, const FpkParams& params) {
    if (curve.mode != BoundaryMode::reflecting)
        throw DomainError("moment_check is only defined in reflecting mode");
    MomentReport r;
    const auto& x = curve.x_grid;
    const auto& u = curve.u;
    const double x_edge = x.front() + 0.95 * (x.back() - x.front());
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (std::isnan(u[i]) || std::isnan(u[i - 1])) continue;
        const double dx = x[i] - x[i - 1];
        r.computed += 0.5 * (x[i] * u[i] + x[i - 1] * u[i - 1]) * dx;
        if (x[i - 1] >= x_edge) r.edge_mass += 0.5 * (u[i] + u[i - 1]) * dx;
    }
    r.expected = params.mean(curve.xi, curve.t);
    r.relative_deviation = std::abs(r.computed - r.expected) / std::abs(r.expected);
    r.edge_warning = r.edge_mass > 1e-3;
    return r;
}

}  // namespace fbmfp
