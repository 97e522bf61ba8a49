#include "fbmfp/flux.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbmfp {

FluxFunction::FluxFunction(std::vector<double> grid, std::vector<double> cell_values,
                           std::vector<double> rhs,
                           std::vector<std::vector<double>> kernel_exponent,
                           FluxDiagnostics diagnostics)
    : grid_(std::move(grid)),
      cells_(std::move(cell_values)),
      rhs_(std::move(rhs)),
      kernel_exponent_(std::move(kernel_exponent)),
      diagnostics_(diagnostics) {
    if (grid_.size() < 2 || cells_.size() + 1 != grid_.size())
        throw DomainError("flux function needs one cell value per grid interval");
    const std::size_t n = cells_.size();
    values_.assign(grid_.size(), 0.0);
    auto mid = [&](std::size_t j) { return 0.5 * (grid_[j] + grid_[j + 1]); };
    for (std::size_t i = 1; i < n; ++i) {
        const double w = (grid_[i] - mid(i - 1)) / (mid(i) - mid(i - 1));
        values_[i] = (1.0 - w) * cells_[i - 1] + w * cells_[i];
    }
    if (n == 1) {
        values_[0] = values_[1] = cells_[0];
    } else {
        auto extrapolate = [&](std::size_t j0, double x) {
            const double slope = (cells_[j0 + 1] - cells_[j0]) / (mid(j0 + 1) - mid(j0));
            return cells_[j0] + slope * (x - mid(j0));
        };
        values_[0] = extrapolate(0, grid_[0]);
        values_[n] = extrapolate(n - 2, grid_[n]);
    }
}

double FluxFunction::operator()(double tau) const {
    if (tau < grid_.front() || tau > grid_.back()) throw DomainError("flux evaluated outside its grid");
    auto it = std::upper_bound(grid_.begin(), grid_.end(), tau);
    std::size_t j = static_cast<std::size_t>(it - grid_.begin());
    j = j == 0 ? 0 : std::min(j - 1, cells_.size() - 1);
    return cells_[j];
}

std::vector<double> uniform_time_grid(double t_max, int n) {
    if (!(t_max > 0.0) || n < 1) throw DomainError("time grid needs t_max > 0 and n >= 1");
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = t_max * i / n;
    g.back() = t_max;
    return g;
}

namespace {

constexpr int kNodes = 16;
using Rule = boost::math::quadrature::gauss<double, kNodes>;

// Full set of 16 Gauss-Legendre abscissae on [-1, 1], ascending.
std::array<std::pair<double, double>, kNodes> gl_rule() {
    std::array<std::pair<double, double>, kNodes> out{};
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    std::size_t k = 0;
    for (std::size_t i = x.size(); i-- > 0;) out[k++] = {-x[i], w[i]};
    for (std::size_t i = 0; i < x.size(); ++i) out[k++] = {x[i], w[i]};
    return out;
}

void check_grid(const std::vector<double>& g) {
    if (g.size() < 2 || g.front() != 0.0) throw DomainError("flux grid must start at 0 with >= 2 nodes");
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw DomainError("flux grid must be strictly increasing");
}

}  // namespace

FluxFunction solve_flux(const std::vector<double>& t_grid, const InitialDistribution& init,
                        const FpkParams& params, const FluxSolverConfig& cfg) {
    params.validate();
    check_grid(t_grid);
    if (cfg.lavrentiev_shift < 0.0) throw DomainError("Lavrentiev shift must be >= 0");

    const std::size_t n = t_grid.size() - 1;
    const double c = params.c;
    static const auto rule = gl_rule();

    std::vector<double> cells(n, 0.0);
    std::vector<double> rhs(n + 1, 0.0);
    std::vector<std::vector<double>> exponents(n + 1);
    FluxDiagnostics diag;
    diag.lavrentiev_shift = cfg.lavrentiev_shift;
    diag.min_diagonal = std::numeric_limits<double>::infinity();

    quad::Options inner;
    inner.abs_tol = 1e-14;
    inner.rel_tol = 1e-13;

    for (std::size_t i = 1; i <= n; ++i) {
        const double t = t_grid[i];
        rhs[i] = flux_rhs(t, init, params);
        const double alpha = params.boundary_exponent(t);
        if (alpha >= 1.0) {
            if (std::abs(rhs[i]) < cfg.negligible_rhs) {
                ++diag.negligible_nodes;
                cells[i - 1] = 0.0;
                exponents[i].assign(i, std::numeric_limits<double>::infinity());
                continue;
            }
            std::ostringstream msg;
            msg << "flux kernel not integrable at t = " << t << ": c/(a t^{2v-1}) = " << alpha
                << " >= 1";
            throw NonIntegrableKernelError(msg.str());
        }
        diag.max_exponent = std::max(diag.max_exponent, alpha);

        const KernelContext ctx(params, t);
        // Regular part of the exponent: c/Delta(mu, t) - alpha/(t - mu), bounded on [0, t].
        auto regular = [&](double mu) {
            const double gap = t - mu;
            if (gap <= 0.0) return 0.0;
            return c / ctx.delta_gap(gap) - alpha / gap;
        };

        // Collect the tau points (cell midpoints and quadrature nodes) in increasing order.
        const double p = 1.0 - alpha;
        struct Node {
            double tau;
            double weight;  // includes the 1/(1 - alpha) Jacobian; 0 for midpoints
            std::size_t cell;
        };
        std::vector<Node> nodes;
        nodes.reserve(i * (kNodes + 1));
        for (std::size_t j = 0; j < i; ++j) {
            const double w_hi = std::pow(t - t_grid[j], p);
            const double w_lo = std::pow(t - t_grid[j + 1], p);
            const double half = 0.5 * (w_hi - w_lo);
            const double center = 0.5 * (w_hi + w_lo);
            // Ascending tau means descending w.
            for (std::size_t k = kNodes; k-- > 0;) {
                const double w = center + half * rule[k].first;
                nodes.push_back({t - std::pow(w, 1.0 / p), rule[k].second * half / p, j});
            }
            nodes.push_back({0.5 * (t_grid[j] + t_grid[j + 1]), 0.0, j});
        }
        std::stable_sort(nodes.begin(), nodes.end(),
                         [](const Node& x, const Node& y) { return x.tau < y.tau; });

        std::vector<double> weights(i, 0.0);
        exponents[i].assign(i, 0.0);
        double regular_integral = 0.0;
        double prev = 0.0;
        const double log_t = std::log(t);
        for (const auto& nd : nodes) {
            if (c != 0.0 && nd.tau > prev) {
                regular_integral += quad::integrate(regular, prev, nd.tau, inner).value;
                prev = nd.tau;
            }
            const double log_sing = alpha * (log_t - std::log(t - nd.tau));
            if (nd.weight == 0.0) {
                exponents[i][nd.cell] = log_sing + regular_integral;
            } else {
                weights[nd.cell] += nd.weight * std::exp(alpha * log_t + regular_integral);
            }
        }

        double acc = -rhs[i];
        double row_max = 0.0;
        for (std::size_t j = 0; j + 1 < i; ++j) {
            acc -= weights[j] * cells[j];
            row_max = std::max(row_max, weights[j]);
        }
        const double diagw = weights[i - 1] + cfg.lavrentiev_shift;
        if (!(diagw > 0.0) || !std::isfinite(diagw)) {
            std::ostringstream msg;
            msg << "flux collocation diagonal degenerate at t = " << t << " (" << diagw << ")";
            throw IllConditionedError(msg.str());
        }
        diag.min_diagonal = std::min(diag.min_diagonal, diagw);
        diag.max_weight_ratio = std::max(diag.max_weight_ratio, row_max / diagw);
        cells[i - 1] = acc / diagw;
    }
    if (!std::isfinite(diag.min_diagonal)) diag.min_diagonal = 0.0;
    return FluxFunction(t_grid, std::move(cells), std::move(rhs), std::move(exponents), diag);
}

double flux_condition_residual(const FluxFunction& flux, double t, const InitialDistribution& init,
                       const FpkParams& params) {
    params.validate();
    const auto& grid = flux.grid();
    if (t < 0.0 || t > grid.back() * (1.0 + 1e-12))
        throw DomainError("flux_condition_residual: t outside the flux grid");
    if (t == 0.0) return 0.0;

    const double g = flux_rhs(t, init, params);
    const double c = params.c;
    const double alpha = params.boundary_exponent(t);
    const KernelContext ctx(params, t);

    quad::Options inner;
    inner.abs_tol = 1e-13;
    inner.rel_tol = 1e-12;
    quad::Options outer;
    outer.abs_tol = 1e-12;
    outer.rel_tol = 1e-11;

    // int_{tau0}^{tau1} c / Delta(mu, t) dmu in the variable y = ln(t - mu), where the
    // integrand c e^y / Delta tends to alpha as y -> -inf.
    auto exponent_increment = [&](double gap1, double gap0) {
        if (c == 0.0 || gap1 == gap0) return 0.0;
        return quad::integrate(
                   [&](double y) {
                       const double gap = std::exp(y);
                       return c * gap / ctx.delta_gap(gap);
                   },
                   std::log(gap1), std::log(gap0), inner)
            .value;
    };

    double lhs = 0.0;
    double e_start = 0.0;  // exponent at the start of the current cell
    for (std::size_t j = 0; j + 1 < grid.size() && grid[j] < t; ++j) {
        const double lo = grid[j];
        const double hi = std::min(grid[j + 1], t);
        const double fj = flux.cell_values()[j];
        const double gap_lo = t - lo;
        if (hi < t) {
            if (fj != 0.0) {
                const double w = quad::integrate(
                                     [&](double tau) {
                                         return std::exp(e_start +
                                                         exponent_increment(t - tau, gap_lo));
                                     },
                                     lo, hi, outer)
                                     .value;
                lhs += fj * w;
            }
            e_start += exponent_increment(t - hi, gap_lo);
        } else {
            if (fj != 0.0) {
                if (alpha >= 1.0) throw NonIntegrableKernelError("flux_condition_residual: kernel not integrable");
                // tau = t - u^{1/(1-alpha)}; Jacobian (t - tau)^alpha / (1 - alpha).
                const double p = 1.0 - alpha;
                const double w = quad::integrate(
                                     [&](double u) {
                                         if (u <= 0.0) return 0.0;
                                         const double gap = std::pow(u, 1.0 / p);
                                         const double e = e_start + exponent_increment(gap, gap_lo);
                                         return std::exp(e + alpha * std::log(gap)) / p;
                                     },
                                     0.0, std::pow(gap_lo, p), outer)
                                     .value;
                lhs += fj * w;
            }
        }
    }
    return std::abs(lhs + g);
}

}  // namespace fbmfp
