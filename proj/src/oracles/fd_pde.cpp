#include "fbmfp/oracles/fd_pde.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fbmfp::oracles {

namespace {

struct Mesh {
    std::vector<double> edges, centers, widths;
};

Mesh graded_mesh(double x_max, int n) {
    Mesh m;
    m.edges.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double r = static_cast<double>(i) / n;
        m.edges[static_cast<std::size_t>(i)] = x_max * r * r;
    }
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        m.centers.push_back(0.5 * (m.edges[k] + m.edges[k + 1]));
        m.widths.push_back(m.edges[k + 1] - m.edges[k]);
    }
    return m;
}

// Interface flux F_{i+1/2} = w_minus[i] u_i - w_plus[i] u_{i+1} between centers i and i+1.
//
// With F = -A x^{g} e^{bx/A} d/dx[x^{1-g} e^{-bx/A} u], g = c/A, and F constant across
// the interface, F = -A (phi_1 - phi_0) / int_{x0}^{x1} x^{-g} e^{-bx/A} dx. In y = ln x
// both phi/u and the integrand are exp(E(y)) with E(y) = (1-g) y - (b/A) e^y, concave.
void interface_weights(const Mesh& m, double A, const FpkParams& p, std::vector<double>& w_minus,
                       std::vector<double>& w_plus) {
    const double g = p.c / A;
    const double beta = p.b / A;
    const std::size_t n = m.centers.size();
    w_minus.assign(n, 0.0);
    w_plus.assign(n, 0.0);
    auto E = [&](double y) { return (1.0 - g) * y - beta * std::exp(y); };
    quad::Options opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-9;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double y0 = std::log(m.centers[i]);
        const double y1 = std::log(m.centers[i + 1]);
        double e_max = std::max(E(y0), E(y1));
        if (beta > 0.0 && g < 1.0) {
            const double ys = std::log((1.0 - g) / beta);
            if (ys > y0 && ys < y1) e_max = E(ys);
        }
        const double integral =
            quad::integrate([&](double y) { return std::exp(E(y) - e_max); }, y0, y1, opt).value;
        w_minus[i] = A * std::exp(E(y0) - e_max) / integral;
        w_plus[i] = A * std::exp(E(y1) - e_max) / integral;
    }
}

// One backward-Euler step of length k with step-averaged diffusion A.
std::vector<double> implicit_step(const Mesh& m, const std::vector<double>& u, double A, double k,
                                  const FpkParams& p) {
    std::vector<double> wm, wp;
    interface_weights(m, A, p, wm, wp);
    const std::size_t n = u.size();
    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = m.widths[i] / k;
        rhs[i] = m.widths[i] / k * u[i];
        if (i + 1 < n) {
            diag[i] += wm[i];
            upper[i] = -wp[i];
        }
        if (i > 0) {
            diag[i] += wp[i - 1];
            lower[i] = -wm[i - 1];
        }
    }
    // Thomas algorithm; the matrix is an M-matrix, so no pivoting is needed.
    for (std::size_t i = 1; i < n; ++i) {
        const double f = lower[i] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    std::vector<double> out(n);
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
    return out;
}

double averaged_diffusion(const FpkParams& p, double t0, double t1) {
    const double q = 2.0 * p.v;
    return p.a * (std::pow(t1, q) - std::pow(t0, q)) / (q * (t1 - t0));
}

double mass(const Mesh& m, const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * m.widths[i];
    return s;
}

}  // namespace

FdSolution fd_pde_solve(const FdSolverConfig& cfg, const FpkParams& params, double bump_center,
                        double bump_width, double t) {
    params.validate();
    if (!(t > 0.0)) throw DomainError("fd_pde_solve requires t > 0");
    if (!(bump_center > 0.0) || !(bump_width > 0.0))
        throw DomainError("fd_pde_solve requires a bump with positive center and width");
    if (cfg.n_x < 8) throw DomainError("fd_pde_solve requires n_x >= 8");
    const double x_max = cfg.x_max > 0.0
                             ? cfg.x_max
                             : 8.0 * std::max(bump_center, params.mean(bump_center, t));
    const Mesh m = graded_mesh(x_max, cfg.n_x);
    const std::size_t n = m.centers.size();
    const auto at_center = std::upper_bound(m.edges.begin(), m.edges.end(), bump_center);
    if (at_center == m.edges.end()) throw DomainError("bump center beyond x_max");
    const double local_width = m.widths[static_cast<std::size_t>(at_center - m.edges.begin()) - 1];
    if (bump_width < 4.0 * local_width) throw DomainError("bump narrower than four cells");

    std::vector<double> u(n);
    auto cdf = [&](double x) {
        return 0.5 * std::erfc(-(x - bump_center) / (bump_width * std::numbers::sqrt2));
    };
    for (std::size_t i = 0; i < n; ++i) u[i] = (cdf(m.edges[i + 1]) - cdf(m.edges[i])) / m.widths[i];

    FdSolution sol;
    sol.initial_mass = mass(m, u);
    double now = 0.0;
    double k = std::min(cfg.initial_step, t);
    while (now < t) {
        if (sol.steps + sol.rejected_steps >= cfg.max_steps) {
            std::ostringstream msg;
            msg << "finite-difference run exceeded " << cfg.max_steps << " steps at t = " << now;
            throw InstabilityError(msg.str());
        }
        k = std::min(k, t - now);
        const double mid = now + 0.5 * k;
        const double end = (t - now - k) <= 1e-14 * t ? t : now + k;
        const auto big = implicit_step(m, u, averaged_diffusion(params, now, end), end - now, params);
        const auto half = implicit_step(m, u, averaged_diffusion(params, now, mid), mid - now, params);
        const auto two = implicit_step(m, half, averaged_diffusion(params, mid, end), end - mid, params);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err += std::abs(two[i] - big[i]) * m.widths[i];
        if (!std::isfinite(err)) throw InstabilityError("non-finite finite-difference state");
        if (err <= cfg.step_tolerance || k <= 1e-14 * t) {
            const double before = mass(m, u);
            for (std::size_t i = 0; i < n; ++i) u[i] = 2.0 * two[i] - big[i];
            const double drift = std::abs(mass(m, u) - before);
            sol.max_step_mass_drift = std::max(sol.max_step_mass_drift, drift);
            if (drift > 1e-8 * std::max(1.0, before)) {
                std::ostringstream msg;
                msg << "mass drift " << drift << " in one step at t = " << end;
                throw InstabilityError(msg.str());
            }
            now = end;
            ++sol.steps;
        } else {
            ++sol.rejected_steps;
        }
        const double factor = err > 0.0 ? 0.9 * std::sqrt(cfg.step_tolerance / err) : 2.0;
        k = std::min(cfg.max_step, k * std::clamp(factor, 0.3, 2.0));
    }

    sol.t = t;
    sol.edges = m.edges;
    sol.centers = m.centers;
    sol.u = u;
    sol.final_mass = mass(m, u);
    sol.min_value = *std::min_element(u.begin(), u.end());
    return sol;
}

}  // namespace fbmfp::oracles
