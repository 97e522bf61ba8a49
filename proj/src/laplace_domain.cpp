#include "fbmfp/laplace_domain.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/flux.hpp"
#include "fbmfp/format.hpp"
#include "fbmfp/quadrature.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace fbmfp {

InitialDistribution InitialDistribution::point_mass(double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("point mass requires xi > 0");
    return InitialDistribution(PointMass{xi});
}

InitialDistribution InitialDistribution::gaussian_bump(double center, double width) {
    if (!(center > 0.0) || !(width > 0.0) || !std::isfinite(center) || !std::isfinite(width))
        throw DomainError("gaussian bump requires center > 0 and width > 0");
    return InitialDistribution(GaussianBump{center, width});
}

InitialDistribution InitialDistribution::general(GeneralTransform g) {
    if (!g.transform) throw DomainError("general initial distribution requires a transform");
    if (!(g.location > 0.0)) throw DomainError("general initial distribution requires location > 0");
    if (!std::isfinite(g.transform(cplx(0.0)).real())) throw DomainError("pi(0) must be finite");
    return InitialDistribution(std::move(g));
}

double InitialDistribution::total_mass() const {
    if (const auto* g = std::get_if<GeneralTransform>(&v_)) return g->transform(cplx(0.0)).real();
    return 1.0;
}

double InitialDistribution::location() const {
    return std::visit(
        [](const auto& d) -> double {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, PointMass>) return d.xi;
            else if constexpr (std::is_same_v<D, GaussianBump>) return d.center;
            else return d.location;
        },
        v_);
}

std::string InitialDistribution::describe() const {
    return std::visit(
        [&](const auto& d) -> std::string {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, PointMass>) return "point_mass(xi=" + shortest(d.xi) + ")";
            else if constexpr (std::is_same_v<D, GaussianBump>)
                return "gaussian_bump(center=" + shortest(d.center) + ",width=" + shortest(d.width) + ")";
            else return "general(" + d.description + ")";
        },
        v_);
}

cplx pi_eval(const InitialDistribution& init, cplx z) {
    return std::visit(
        [&](const auto& d) -> cplx {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, PointMass>) {
                return std::exp(-z * d.xi);
            } else if constexpr (std::is_same_v<D, GaussianBump>) {
                return std::exp(-z * d.center + 0.5 * z * z * d.width * d.width);
            } else {
                if (!(z.real() > d.abscissa) && !(z.real() == 0.0 && d.abscissa < 0.0)) {
                    std::ostringstream msg;
                    msg << "pi evaluated at Re(z) = " << z.real() << " <= abscissa " << d.abscissa;
                    throw DivergenceError(msg.str());
                }
                return d.transform(z);
            }
        },
        init.variant());
}

cplx pi_argument(double t, cplx s, const FpkParams& params) {
    if (t < 0.0) throw DomainError("pi_argument requires t >= 0");
    if (t == 0.0) return s;
    const double growth = std::exp(params.b * t);
    const double psi_scaled = growth * psi(t, params);
    const cplx den = 1.0 - s * psi_scaled;
    if (std::abs(den) <= std::numeric_limits<double>::min() * std::abs(s)) {
        std::ostringstream msg;
        msg << "pi argument denominator vanishes at s = " << s;
        throw SingularityError(msg.str());
    }
    return s * growth / den;
}

cplx g_hat_denominator(const KernelContext& ctx, double mu, cplx s) {
    const double t = ctx.t_ref();
    return ctx.delta(mu) + std::exp(ctx.params().b * (mu - t)) / s;
}

namespace {

// Breakpoints graded geometrically into the layer of width 1/|s A(t)| below t.
std::vector<double> layer_breakpoints(double lower, double upper, double t, double diffusion,
                                      cplx s) {
    std::vector<double> pts;
    double width = 1.0 / (std::abs(s) * diffusion);
    if (!std::isfinite(width)) return pts;
    while (t - width > lower) {
        if (t - width < upper) pts.push_back(t - width);
        width *= 4.0;
    }
    return pts;
}

}  // namespace

GHatResult g_hat_detailed(const GHatSpec& query) {
    if (query.context == nullptr) throw DomainError("g_hat requires a kernel context");
    const KernelContext& ctx = *query.context;
    if (!(query.lower >= 0.0) || query.lower > query.upper || query.upper > ctx.t_ref())
        throw DomainError("g_hat requires 0 <= lower <= upper <= t_ref");
    if (!(query.tolerance > 0.0)) throw DomainError("g_hat tolerance must be positive");
    if (query.s == 0.0) throw DomainError("g_hat requires s != 0");
    const double c = ctx.params().c;
    if (c == 0.0 || query.lower == query.upper) return {cplx(0.0), 0.0};

    const double t = ctx.t_ref();
    const auto pts =
        layer_breakpoints(query.lower, query.upper, t, ctx.params().diffusion(t), query.s);
    quad::Options opt;
    opt.abs_tol = query.tolerance;
    auto res = quad::integrate(
        [&](double mu) -> cplx { return c / g_hat_denominator(ctx, mu, query.s); }, query.lower,
        query.upper, opt, pts);
    return {res.value, res.error};
}

namespace {

namespace odeint = boost::numeric::odeint;
using OdeState = std::array<double, 4>;

// Integrates G' = c/z(mu), J' = f(mu) e^{G} over [0, t] cell by cell, f piecewise
// constant on the flux grid. Returns (G(t), J(t)).
std::pair<cplx, cplx> flux_characteristic(const KernelContext& ctx, cplx s,
                                          const FluxFunction& flux, double tol) {
    const double t = ctx.t_ref();
    const double c = ctx.params().c;
    const auto& grid = flux.grid();
    const auto& cells = flux.cell_values();

    OdeState y{0.0, 0.0, 0.0, 0.0};
    // Local error control 1e3 tighter than requested: the global error accumulates over
    // the flux cells, and contour inversion needs the transform well below 1e-10.
    const double step_tol = 1e-3 * tol;
    auto stepper =
        odeint::make_controlled(step_tol, step_tol, odeint::runge_kutta_fehlberg78<OdeState>());
    const double layer = 1.0 / (std::abs(s) * ctx.params().diffusion(t));
    for (std::size_t j = 0; j + 1 < grid.size() && grid[j] < t; ++j) {
        const double lo = grid[j];
        const double hi = std::min(grid[j + 1], t);
        const double fj = cells[j];
        auto rhs = [&](const OdeState& x, OdeState& dx, double mu) {
            const cplx g = c == 0.0 ? cplx(0.0) : c / g_hat_denominator(ctx, mu, s);
            const cplx e = fj * std::exp(cplx(x[0], x[1]));
            dx = {g.real(), g.imag(), e.real(), e.imag()};
        };
        const double dt0 = std::min(hi - lo, std::max(layer, 1e-6 * t));
        odeint::integrate_adaptive(stepper, rhs, y, lo, hi, dt0);
    }
    return {cplx(y[0], y[1]), cplx(y[2], y[3])};
}


// Inversions query omega many times at one (params, t); reuse the last kernel per thread.
const KernelContext& cached_context(const FpkParams& params, double t) {
    thread_local std::optional<KernelContext> last;
    const auto same = [&](const FpkParams& p) {
        return p.a == params.a && p.b == params.b && p.c == params.c && p.v == params.v;
    };
    if (!last || last->t_ref() != t || !same(last->params())) last.emplace(params, t);
    return *last;
}

}  // namespace

LaplaceEvaluation omega(double t, cplx s, const InitialDistribution& init,
                        const FluxFunction* flux, const FpkParams& params,
                        const LaplaceOptions& opts) {
    params.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("omega requires t >= 0");
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw DomainError("omega requires finite s");
    if (flux != nullptr && t > flux->t_max() * (1.0 + 1e-12))
        throw DomainError("flux grid does not cover the requested time");

    LaplaceEvaluation ev;
    ev.s = s;
    ev.t = t;
    if (t == 0.0) {
        ev.pi_arg = s;
        ev.g_hat = 0.0;
        ev.omega = pi_eval(init, s);
        return ev;
    }
    if (s == 0.0) {
        if (flux != nullptr) throw DomainError("omega at s = 0 is only defined in reflecting mode");
        ev.pi_arg = 0.0;
        ev.g_hat = 0.0;
        ev.omega = pi_eval(init, s);
        return ev;
    }

    const KernelContext& ctx = cached_context(params, t);
    ev.pi_arg = pi_argument(t, s, params);
    ev.near_singular = ev.pi_arg.real() < 0.0;
    if (params.b > 0.0) ev.c1 = (1.0 - s * ctx.phi(t)) / (s * std::exp(params.b * t));

    const cplx pi_val = pi_eval(init, ev.pi_arg);
    if (flux == nullptr) {
        const auto gh = g_hat_detailed({0.0, t, &ctx, s, opts.tolerance});
        ev.g_hat = gh.value;
        ev.quadrature_error = gh.error;
        ev.omega = std::exp(-gh.value) * pi_val;
    } else {
        const auto [g, j] = flux_characteristic(ctx, s, *flux, opts.tolerance);
        ev.g_hat = g;
        ev.quadrature_error = opts.tolerance;
        ev.omega = std::exp(-g) * (pi_val + j);
    }
    return ev;
}

cplx pde_residual(double t, cplx s, const InitialDistribution& init, const FluxFunction* flux,
                  const FpkParams& params, double h, const LaplaceOptions& opts) {
    if (!(h > 0.0) || t < h) throw DomainError("pde_residual requires 0 < h <= t");
    auto w = [&](double tt, cplx ss) { return omega(tt, ss, init, flux, params, opts).omega; };
    const cplx w_t = (w(t + h, s) - w(t - h, s)) / (2.0 * h);
    const cplx w_s = (w(t, s + h) - w(t, s - h)) / (2.0 * h);
    // f is piecewise constant, so average it over the same stencil as w_t.
    const double source = flux != nullptr ? 0.5 * ((*flux)(t - h) + (*flux)(t + h)) : 0.0;
    return w_t + s * (params.diffusion(t) * s - params.b) * w_s + params.c * s * w(t, s) - source;
}

double flux_rhs(double t, const InitialDistribution& init, const FpkParams& params) {
    if (t < 0.0) throw DomainError("flux_rhs requires t >= 0");
    if (std::holds_alternative<GaussianBump>(init.variant()))
        throw DomainError("flux mode needs initial data whose transform vanishes at infinity");
    if (t == 0.0) return 0.0;
    const double z = -1.0 / psi(t, params);
    return pi_eval(init, cplx(z, 0.0)).real();
}

double flux_rhs_derivative(double t, const InitialDistribution& init, const FpkParams& params) {
    if (t < 0.0) throw DomainError("flux_rhs_derivative requires t >= 0");
    const auto* pm = std::get_if<PointMass>(&init.variant());
    if (pm == nullptr) throw DomainError("flux_rhs_derivative requires a point mass");
    if (t == 0.0) return 0.0;
    const double psi_t = psi(t, params);
    const double dpsi = -params.diffusion(t) * std::exp(-params.b * t);
    return -std::exp(pm->xi / psi_t) * pm->xi * dpsi / (psi_t * psi_t);
}

double boundary_limit(double t, const InitialDistribution& init, const FpkParams& params) {
    params.validate();
    if (!(t > 0.0)) throw DomainError("boundary_limit requires t > 0");
    const double psi_t = psi(t, params);
    if (psi_t == 0.0) throw DomainError("boundary_limit requires a nonzero gamma difference");
    const double atom = pi_eval(init, cplx(-1.0 / psi_t, 0.0)).real();
    // int_0^t c / Delta(mu, t) dmu ~ (c / (a t^{2v-1})) ln(1/(t - mu)) diverges at mu = t.
    if (params.c == 0.0) return atom;
    if (params.c > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
}

double smooth_density_at_origin(double t, const InitialDistribution& init,
                                const FpkParams& params) {
    params.validate();
    if (params.c != 0.0) throw DomainError("smooth_density_at_origin requires c = 0");
    const auto* pm = std::get_if<PointMass>(&init.variant());
    if (pm == nullptr) throw DomainError("smooth_density_at_origin requires a point mass");
    if (!(t > 0.0)) throw DomainError("smooth_density_at_origin requires t > 0");
    const double psi_t = psi(t, params);
    return std::exp(pm->xi / psi_t) * pm->xi * std::exp(-params.b * t) / (psi_t * psi_t);
}

}  // namespace fbmfp
