#include "fbmfp/validation.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/oracles/characteristics.hpp"
#include "fbmfp/oracles/fbm_mc.hpp"
#include "fbmfp/oracles/fd_pde.hpp"
#include "fbmfp/oracles/feller.hpp"
#include "fbmfp/oracles/ks.hpp"
#include "fbmfp/solver.hpp"
#include "fbmfp/special_fn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbmfp::validation {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Metric upper(std::string name, double value, double bound) {
    return {std::move(name), value, "<=", bound, value <= bound};
}

Metric lower(std::string name, double value, double bound) {
    return {std::move(name), value, ">=", bound, value >= bound};
}

Metric below(std::string name, double value, double bound) {
    return {std::move(name), value, "<", bound, value < bound};
}

Metric info(std::string name, double value) { return {std::move(name), value, "info", kNaN, true}; }

std::string label(const FpkParams& p) {
    std::ostringstream out;
    out << "(" << p.a << "," << p.b << "," << p.c << "," << p.v << ")";
    return out.str();
}

const std::vector<FpkParams>& residual_sets() {
    static const std::vector<FpkParams> sets{{1.0, 0.5, 0.3, 0.7}, {1.0, 0.0, 0.5, 0.5}, {0.5, 1.0, 0.2, 0.3}};
    return sets;
}

const std::vector<double> kResidualTimes{0.5, 1.0};
const std::vector<double> kResidualS{0.5, 1.0, 2.0};

// Supported-regime parameter sets for the fractional cross-checks.
const FpkParams kRoughSet{0.5, 0.5, 0.3, 0.3};
const FpkParams kSmoothSet{1.0, 0.5, 0.3, 0.7};
const FpkParams kFellerSet{1.0, 0.5, 0.5, 0.5};

void note_error(CriterionResult& r, const std::string& where, const Error& e) {
    r.notes.push_back(where + ": " + e.reason() + ": " + e.what());
    r.metrics.push_back({where, kNaN, "error", kNaN, false});
}

// ---------------------------------------------------------------- criterion 1
void laplace_residual(CriterionResult& r, const ValidationOptions&) {
    const auto init = InitialDistribution::point_mass(1.0);
    LaplaceOptions lo;
    lo.tolerance = 1e-12;
    double worst = 0.0;
    for (const auto& p : residual_sets())
        for (double t : kResidualTimes)
            for (double s : kResidualS) {
                const cplx res = pde_residual(t, cplx(s, 0.0), init, nullptr, p, 1e-4, lo);
                const double w = std::abs(omega(t, cplx(s, 0.0), init, nullptr, p, lo).omega);
                worst = std::max(worst, std::abs(res) / (1.0 + w));
            }
    r.metrics.push_back(upper("max |residual| / (1 + |omega|)", worst, 1e-5));
}

// ---------------------------------------------------------------- criterion 2
void characteristic_oracle(CriterionResult& r, const ValidationOptions&) {
    const auto init = InitialDistribution::point_mass(1.0);
    LaplaceOptions lo;
    lo.tolerance = 1e-12;
    double worst = 0.0;
    for (const auto& p : residual_sets())
        for (double t : kResidualTimes)
            for (double s : kResidualS) {
                const cplx w = omega(t, cplx(s, 0.0), init, nullptr, p, lo).omega;
                const cplx ref = oracles::characteristic_omega(t, cplx(s, 0.0), init, p);
                worst = std::max(worst, std::abs(w - ref) / std::abs(ref));
            }
    r.metrics.push_back(upper("max relative difference", worst, 1e-6));
}

// ---------------------------------------------------------------- criterion 3
void initial_and_norm(CriterionResult& r, const ValidationOptions&) {
    const auto init = InitialDistribution::point_mass(1.0);
    int mismatches = 0;
    for (const auto& p : residual_sets())
        for (cplx s : {cplx(0.5, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(1.0, 3.0)})
            if (omega(0.0, s, init, nullptr, p).omega != pi_eval(init, s)) ++mismatches;
    r.metrics.push_back(upper("omega(0, s) != pi(s) count", mismatches, 0.0));
    double worst = 0.0;
    for (const auto& p : residual_sets())
        for (double t : {0.25, 0.5, 1.0, 2.0})
            worst = std::max(worst, std::abs(omega(t, cplx(1e-8, 0.0), init, nullptr, p).omega - 1.0));
    r.metrics.push_back(upper("max |omega(t, 1e-8) - 1|", worst, 1e-6));
}

// ---------------------------------------------------------------- criterion 4
struct AnalyticPair {
    const char* name;
    cplx (*transform)(cplx);
    double (*original)(double);
};

const AnalyticPair kPairs[] = {
    {"1/s", [](cplx s) { return 1.0 / s; }, [](double) { return 1.0; }},
    {"1/s^2", [](cplx s) { return 1.0 / (s * s); }, [](double x) { return x; }},
    {"1/(s+1)", [](cplx s) { return 1.0 / (s + 1.0); }, [](double x) { return std::exp(-x); }},
    {"1/(s^2+1)", [](cplx s) { return 1.0 / (s * s + 1.0); }, [](double x) { return std::sin(x); }},
};

void inversion_battery(CriterionResult& r, const ValidationOptions& opts) {
    const auto xs = geometric_grid(0.1, 10.0, opts.fast ? 9 : 41);
    const InversionConfig cfg;
    for (const auto& pair : kPairs) {
        double talbot = 0.0, stehfest = 0.0;
        for (double x : xs) {
            const double exact = pair.original(x);
            const double vt = invert_talbot(pair.transform, x, cfg.talbot_nodes);
            const double vs = invert_stehfest([&](double s) { return pair.transform(cplx(s, 0.0)).real(); },
                                              x, cfg.stehfest_terms);
            talbot = std::max(talbot, std::abs(vt - exact) / std::abs(exact));
            stehfest = std::max(stehfest, std::abs(vs - exact) / std::abs(exact));
        }
        r.metrics.push_back(upper(std::string("talbot ") + pair.name, talbot, 1e-6));
        r.metrics.push_back(upper(std::string("stehfest ") + pair.name, stehfest, 1e-6));
    }
}

// ---------------------------------------------------------------- criterion 5
DensityCurve feller_curve(const ValidationOptions& opts) {
    const auto init = InitialDistribution::point_mass(1.0);
    SolverOptions so;
    so.threads = opts.threads;
    return density_curve(1.0, default_x_grid(1.0, init, kFellerSet), init, BoundaryMode::reflecting,
                         kFellerSet, InversionConfig{}, so);
}

void closed_form(CriterionResult& r, const ValidationOptions& opts) {
    const auto curve = feller_curve(opts);
    const auto& x = curve.x_grid;
    std::vector<double> ref(x.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ref[i] = oracles::feller_v_half_density(1.0, x[i], 1.0, kFellerSet);
        peak = std::max(peak, ref[i]);
    }
    double rel = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (ref[i] > 1e-2 * peak) rel = std::max(rel, std::abs(curve.u[i] - ref[i]) / ref[i]);
        if (i > 0)
            l1 += 0.5 * (std::abs(curve.u[i] - ref[i]) + std::abs(curve.u[i - 1] - ref[i - 1])) *
                  (x[i] - x[i - 1]);
    }
    if (curve.diagnostics.failed_points > 0) rel = l1 = kNaN;
    r.metrics.push_back(upper("max relative error where u > 1e-2 peak", rel, 1e-3));
    r.metrics.push_back(upper("L1 over the grid", l1, 5e-3));
    r.metrics.push_back(info("normalization", curve.diagnostics.normalization));
    r.metrics.push_back(info("mean relative deviation", moment_check(curve, kFellerSet).relative_deviation));
}

// ---------------------------------------------------------------- criterion 6
// CDF on `grid` from the inverted density: mass below the grid plus the
// cumulative trapezoid rule.
std::vector<double> integrated_cdf(const DensityCurve& curve) {
    std::vector<double> F(curve.x_grid.size());
    double acc = curve.diagnostics.below_grid_mass + curve.diagnostics.origin_mass;
    F[0] = acc;
    for (std::size_t i = 1; i < F.size(); ++i) {
        acc += 0.5 * (curve.u[i] + curve.u[i - 1]) * (curve.x_grid[i] - curve.x_grid[i - 1]);
        F[i] = acc;
    }
    return F;
}

DensityCurve fractional_curve(const FpkParams& p, int n, const ValidationOptions& opts) {
    const auto init = InitialDistribution::point_mass(1.0);
    SolverOptions so;
    so.threads = opts.threads;
    const double x_max = 8.0 * std::max(1.0, p.mean(1.0, 1.0));
    return density_curve(1.0, geometric_grid(1e-3, x_max, n), init, BoundaryMode::reflecting, p,
                         InversionConfig{}, so);
}

oracles::FbmSimConfig mc_config(const FpkParams& p, int steps, const ValidationOptions& opts) {
    oracles::FbmSimConfig cfg;
    cfg.hurst = p.v;
    cfg.n_paths = opts.fast ? 20000 : 200000;
    cfg.n_steps = steps;
    cfg.horizon = 1.0;
    cfg.x0 = 1.0;
    cfg.seed = opts.seed;
    cfg.threads = opts.threads;
    return cfg;
}

void mc_case(CriterionResult& r, const FpkParams& p, const ValidationOptions& opts) {
    const std::string tag = "v=" + std::to_string(p.v).substr(0, 3) + " " + label(p);
    const int steps = opts.fast ? 250 : 1000;
    const auto curve = fractional_curve(p, 600, opts);
    if (curve.diagnostics.failed_points > 0) {
        r.metrics.push_back({tag + " KS", kNaN, "<=", 0.02, false});
        r.notes.push_back(tag + ": density inversion failed at some grid points");
        return;
    }
    const auto F = integrated_cdf(curve);
    const oracles::TabulatedCdf cdf(curve.x_grid, F);

    // Second route to the CDF: inversion of omega / s.
    const auto init = InitialDistribution::point_mass(1.0);
    double route_gap = 0.0;
    for (std::size_t i = 0; i < F.size(); i += 75)
        route_gap = std::max(route_gap, std::abs(F[i] - distribution_at(1.0, curve.x_grid[i], init, p)));

    const auto samples = oracles::simulate_fbm_paths(mc_config(p, steps, opts), p);
    const double ks = oracles::ks_statistic(samples, cdf);
    double mean = 0.0;
    std::size_t zeros = 0;
    for (double x : samples) {
        mean += x;
        if (x == 0.0) ++zeros;
    }
    mean /= static_cast<double>(samples.size());
    const auto coarse = oracles::simulate_fbm_paths(mc_config(p, steps / 4, opts), p);

    r.metrics.push_back(upper(tag + " KS", ks, 0.02));
    r.metrics.push_back(info(tag + " KS with n_steps/4", oracles::ks_statistic(coarse, cdf)));
    r.metrics.push_back(info(tag + " fraction of paths at 0", static_cast<double>(zeros) / samples.size()));
    r.metrics.push_back(info(tag + " sample mean", mean));
    r.metrics.push_back(info(tag + " exact mean", p.mean(1.0, 1.0)));
    r.metrics.push_back(info(tag + " max |CDF(integrated) - CDF(omega/s)|", route_gap));
    r.metrics.push_back(info(tag + " normalization", curve.diagnostics.normalization));
}

void monte_carlo(CriterionResult& r, const ValidationOptions& opts) {
    for (const auto& p : {kRoughSet, kSmoothSet}) {
        try {
            mc_case(r, p, opts);
        } catch (const Error& e) {
            note_error(r, "v=" + std::to_string(p.v), e);
        }
    }
    // Control at v = 1/2, where the closed form is exact.
    const auto samples = oracles::simulate_fbm_paths(mc_config(kFellerSet, opts.fast ? 250 : 1000, opts), kFellerSet);
    const double ks = oracles::ks_statistic(samples, [](double x) {
        return x <= 0.0 ? 0.0 : oracles::feller_v_half_cdf(1.0, x, 1.0, kFellerSet);
    });
    r.metrics.push_back(upper("v=0.5 control KS vs closed form", ks, 0.015));
    r.notes.push_back("seed " + std::to_string(opts.seed) + ", scheme wick_euler, full truncation");
}

// ---------------------------------------------------------------- criterion 7
constexpr double kBumpCenter = 1.0;
constexpr double kBumpWidth = 0.1;

double fd_l1(const oracles::FdSolution& fd, const FpkParams& p) {
    const auto bump = InitialDistribution::gaussian_bump(kBumpCenter, kBumpWidth);
    std::vector<double> F(fd.edges.size(), 0.0);
    for (std::size_t i = 1; i < F.size(); ++i) F[i] = distribution_at(fd.t, fd.edges[i], bump, p);
    double l1 = 0.0;
    for (std::size_t i = 0; i < fd.u.size(); ++i)
        l1 += std::abs(fd.u[i] * (fd.edges[i + 1] - fd.edges[i]) - (F[i + 1] - F[i]));
    return l1;
}

void fd_cross_check(CriterionResult& r, const ValidationOptions&) {
    for (const auto& p : {kRoughSet, kSmoothSet}) {
        const std::string tag = "v=" + std::to_string(p.v).substr(0, 3);
        try {
            oracles::FdSolverConfig cfg;
            const auto coarse = oracles::fd_pde_solve(cfg, p, kBumpCenter, kBumpWidth, 1.0);
            cfg.n_x *= 2;
            const auto fine = oracles::fd_pde_solve(cfg, p, kBumpCenter, kBumpWidth, 1.0);
            const double l1_coarse = fd_l1(coarse, p);
            const double l1_fine = fd_l1(fine, p);
            r.metrics.push_back(upper(tag + " L1 (n_x=400)", l1_coarse, 5e-2));
            r.metrics.push_back(below(tag + " L1 (n_x=800) below L1 (n_x=400)", l1_fine, l1_coarse));
            r.metrics.push_back(info(tag + " max mass drift per step",
                                     std::max(coarse.max_step_mass_drift, fine.max_step_mass_drift)));
            r.metrics.push_back(info(tag + " FD min value", std::min(coarse.min_value, fine.min_value)));
        } catch (const Error& e) {
            note_error(r, tag, e);
        }
    }
    r.notes.push_back("Gaussian bump center 1, width 0.1, t = 1; FD starts at t = 0 with step-averaged diffusion");
}

// ---------------------------------------------------------------- criterion 8
void flux_solver(CriterionResult& r, const ValidationOptions&) {
    const auto init = InitialDistribution::point_mass(1.0);
    {
        const FpkParams p{1.0, 0.5, 0.0, 0.7};
        const auto flux = solve_flux(uniform_time_grid(1.0, 200), init, p);
        double worst = 0.0;
        for (std::size_t i = 0; i < flux.grid().size(); ++i)
            worst = std::max(worst, std::abs(flux.values()[i] + flux_rhs_derivative(flux.grid()[i], init, p)));
        r.metrics.push_back(upper("c=0: max |f - (-g')| over 201 nodes", worst, 1e-4));
    }
    const FpkParams p{1.0, 0.5, 0.2, 0.7};
    const auto flux = solve_flux(uniform_time_grid(1.0, 64), init, p);
    double at_nodes = 0.0, between = 0.0;
    const auto& g = flux.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        at_nodes = std::max(at_nodes, flux_condition_residual(flux, g[i], init, p));
        if (i + 1 < g.size() && i % 8 == 3)
            between = std::max(between, flux_condition_residual(flux, 0.5 * (g[i] + g[i + 1]), init, p));
    }
    r.metrics.push_back(upper("c=0.2: max residual at the 65 nodes", at_nodes, 1e-6));
    r.metrics.push_back(info("c=0.2: max residual at sampled cell midpoints", between));
    r.metrics.push_back(info("c=0.2: max kernel exponent", flux.diagnostics().max_exponent));
}

// ---------------------------------------------------------------- criterion 9
void positivity(CriterionResult& r, const ValidationOptions& opts) {
    double worst = std::numeric_limits<double>::infinity();
    auto track = [&](const DensityCurve& c) {
        if (c.diagnostics.failed_points > 0 || !(c.diagnostics.peak > 0.0)) {
            worst = kNaN;
            return;
        }
        if (!std::isnan(worst)) worst = std::min(worst, c.diagnostics.min_value / c.diagnostics.peak);
    };
    track(feller_curve(opts));
    for (const auto& p : {kRoughSet, kSmoothSet}) {
        track(fractional_curve(p, 256, opts));
        const auto bump = InitialDistribution::gaussian_bump(kBumpCenter, kBumpWidth);
        SolverOptions so;
        so.threads = opts.threads;
        track(density_curve(1.0, default_x_grid(1.0, bump, p), bump, BoundaryMode::reflecting, p,
                            InversionConfig{}, so));
    }
    r.metrics.push_back(lower("min u / peak over the closed-form, fractional and bump runs", worst, -1e-6));

    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    for (const auto& p : residual_sets())
        for (double t : {0.25, 0.5, 1.0, 2.0})
            for (double s : geometric_grid(0.1, 10.0, 9)) {
                const double h = 1e-3 * s;
                auto f = [&](double z) { return pi_argument(t, cplx(z, 0.0), p).real(); };
                d1 = std::min(d1, (f(s + h) - f(s - h)) / (2.0 * h));
                d2 = std::min(d2, (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h));
            }
    r.metrics.push_back(lower("min first s-derivative of pi_argument", d1, -1e-10));
    r.metrics.push_back(lower("min second s-derivative of pi_argument", d2, -1e-10));
}

// ---------------------------------------------------------------- criterion 10
void boundary(CriterionResult& r, const ValidationOptions&) {
    const auto init = InitialDistribution::point_mass(1.0);
    for (const auto& p : {FpkParams{1.0, 0.0, 0.0, 0.5}, FpkParams{1.0, 0.5, 0.0, 0.7}}) {
        const double t = p.b == 0.0 ? 2.0 : 1.0;
        const double limit = boundary_limit(t, init, p);
        const double extrapolated = extrapolate_to_origin(t, init, p);
        const std::string tag = label(p) + " t=" + std::to_string(t).substr(0, 3);
        r.metrics.push_back(upper(tag + " relative gap", std::abs(extrapolated - limit) / std::abs(limit), 1e-2));
        r.metrics.push_back(info(tag + " boundary_limit", limit));
        r.metrics.push_back(info(tag + " extrapolated u(0+)", extrapolated));
        r.metrics.push_back(info(tag + " smooth density at 0+", smooth_density_at_origin(t, init, p)));
    }
}

using Runner = void (*)(CriterionResult&, const ValidationOptions&);

struct Entry {
    const char* title;
    double budget;
    Runner run;
};

const Entry kEntries[kCriterionCount] = {
    {"Laplace-domain PDE residual", 30.0, laplace_residual},
    {"characteristic-ODE oracle", 30.0, characteristic_oracle},
    {"initial condition and norm preservation", 10.0, initial_and_norm},
    {"inversion battery", 5.0, inversion_battery},
    {"v = 1/2 closed-form equivalence", 120.0, closed_form},
    {"fractional Monte Carlo consistency", 600.0, monte_carlo},
    {"finite-difference PDE cross-check", 300.0, fd_cross_check},
    {"flux solver", 60.0, flux_solver},
    {"positivity and monotonicity", 30.0, positivity},
    {"boundary limit", 60.0, boundary},
};

}  // namespace

Suite parse_suite(const std::string& name) {
    if (name == "laplace") return Suite::laplace;
    if (name == "inversion") return Suite::inversion;
    if (name == "oracle") return Suite::oracle;
    if (name == "mc") return Suite::mc;
    if (name == "all") return Suite::all;
    throw DomainError("unknown suite '" + name + "' (expected laplace, inversion, oracle, mc or all)");
}

std::string to_string(Suite s) {
    switch (s) {
        case Suite::laplace: return "laplace";
        case Suite::inversion: return "inversion";
        case Suite::oracle: return "oracle";
        case Suite::mc: return "mc";
        case Suite::all: return "all";
    }
    return "all";
}

std::vector<int> suite_criteria(Suite s) {
    switch (s) {
        case Suite::laplace: return {1, 2, 3};
        case Suite::inversion: return {4};
        case Suite::oracle: return {5, 7, 8, 9, 10};
        case Suite::mc: return {6};
        case Suite::all: return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    }
    return {};
}

std::string criterion_title(int id) {
    if (id < 1 || id > kCriterionCount) throw DomainError("criterion id out of range");
    return kEntries[id - 1].title;
}

CriterionResult run_criterion(int id, const ValidationOptions& opts) {
    if (id < 1 || id > kCriterionCount) throw DomainError("criterion id out of range");
    const Entry& e = kEntries[id - 1];
    CriterionResult r;
    r.id = id;
    r.title = e.title;
    r.budget_seconds = e.budget;
    const auto start = std::chrono::steady_clock::now();
    try {
        e.run(r, opts);
    } catch (const Error& err) {
        note_error(r, "aborted", err);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.metrics.push_back(below("runtime seconds", r.seconds, r.budget_seconds));
    r.passed = std::all_of(r.metrics.begin(), r.metrics.end(), [](const Metric& m) { return m.passed; });
    return r;
}

std::vector<CriterionResult> run_suite(Suite s, const ValidationOptions& opts) {
    std::vector<CriterionResult> out;
    for (int id : suite_criteria(s)) out.push_back(run_criterion(id, opts));
    return out;
}

}  // namespace fbmfp::validation
