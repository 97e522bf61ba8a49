// fbmfp: Laplace-domain solver for the fBm Fokker-Planck equation.
//
// Subcommands: omega, density, flux, cir, validate.
// Exit codes: 0 ok, 1 validation failure, 2 bad input, 3 numerical failure.

#include "fbmfp/cir.hpp"
#include "fbmfp/errors.hpp"
#include "fbmfp/format.hpp"
#include "fbmfp/solver.hpp"
#include "fbmfp/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef FBMFP_VERSION
#define FBMFP_VERSION "0.0.0"
#endif

using namespace fbmfp;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kValidationFailed = 1, kBadInput = 2, kNumerical = 3 };

std::string num(double x) { return shortest(x); }

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

struct ModelFlags {
    double a = 1.0, b = 0.0, c = 0.0, v = 0.5;
    FpkParams params() const { return {a, b, c, v}; }
};

struct CommonFlags {
    std::string output;  ///< empty = stdout
    std::string format = "csv";
    double tolerance = 1e-10;
    std::string method = "talbot";
    int talbot_nodes = 48;
    int stehfest_terms = 16;
    double cross_check = 1e-4;
    std::uint64_t seed = 20240601;
    unsigned threads = 0;
    int flux_nodes = 64;

    InversionConfig inversion() const {
        InversionConfig cfg;
        cfg.method = parse_inversion_method(method);
        cfg.talbot_nodes = talbot_nodes;
        cfg.stehfest_terms = stehfest_terms;
        cfg.cross_check_tolerance = cross_check;
        cfg.validate();
        return cfg;
    }
    SolverOptions solver() const {
        if (!(tolerance > 0.0)) throw DomainError("--tolerance must be positive");
        if (flux_nodes < 1) throw DomainError("--flux-nodes must be positive");
        SolverOptions so;
        so.laplace.tolerance = tolerance;
        so.flux_nodes = flux_nodes;
        so.threads = threads;
        return so;
    }
};

struct GridFlags {
    double x_min = 0.0, x_max = 0.0;  ///< 0 = automatic
    int n = 256;
    std::string spacing = "geometric";

    std::vector<double> grid(double t, const InitialDistribution& init, const FpkParams& p) const {
        if (n < 1) throw DomainError("--n must be positive");
        const auto automatic = default_x_grid(t, init, p, 2);
        const double lo = x_min > 0.0 ? x_min : automatic.front();
        const double hi = x_max > 0.0 ? x_max : automatic.back();
        if (n == 1) {
            if (!(lo > 0.0)) throw DomainError("--x-min must be positive");
            return {lo};
        }
        if (spacing == "geometric") return geometric_grid(lo, hi, n);
        if (spacing != "linear") throw DomainError("--spacing must be geometric or linear");
        if (!(lo > 0.0) || !(hi > lo)) throw DomainError("grid needs 0 < x-min < x-max");
        std::vector<double> g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
        g.back() = hi;
        return g;
    }
};

void add_model(CLI::App* app, ModelFlags& m) {
    app->add_option("--a", m.a, "diffusion scale a > 0")->capture_default_str();
    app->add_option("--b", m.b, "drift slope b >= 0")->capture_default_str();
    app->add_option("--c", m.c, "drift intercept c")->capture_default_str();
    app->add_option("--v", m.v, "exponent v > 0")->capture_default_str();
}

void add_common(CLI::App* app, CommonFlags& f, bool inversion) {
    app->add_option("-o,--output", f.output, "output file (default stdout)");
    app->add_option("--tolerance", f.tolerance, "absolute tolerance of inner quadratures")->capture_default_str();
    app->add_option("--seed", f.seed, "RNG seed, recorded in the output")->capture_default_str();
    app->add_option("--threads", f.threads, "worker threads (0 = FBMFP_THREADS or hardware)");
    app->add_option("--flux-nodes", f.flux_nodes, "flux grid intervals in flux mode")->capture_default_str();
    if (inversion) {
        app->add_option("--method", f.method, "talbot | stehfest | both")->capture_default_str();
        app->add_option("--talbot-nodes", f.talbot_nodes, "Talbot contour points")->capture_default_str();
        app->add_option("--stehfest-terms", f.stehfest_terms, "Gaver-Stehfest terms (even)")->capture_default_str();
        app->add_option("--cross-check-tolerance", f.cross_check, "Talbot vs Stehfest relative tolerance")->capture_default_str();
        app->add_option("--format", f.format, "csv | json")->capture_default_str();
    }
}

void add_grid(CLI::App* app, GridFlags& g) {
    app->add_option("--x-min", g.x_min, "smallest grid point (default xi/50)");
    app->add_option("--x-max", g.x_max, "largest grid point (default 8 max(xi, E))");
    app->add_option("--n", g.n, "number of grid points")->capture_default_str();
    app->add_option("--spacing", g.spacing, "geometric | linear")->capture_default_str();
}

void emit(const CommonFlags& f, const std::string& text) {
    if (f.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(f.output, std::ios::binary);
    if (!out) throw DomainError("cannot open output file '" + f.output + "'");
    out << text;
    if (!out) throw DomainError("failed writing '" + f.output + "'");
}

std::vector<std::pair<std::string, std::string>> provenance(const std::string& command,
                                                            const CommonFlags& f) {
    return {{"fbmfp_version", FBMFP_VERSION},
            {"command", command},
            {"tolerance", num(f.tolerance)},
            {"method", f.method},
            {"talbot_nodes", std::to_string(f.talbot_nodes)},
            {"stehfest_terms", std::to_string(f.stehfest_terms)},
            {"cross_check_tolerance", num(f.cross_check)},
            {"flux_nodes", std::to_string(f.flux_nodes)},
            {"seed", std::to_string(f.seed)}};
}

// ---------------------------------------------------------------- density output
std::string render_curve(const DensityCurve& curve,
                         std::vector<std::pair<std::string, std::string>> meta,
                         const std::string& format) {
    const auto& d = curve.diagnostics;
    std::vector<std::pair<std::string, std::string>> trailer{
        {"failed_points", std::to_string(d.failed_points)},
        {"flagged_points", std::to_string(d.flagged_points)},
        {"negative_points", std::to_string(d.negative_points)},
        {"min_value", num(d.min_value)},
        {"peak", num(d.peak)},
        {"max_discrepancy", num(d.max_discrepancy)},
        {"origin_mass", num(d.origin_mass)},
        {"below_grid_mass", num(d.below_grid_mass)},
        {"boundary_extrapolation", num(d.boundary_extrapolation)}};
    if (d.flux) {
        trailer.push_back({"flux_negligible_nodes", std::to_string(d.flux->negligible_nodes)});
        trailer.push_back({"flux_max_exponent", num(d.flux->max_exponent)});
    }
    trailer.push_back({"normalization", num(d.normalization)});

    if (format == "json") {
        json j;
        for (const auto& [k, v] : meta) j["metadata"][k] = v;
        json rows = json::array();
        for (std::size_t i = 0; i < curve.x_grid.size(); ++i) {
            json row;
            row["x"] = curve.x_grid[i];
            row["u"] = std::isnan(curve.u[i]) ? json(nullptr) : json(curve.u[i]);
            row["discrepancy"] = curve.discrepancy[i];
            row["flags"] = curve.flags[i];
            rows.push_back(row);
        }
        j["rows"] = rows;
        for (const auto& [k, v] : trailer) j["diagnostics"][k] = v;
        return j.dump(2) + "\n";
    }
    if (format != "csv") throw DomainError("--format must be csv or json");
    std::ostringstream out;
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "x,u,discrepancy,flags\n";
    for (std::size_t i = 0; i < curve.x_grid.size(); ++i)
        out << num(curve.x_grid[i]) << "," << num(curve.u[i]) << "," << num(curve.discrepancy[i]) << ","
            << join(curve.flags[i], ';') << "\n";
    for (const auto& [k, v] : trailer) out << "# " << k << "=" << v << "\n";
    return out.str();
}

int finish_curve(const DensityCurve& curve) {
    const auto& d = curve.diagnostics;
    if (d.failed_points > 0)
        std::cerr << "fbmfp: warning: " << d.failed_points << " of " << curve.x_grid.size()
                  << " points failed\n";
    if (d.flagged_points > 0)
        std::cerr << "fbmfp: warning: " << d.flagged_points << " points flagged\n";
    if (5 * d.failed_points > static_cast<int>(curve.x_grid.size())) {
        std::cerr << "fbmfp: error [inversion_error]: more than 20% of points failed\n";
        return kNumerical;
    }
    return kOk;
}

// ---------------------------------------------------------------- omega
struct OmegaFlags {
    ModelFlags model;
    CommonFlags common;
    double t = 1.0, s_re = 1.0, s_im = 0.0, xi = 1.0, h = 1e-4;
    std::string mode = "reflecting";
};

int cmd_omega(const OmegaFlags& f) {
    const auto params = f.model.params();
    params.validate();
    const auto init = InitialDistribution::point_mass(f.xi);
    const auto mode = parse_boundary_mode(f.mode);
    const auto so = f.common.solver();
    if (!(f.t >= 0.0)) throw DomainError("--t must be >= 0");
    const cplx s(f.s_re, f.s_im);

    std::optional<FluxFunction> flux;
    if (mode == BoundaryMode::flux && f.t > 0.0)
        flux = solve_flux(uniform_time_grid(f.t + 2.0 * f.h, f.common.flux_nodes), init, params, so.flux);
    const auto ev = omega(f.t, s, init, flux ? &*flux : nullptr, params, so.laplace);
    std::optional<cplx> residual;
    if (f.t >= f.h && s != 0.0) residual = pde_residual(f.t, s, init, flux ? &*flux : nullptr, params, f.h, so.laplace);

    auto meta = provenance("omega", f.common);
    meta.insert(meta.begin() + 2, {"params", params.describe()});
    json j;
    for (const auto& [k, v] : meta) j["metadata"][k] = v;
    j["metadata"]["mode"] = to_string(mode);
    j["metadata"]["xi"] = num(f.xi);
    j["t"] = f.t;
    j["s"] = {s.real(), s.imag()};
    j["omega"] = {ev.omega.real(), ev.omega.imag()};
    j["pi_argument"] = {ev.pi_arg.real(), ev.pi_arg.imag()};
    j["g_hat"] = {ev.g_hat.real(), ev.g_hat.imag()};
    if (ev.c1) j["c1"] = {ev.c1->real(), ev.c1->imag()};
    j["quadrature_error"] = ev.quadrature_error;
    j["near_singular"] = ev.near_singular;
    if (residual) j["pde_residual"] = std::abs(*residual);
    else j["pde_residual"] = nullptr;

    if (f.common.format == "json") {
        emit(f.common, j.dump(2) + "\n");
        return kOk;
    }
    std::ostringstream out;
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "# mode=" << to_string(mode) << "\n# xi=" << num(f.xi) << "\n";
    out << "omega_re=" << num(ev.omega.real()) << "\nomega_im=" << num(ev.omega.imag()) << "\n";
    out << "pi_argument_re=" << num(ev.pi_arg.real()) << "\npi_argument_im=" << num(ev.pi_arg.imag()) << "\n";
    out << "g_hat_re=" << num(ev.g_hat.real()) << "\ng_hat_im=" << num(ev.g_hat.imag()) << "\n";
    if (ev.c1) out << "c1_re=" << num(ev.c1->real()) << "\nc1_im=" << num(ev.c1->imag()) << "\n";
    out << "quadrature_error=" << num(ev.quadrature_error) << "\n";
    out << "near_singular=" << (ev.near_singular ? "true" : "false") << "\n";
    out << "pde_residual=" << (residual ? num(std::abs(*residual)) : std::string("n/a")) << "\n";
    emit(f.common, out.str());
    return kOk;
}

// ---------------------------------------------------------------- density
struct DensityFlags {
    ModelFlags model;
    CommonFlags common;
    GridFlags grid;
    double t = 1.0, xi = 1.0, bump_width = 0.0;
    std::string mode = "reflecting";
};

int cmd_density(const DensityFlags& f) {
    const auto params = f.model.params();
    params.validate();
    if (!(f.t > 0.0)) throw DomainError("--t must be positive");
    const auto init = f.bump_width > 0.0 ? InitialDistribution::gaussian_bump(f.xi, f.bump_width)
                                         : InitialDistribution::point_mass(f.xi);
    const auto mode = parse_boundary_mode(f.mode);
    const auto inv = f.common.inversion();
    const auto so = f.common.solver();
    const auto grid = f.grid.grid(f.t, init, params);

    const auto curve = density_curve(f.t, grid, init, mode, params, inv, so);
    auto meta = provenance("density", f.common);
    meta.insert(meta.begin() + 2, {"params", params.describe()});
    meta.insert(meta.begin() + 3, {"init", init.describe()});
    meta.insert(meta.begin() + 4, {"t", num(f.t)});
    meta.insert(meta.begin() + 5, {"mode", to_string(mode)});
    emit(f.common, render_curve(curve, meta, f.common.format));
    return finish_curve(curve);
}

// ---------------------------------------------------------------- flux
struct FluxFlags {
    ModelFlags model;
    CommonFlags common;
    double t_max = 1.0, xi = 1.0, shift = 0.0;
    int n = 64;
};

int cmd_flux(const FluxFlags& f) {
    const auto params = f.model.params();
    params.validate();
    if (!(f.t_max > 0.0)) throw DomainError("--t-max must be positive");
    if (f.n < 1) throw DomainError("--n must be positive");
    const auto init = InitialDistribution::point_mass(f.xi);
    FluxSolverConfig cfg;
    cfg.lavrentiev_shift = f.shift;
    const auto flux = solve_flux(uniform_time_grid(f.t_max, f.n), init, params, cfg);

    auto meta = provenance("flux", f.common);
    meta.insert(meta.begin() + 2, {"params", params.describe()});
    meta.insert(meta.begin() + 3, {"init", init.describe()});
    const auto& d = flux.diagnostics();
    std::ostringstream out;
    for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
    out << "# lavrentiev_shift=" << num(d.lavrentiev_shift) << "\n";
    out << "t,f,g,minus_g_prime,residual\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < flux.grid().size(); ++i) {
        const double t = flux.grid()[i];
        const double res = flux_condition_residual(flux, t, init, params);
        worst = std::max(worst, res);
        out << num(t) << "," << num(flux.values()[i]) << "," << num(flux.rhs()[i]) << ","
            << num(-flux_rhs_derivative(t, init, params)) << "," << num(res) << "\n";
    }
    out << "# negligible_nodes=" << d.negligible_nodes << "\n";
    out << "# max_exponent=" << num(d.max_exponent) << "\n";
    out << "# min_diagonal=" << num(d.min_diagonal) << "\n";
    out << "# max_weight_ratio=" << num(d.max_weight_ratio) << "\n";
    out << "# max_residual=" << num(worst) << "\n";
    emit(f.common, out.str());
    return kOk;
}

// ---------------------------------------------------------------- cir
struct CirFlags {
    CirParams cir;
    CommonFlags common;
    GridFlags grid;
    std::string mode = "reflecting";
};

int cmd_cir(const CirFlags& f) {
    const auto m = map_cir_to_fpk(f.cir);
    const auto init = InitialDistribution::point_mass(m.xi);
    const auto mode = parse_boundary_mode(f.mode);
    const auto inv = f.common.inversion();
    const auto so = f.common.solver();
    const auto grid = f.grid.grid(m.t, init, m.params);
    const auto curve = cir_transition_density(f.cir, grid, mode, inv, so);

    auto meta = provenance("cir", f.common);
    meta.insert(meta.begin() + 2, {"cir", f.cir.describe()});
    meta.insert(meta.begin() + 3, {"params", m.params.describe()});
    meta.insert(meta.begin() + 4, {"mode", to_string(mode)});
    emit(f.common, render_curve(curve, meta, f.common.format));
    return finish_curve(curve);
}

// ---------------------------------------------------------------- validate
struct ValidateFlags {
    CommonFlags common;
    std::string suite = "all";
    bool fast = false;
};

json metric_json(const validation::Metric& m) {
    json j;
    j["name"] = m.name;
    j["value"] = std::isfinite(m.value) ? json(m.value) : json(nullptr);
    j["relation"] = m.relation;
    j["bound"] = std::isfinite(m.bound) ? json(m.bound) : json(nullptr);
    j["passed"] = m.passed;
    return j;
}

int cmd_validate(const ValidateFlags& f) {
    const auto suite = validation::parse_suite(f.suite);
    validation::ValidationOptions opts;
    opts.fast = f.fast;
    opts.seed = f.common.seed;
    opts.threads = f.common.threads;
    const auto start = std::chrono::steady_clock::now();
    const auto results = validation::run_suite(suite, opts);
    json j;
    j["fbmfp_version"] = FBMFP_VERSION;
    j["suite"] = validation::to_string(suite);
    j["fast"] = f.fast;
    j["seed"] = f.common.seed;
    bool all = true;
    json list = json::array();
    for (const auto& r : results) {
        json c;
        c["id"] = r.id;
        c["title"] = r.title;
        c["passed"] = r.passed;
        c["seconds"] = r.seconds;
        c["budget_seconds"] = r.budget_seconds;
        c["metrics"] = json::array();
        for (const auto& m : r.metrics) c["metrics"].push_back(metric_json(m));
        c["notes"] = r.notes;
        list.push_back(c);
        all = all && r.passed;
    }
    j["criteria"] = list;
    j["passed"] = all;
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit(f.common, j.dump(2) + "\n");
    return all ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laplace-domain solver for the fractional Brownian motion Fokker-Planck equation"};
    app.set_version_flag("--version", FBMFP_VERSION);
    app.require_subcommand(1);

    OmegaFlags omega_f;
    auto* omega_cmd = app.add_subcommand("omega", "evaluate the Laplace-domain solution omega(t, s)");
    add_model(omega_cmd, omega_f.model);
    add_common(omega_cmd, omega_f.common, false);
    omega_cmd->add_option("--t", omega_f.t, "time")->required();
    omega_cmd->add_option("--s-re", omega_f.s_re, "real part of s")->required();
    omega_cmd->add_option("--s-im", omega_f.s_im, "imaginary part of s")->capture_default_str();
    omega_cmd->add_option("--xi", omega_f.xi, "point-mass location")->capture_default_str();
    omega_cmd->add_option("--mode", omega_f.mode, "reflecting | flux")->capture_default_str();
    omega_cmd->add_option("--residual-step", omega_f.h, "central-difference step of the residual")->capture_default_str();
    omega_cmd->add_option("--format", omega_f.common.format, "text | json");
    omega_f.common.format = "text";

    DensityFlags density_f;
    auto* density_cmd = app.add_subcommand("density", "density u(t, x) on a grid by inverse Laplace transform");
    add_model(density_cmd, density_f.model);
    add_common(density_cmd, density_f.common, true);
    add_grid(density_cmd, density_f.grid);
    density_cmd->add_option("--t", density_f.t, "time")->required();
    density_cmd->add_option("--xi", density_f.xi, "initial location")->capture_default_str();
    density_cmd->add_option("--bump-width", density_f.bump_width, "Gaussian initial bump width (0 = point mass)");
    density_cmd->add_option("--mode", density_f.mode, "reflecting | flux")->capture_default_str();

    FluxFlags flux_f;
    auto* flux_cmd = app.add_subcommand("flux", "solve for the boundary flux f(t)");
    add_model(flux_cmd, flux_f.model);
    add_common(flux_cmd, flux_f.common, false);
    flux_cmd->add_option("--t-max", flux_f.t_max, "end of the time grid")->required();
    flux_cmd->add_option("--n", flux_f.n, "grid intervals")->capture_default_str();
    flux_cmd->add_option("--xi", flux_f.xi, "point-mass location")->capture_default_str();
    flux_cmd->add_option("--lavrentiev-shift", flux_f.shift, "Lavrentiev diagonal shift of the collocation system")->capture_default_str();

    CirFlags cir_f;
    auto* cir_cmd = app.add_subcommand("cir", "transition density of the square-root stock model under fBm");
    add_common(cir_cmd, cir_f.common, true);
    add_grid(cir_cmd, cir_f.grid);
    cir_cmd->add_option("--hurst", cir_f.cir.hurst, "Hurst index H in (0, 1)")->required();
    cir_cmd->add_option("--sigma", cir_f.cir.sigma, "volatility sigma > 0")->required();
    cir_cmd->add_option("--rate", cir_f.cir.rate, "interest rate r")->required();
    cir_cmd->add_option("--dividend-h", cir_f.cir.dividend_h, "dividend parameter h")->capture_default_str();
    cir_cmd->add_option("--s-t", cir_f.cir.s_t, "current stock price S_t > 0")->required();
    cir_cmd->add_option("--delta-t", cir_f.cir.delta_t, "horizon dT > 0")->required();
    cir_cmd->add_option("--mode", cir_f.mode, "reflecting | flux")->capture_default_str();

    ValidateFlags validate_f;
    auto* validate_cmd = app.add_subcommand("validate", "run acceptance suites and print a JSON report");
    validate_cmd->add_option("--suite", validate_f.suite, "laplace | inversion | oracle | mc | all")->capture_default_str();
    validate_cmd->add_flag("--fast", validate_f.fast, "fewer Monte Carlo paths and inversion points");
    validate_cmd->add_option("--seed", validate_f.common.seed, "RNG seed of the Monte Carlo suites")->capture_default_str();
    validate_cmd->add_option("--threads", validate_f.common.threads, "worker threads");
    validate_cmd->add_option("-o,--output", validate_f.common.output, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*omega_cmd) return cmd_omega(omega_f);
        if (*density_cmd) return cmd_density(density_f);
        if (*flux_cmd) return cmd_flux(flux_f);
        if (*cir_cmd) return cmd_cir(cir_f);
        if (*validate_cmd) return cmd_validate(validate_f);
    } catch (const Error& e) {
        std::cerr << "fbmfp: error [" << e.reason() << "]: " << e.what() << "\n";
        return e.error_class() == ErrorClass::invalid_input ? kBadInput : kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "fbmfp: error [internal]: " << e.what() << "\n";
        return kNumerical;
    }
    return kBadInput;
}
