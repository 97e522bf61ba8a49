#pragma once

#include "fbmfp/params.hpp"
#include "fbmfp/special_fn.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fbmfp {

using cplx = std::complex<double>;

/// Point mass at xi: pi(s) = exp(-s xi).
struct PointMass {
    double xi;
};

/// Normal bump of mean `center` and standard deviation `width`,
/// pi(s) = exp(-s center + s^2 width^2 / 2). The mass below x = 0 is ignored,
/// so the bump should sit several widths away from the origin.
struct GaussianBump {
    double center;
    double width;
};

/// User-supplied transform of an initial distribution P(x).
struct GeneralTransform {
    std::function<cplx(cplx)> transform;
    double abscissa = 0.0;    ///< pi(z) converges for Re(z) > abscissa
    double location = 1.0;    ///< representative x scale (used for default grids)
    std::string description;  ///< real-domain description of P, recorded in outputs
};

/// Initial data u(0, x) described through its Laplace transform pi.
class InitialDistribution {
public:
    using Variant = std::variant<PointMass, GaussianBump, GeneralTransform>;

    static InitialDistribution point_mass(double xi);
    static InitialDistribution gaussian_bump(double center, double width);
    static InitialDistribution general(GeneralTransform g);

    const Variant& variant() const { return v_; }
    bool is_point_mass() const { return std::holds_alternative<PointMass>(v_); }

    /// Total mass pi(0).
    double total_mass() const;
    /// Typical x scale of the initial data (xi for a point mass).
    double location() const;
    std::string describe() const;

private:
    explicit InitialDistribution(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

cplx pi_eval(const InitialDistribution& init, cplx z);

/// Argument of pi in the reflecting solution: s e^{bt} / (1 - s e^{bt} Psi(t)).
cplx pi_argument(double t, cplx s, const FpkParams& params);

struct GHatSpec {
    double lower;
    double upper;
    const KernelContext* context;
    cplx s;
    double tolerance = 1e-10;
};

struct GHatResult {
    cplx value;
    double error;
};

/// Ghat(lower -> upper) = int c / (Delta(mu, t_ref) + e^{b(mu - t_ref)} / s) dmu.
/// Adaptive Gauss-Kronrod with breakpoints graded into the boundary layer
/// of width ~ 1/|s a t^{2v-1}| below t_ref.
GHatResult g_hat_detailed(const GHatSpec& query);
inline cplx g_hat(const GHatSpec& query) { return g_hat_detailed(query).value; }

/// Integrand denominator Delta(mu, t_ref) + e^{b(mu - t_ref)}/s of Ghat.
cplx g_hat_denominator(const KernelContext& ctx, double mu, cplx s);

class FluxFunction;

struct LaplaceOptions {
    double tolerance = 1e-10;  ///< absolute tolerance of every inner quadrature / ODE
};

struct LaplaceEvaluation {
    cplx s;
    double t = 0.0;
    std::optional<cplx> c1;  ///< characteristic constant; absent for b = 0 where it diverges
    cplx pi_arg;
    cplx g_hat;
    cplx omega;
    double quadrature_error = 0.0;
    /// s lies in the disc where Re(pi_arg) < 0, adjacent to the essential
    /// singularity at s = 1/(e^{bt} Psi(t)).
    bool near_singular = false;
};

/// omega(t, s) for the given initial data. `flux == nullptr` selects the
/// reflecting solution (f = 0); otherwise the flux term is added.
LaplaceEvaluation omega(double t, cplx s, const InitialDistribution& init,
                        const FluxFunction* flux, const FpkParams& params,
                        const LaplaceOptions& opts = {});

/// Right-hand side of the flux condition, g(t) = pi(-1/Psi(t)); g(0) = pi(+inf) = 0 for
/// transforms that vanish at infinity.
double flux_rhs(double t, const InitialDistribution& init, const FpkParams& params);

/// g'(t) = g(t) xi a t^{2v-1} e^{-bt} / Psi(t)^2 for a point mass at xi
/// (closed form; DomainError for other initial data).
double flux_rhs_derivative(double t, const InitialDistribution& init, const FpkParams& params);

/// omega_t + s (a t^{2v-1} s - b) omega_s + c s omega - f(t) by central
/// differences of step h in t and in s (f = 0 without a flux). Requires
/// t >= h, and t + h within the flux grid when a flux is given.
cplx pde_residual(double t, cplx s, const InitialDistribution& init, const FluxFunction* flux,
                  const FpkParams& params, double h = 1e-4, const LaplaceOptions& opts = {});

/// Boundary limit formula exp(-int_0^t c/Delta(mu,t) dmu) pi(-1/Psi(t)).
/// The exponent diverges logarithmically at mu = t unless c = 0, so the
/// value is 0 for c > 0 and pi(-1/Psi(t)) for c = 0.
double boundary_limit(double t, const InitialDistribution& init, const FpkParams& params);

/// Smooth part of the reflecting density at x -> 0+ when c = 0 (the atom at
/// the origin removed). Throws DomainError for c != 0 or non point-mass data.
double smooth_density_at_origin(double t, const InitialDistribution& init,
                                const FpkParams& params);

}  // namespace fbmfp
