#pragma once

#include <cmath>
#include <string>

namespace fbmfp {

/// Constants of the scalar fBm Fokker-Planck equation
///
///     u_t = (a t^{2v-1} x u)_xx - ((b x + c) u)_x,   0 < x < inf.
///
/// Supported regime: a > 0, v > 0, b >= 0 (b = 0 through its limits).
struct FpkParams {
    double a = 1.0;  ///< diffusion scale
    double b = 0.0;  ///< drift slope
    double c = 0.0;  ///< drift intercept
    double v = 0.5;  ///< Hurst-derived exponent

    /// Throws DomainError outside the supported regime.
    void validate() const;

    /// Time-dependent diffusion coefficient a t^{2v-1}.
    double diffusion(double t) const { return a * std::pow(t, 2.0 * v - 1.0); }

    /// Exponent c / (a t^{2v-1}) governing the x -> 0 behaviour u ~ x^{alpha-1}.
    double boundary_exponent(double t) const { return c / diffusion(t); }

    /// First moment of the reflecting solution started from a point mass xi.
    double mean(double xi, double t) const;

    std::string describe() const;
};

}  // namespace fbmfp
