#pragma once

#include "fbmfp/params.hpp"

namespace fbmfp::oracles {

/// Scale, degrees of freedom and noncentrality of the square-root diffusion
/// dX = (bX + c) dt + sqrt(2aX) dW started at xi: X_t / scale ~ chi'^2(dof, noncentrality).
struct FellerLaw {
    double scale;          ///< a (e^{bt} - 1) / (2b), or a t / 2 at b = 0
    double dof;            ///< 2c / a
    double noncentrality;  ///< xi e^{bt} / scale
};

/// Requires v = 0.5, c > 0, t > 0, xi > 0.
FellerLaw feller_law(double t, double xi, const FpkParams& params);

double feller_v_half_density(double t, double x, double xi, const FpkParams& params);
double feller_v_half_cdf(double t, double x, double xi, const FpkParams& params);

}  // namespace fbmfp::oracles
