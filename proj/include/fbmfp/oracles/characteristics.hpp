#pragma once

#include "fbmfp/laplace_domain.hpp"

namespace fbmfp::oracles {

/// omega(t, s) in reflecting mode by integrating the first-order PDE
///     omega_t + s (a t^{2v-1} s - b) omega_s = -c s omega
/// along its characteristic backwards from (t, s) to time 0:
///     d sigma/d tau = sigma (a tau^{2v-1} sigma - b),  d ln omega/d tau = -c sigma.
/// Time is reparametrized as tau = r^m so the coefficients stay smooth at 0.
cplx characteristic_omega(double t, cplx s, const InitialDistribution& init,
                          const FpkParams& params, double tol = 1e-13);

}  // namespace fbmfp::oracles
