#pragma once

#include "fbmfp/solver.hpp"

#include <string>
#include <vector>

namespace fbmfp {

/// Square-root stock model under fBm,
///     dS = [(r - a) S - h] dt + sigma sqrt(S) dB^H,
/// with dividend stream a S + h.
struct CirParams {
    double hurst = 0.5;
    double sigma = 0.1;
    double rate = 0.05;
    double dividend_h = 0.0;
    double s_t = 1.0;      ///< price at the earlier time
    double delta_t = 1.0;  ///< T - t

    void validate() const;
    std::string describe() const;
};

struct CirMapping {
    FpkParams params;
    double xi;  ///< S_t
    double t;   ///< delta T
};

/// a = H sigma^2, v = H, b = r - H sigma^2, c = -h, xi = S_t, t = delta T.
/// Throws DomainError when r - H sigma^2 < 0.
CirMapping map_cir_to_fpk(const CirParams& p);

/// Density of S_T given S_t on the price grid, through density_curve with
/// the point mass at S_t.
DensityCurve cir_transition_density(const CirParams& p, const std::vector<double>& s_grid,
                                    BoundaryMode mode, const InversionConfig& inv,
                                    const SolverOptions& opts = {});

}  // namespace fbmfp
