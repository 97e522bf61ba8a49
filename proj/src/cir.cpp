#include "fbmfp/cir.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/format.hpp"

#include <cmath>
#include <sstream>

namespace fbmfp {

void CirParams::validate() const {
    if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("hurst must lie in (0, 1)");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
    if (!std::isfinite(rate) || !std::isfinite(dividend_h)) throw DomainError("rate and dividend_h must be finite");
    if (!(s_t > 0.0) || !std::isfinite(s_t)) throw DomainError("s_t must be positive");
    if (!(delta_t > 0.0) || !std::isfinite(delta_t)) throw DomainError("delta_t must be positive");
}

std::string CirParams::describe() const {
    return "hurst=" + shortest(hurst) + ",sigma=" + shortest(sigma) + ",rate=" + shortest(rate) +
           ",dividend_h=" + shortest(dividend_h) + ",s_t=" + shortest(s_t) + ",delta_t=" + shortest(delta_t);
}

CirMapping map_cir_to_fpk(const CirParams& p) {
    p.validate();
    const double a = p.hurst * p.sigma * p.sigma;
    const double b = p.rate - a;
    if (b < 0.0) {
        std::ostringstream msg;
        msg << "unsupported regime: r - H sigma^2 = " << b << " < 0";
        throw DomainError(msg.str());
    }
    CirMapping m{FpkParams{a, b, -p.dividend_h, p.hurst}, p.s_t, p.delta_t};
    m.params.validate();
    return m;
}

DensityCurve cir_transition_density(const CirParams& p, const std::vector<double>& s_grid,
                                    BoundaryMode mode, const InversionConfig& inv,
                                    const SolverOptions& opts) {
    const auto m = map_cir_to_fpk(p);
    const auto init = InitialDistribution::point_mass(m.xi);
    return density_curve(m.t, s_grid, init, mode, m.params, inv, opts);
}

}  // namespace fbmfp
