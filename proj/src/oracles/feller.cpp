#include "fbmfp/oracles/feller.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/special_fn.hpp"

#include <cmath>

namespace fbmfp::oracles {

FellerLaw feller_law(double t, double xi, const FpkParams& params) {
    params.validate();
    if (params.v != 0.5) throw DomainError("the closed-form oracle requires v = 0.5");
    if (!(params.c > 0.0)) throw DomainError("the closed-form oracle requires 2c/a > 0");
    if (!(t > 0.0)) throw DomainError("the closed-form oracle requires t > 0");
    if (!(xi > 0.0)) throw DomainError("the closed-form oracle requires xi > 0");
    const double scale =
        params.b == 0.0 ? 0.5 * params.a * t : params.a * std::expm1(params.b * t) / (2.0 * params.b);
    return {scale, 2.0 * params.c / params.a, xi * std::exp(params.b * t) / scale};
}

double feller_v_half_density(double t, double x, double xi, const FpkParams& params) {
    const auto law = feller_law(t, xi, params);
    if (x < 0.0) throw DomainError("density requires x >= 0");
    return noncentral_chi2_pdf(x / law.scale, law.dof, law.noncentrality) / law.scale;
}

double feller_v_half_cdf(double t, double x, double xi, const FpkParams& params) {
    const auto law = feller_law(t, xi, params);
    if (x <= 0.0) return 0.0;
    return noncentral_chi2_cdf(x / law.scale, law.dof, law.noncentrality);
}

}  // namespace fbmfp::oracles
