#include "fbmfp/params.hpp"

#include "fbmfp/format.hpp"

#include "fbmfp/errors.hpp"

#include <cmath>

namespace fbmfp {

void FpkParams::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(v))
        throw DomainError("parameters must be finite");
    if (a <= 0.0) throw DomainError("a must be positive");
    if (v <= 0.0) throw DomainError("v must be positive");
    if (b < 0.0)
        throw DomainError("b < 0 is unsupported: Gamma(2v, bt) with negative argument is not real");
}

double FpkParams::mean(double xi, double t) const {
    if (b == 0.0) return xi + c * t;
    const double growth = std::expm1(b * t);
    return xi * (1.0 + growth) + c * growth / b;
}

std::string FpkParams::describe() const {
    return "a=" + shortest(a) + ",b=" + shortest(b) + ",c=" + shortest(c) + ",v=" + shortest(v);
}

}  // namespace fbmfp
