#include "fbmfp/oracles/characteristics.hpp"

#include "fbmfp/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>

namespace fbmfp::oracles {

cplx characteristic_omega(double t, cplx s, const InitialDistribution& init,
                          const FpkParams& params, double tol) {
    namespace odeint = boost::numeric::odeint;
    params.validate();
    if (!(t >= 0.0)) throw DomainError("characteristic_omega requires t >= 0");
    if (t == 0.0) return pi_eval(init, s);

    const double m = std::max(2.0, std::ceil(1.0 / params.v));
    const double a = params.a, b = params.b, c = params.c, v = params.v;
    using State = std::array<double, 4>;  // Re s, Im s, Re L, Im L with L = int c sigma dtau
    auto rhs = [&](const State& y, State& dy, double r) {
        const cplx sig(y[0], y[1]);
        const double rp = std::pow(r, m - 1.0);
        const double rq = std::pow(r, 2.0 * v * m - 1.0);
        const cplx ds = a * m * rq * sig * sig - b * m * rp * sig;
        const cplx dl = c * m * rp * sig;
        dy = {ds.real(), ds.imag(), dl.real(), dl.imag()};
    };
    State y{s.real(), s.imag(), 0.0, 0.0};
    const double r_end = std::pow(t, 1.0 / m);
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
    odeint::integrate_adaptive(stepper, rhs, y, r_end, 0.0, -1e-3 * r_end);
    const cplx s0(y[0], y[1]);
    const cplx log_decay(y[2], y[3]);
    // omega(t) = omega(0) exp(-int_0^t c sigma dtau); L accumulated backwards is -int_0^t.
    return pi_eval(init, s0) * std::exp(log_decay);
}

}  // namespace fbmfp::oracles
