#include "fbmfp/errors.hpp"
#include "fbmfp/flux.hpp"
#include "fbmfp/laplace_domain.hpp"
#include "fbmfp/oracles/characteristics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <doctest.h>

#include "support.hpp"

#include <cmath>

using namespace fbmfp;

namespace {
const FpkParams kTypical{1.0, 0.5, 0.3, 0.7};
const auto kUnitMass = InitialDistribution::point_mass(1.0);
}  // namespace

TEST_CASE("pi of a point mass") {
    CHECK(pi_eval(kUnitMass, 0.0) == cplx(1.0, 0.0));
    CHECK(std::abs(pi_eval(InitialDistribution::point_mass(0.5), 2.0) - std::exp(-1.0)) < 1e-16);
    const cplx z(1.0, 1.0);
    const cplx expected = std::exp(-1.0) * cplx(std::cos(1.0), -std::sin(1.0));
    CHECK(std::abs(pi_eval(kUnitMass, z) - expected) < 1e-16);
}

TEST_CASE("pi of a Gaussian bump has unit mass and the right mean") {
    const auto bump = InitialDistribution::gaussian_bump(2.0, 0.1);
    CHECK(bump.total_mass() == rel(1.0, 1e-15));
    const double h = 1e-6;
    const double slope = (pi_eval(bump, h) - pi_eval(bump, -h)).real() / (2.0 * h);
    CHECK(-slope == rel(2.0, 1e-8));
}

TEST_CASE("pi_argument") {
    CHECK(pi_argument(0.0, cplx(3.0, -1.0), kTypical) == cplx(3.0, -1.0));
    const double limit = -1.0 / psi(1.0, kTypical);
    CHECK(pi_argument(1.0, 1e8, kTypical).real() == rel(limit, 1e-6));
    // s e^{bt} / (1 - s e^{bt} Psi(t)) with mpmath Psi(1).
    CHECK(pi_argument(1.0, 2.0, kTypical).real() == rel(1.18808320831934960326, 1e-12));
}

TEST_CASE("pi_argument is positive and increasing on the real axis") {
    for (double t : {0.3, 1.0, 2.5}) {
        double prev = 0.0;
        for (double s = 1e-3; s < 1e4; s *= 2.0) {
            const double cur = pi_argument(t, s, kTypical).real();
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("Ghat values") {
    const KernelContext ctx(kTypical, 1.0);
    const KernelContext no_drift_intercept(FpkParams{1.0, 0.5, 0.0, 0.7}, 1.0);
    CHECK(g_hat({0.0, 1.0, &no_drift_intercept, 2.0}) == cplx(0.0, 0.0));
    CHECK(g_hat({0.4, 0.4, &ctx, 2.0}) == cplx(0.0, 0.0));
    // mpmath quadrature of c / (Delta(mu, 1) + e^{b(mu - 1)} / s) over (0, 1) at s = 2.
    CHECK(g_hat({0.0, 1.0, &ctx, 2.0}).real() == rel(0.41231287057139639279, 1e-10));
}

TEST_CASE("Ghat against a fixed-order Gauss-Legendre reference") {
    const KernelContext ctx(kTypical, 1.0);
    const cplx s(2.0, 3.0);
    // Panels graded towards both ends (Delta has a mu^{2v} cusp at 0), 40-point rule on each.
    cplx reference = 0.0;
    double lo = 0.0;
    for (double hi : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99, 0.999, 0.9999, 1.0}) {
        reference += boost::math::quadrature::gauss<double, 40>::integrate(
            [&](double mu) { return (kTypical.c / g_hat_denominator(ctx, mu, s)).real(); }, lo, hi);
        reference += cplx(0.0, 1.0) * boost::math::quadrature::gauss<double, 40>::integrate(
            [&](double mu) { return (kTypical.c / g_hat_denominator(ctx, mu, s)).imag(); }, lo, hi);
        lo = hi;
    }
    CHECK(std::abs(g_hat({0.0, 1.0, &ctx, s}) - reference) <= 1e-10);
}

TEST_CASE("Ghat is additive over adjacent intervals") {
    const KernelContext ctx(kTypical, 1.5);
    for (cplx s : {cplx(0.5, 0.0), cplx(4.0, 7.0), cplx(-3.0, 20.0)}) {
        const cplx whole = g_hat({0.0, 1.5, &ctx, s});
        const cplx split = g_hat({0.0, 0.6, &ctx, s}) + g_hat({0.6, 1.5, &ctx, s});
        CHECK(std::abs(whole - split) <= 1e-10 * std::max(1.0, std::abs(whole)));
    }
}

TEST_CASE("omega limits") {
    for (cplx s : {cplx(0.7, 0.0), cplx(2.0, 5.0)})
        CHECK(std::abs(omega(0.0, s, kUnitMass, nullptr, kTypical).omega - pi_eval(kUnitMass, s)) == 0.0);
    CHECK(omega(1.0, 1e-8, kUnitMass, nullptr, kTypical).omega.real() == rel(1.0, 1e-6));
}

TEST_CASE("omega at a typical point") {
    // exp(-Ghat) pi(pi_argument), both parts from the mpmath references above.
    const auto ev = omega(1.0, 2.0, kUnitMass, nullptr, kTypical);
    CHECK(ev.omega.real() == rel(0.20181656688028217126, 1e-10));
    CHECK(std::abs(ev.omega.imag()) < 1e-14);
    const cplx by_characteristics = oracles::characteristic_omega(1.0, 2.0, kUnitMass, kTypical);
    CHECK(std::abs(ev.omega - by_characteristics) <= 1e-9);
}

TEST_CASE("omega agrees with the characteristic integration off the real axis") {
    for (const FpkParams& p : {kTypical, FpkParams{0.5, 1.0, 0.2, 0.3}, FpkParams{1.0, 0.0, 0.5, 0.5}})
        for (cplx s : {cplx(0.3, 0.0), cplx(1.0, 2.0), cplx(5.0, -4.0)}) {
            const cplx direct = omega(1.0, s, kUnitMass, nullptr, p).omega;
            const cplx ode = oracles::characteristic_omega(1.0, s, kUnitMass, p);
            CHECK(std::abs(direct - ode) <= 1e-8 * std::max(1.0, std::abs(direct)));
        }
}

TEST_CASE("omega satisfies the transformed equation") {
    for (const FpkParams& p : {kTypical, FpkParams{1.0, 0.0, 0.5, 0.5}, FpkParams{0.5, 1.0, 0.2, 0.3}})
        for (double t : {0.5, 1.0, 2.0})
            for (cplx s : {cplx(0.5, 0.0), cplx(2.0, 1.0), cplx(6.0, -3.0)}) {
                const cplx r = pde_residual(t, s, kUnitMass, nullptr, p);
                const double scale = std::max(1.0, std::abs(omega(t, s, kUnitMass, nullptr, p).omega));
                CHECK(std::abs(r) <= 1e-6 * scale);
            }
}

TEST_CASE("omega is linear in the initial data") {
    const auto first = InitialDistribution::point_mass(0.8);
    const auto second = InitialDistribution::point_mass(2.0);
    const auto mix = InitialDistribution::general(
        {[](cplx z) { return 0.25 * std::exp(-0.8 * z) + 0.75 * std::exp(-2.0 * z); }, 0.0, 1.5,
         "0.25 delta(0.8) + 0.75 delta(2)"});
    const cplx s(1.5, 2.5);
    const cplx combined = 0.25 * omega(1.0, s, first, nullptr, kTypical).omega +
                          0.75 * omega(1.0, s, second, nullptr, kTypical).omega;
    CHECK(std::abs(omega(1.0, s, mix, nullptr, kTypical).omega - combined) <= 1e-13);
}

TEST_CASE("flux right-hand side") {
    CHECK(flux_rhs(0.0, kUnitMass, kTypical) == 0.0);
    const double g = flux_rhs(1.0, kUnitMass, kTypical);
    CHECK(g == rel(std::exp(1.0 / psi(1.0, kTypical)), 1e-14));
    const double h = 1e-5;
    const double numeric = (flux_rhs(1.0 + h, kUnitMass, kTypical) - flux_rhs(1.0 - h, kUnitMass, kTypical)) / (2 * h);
    CHECK(flux_rhs_derivative(1.0, kUnitMass, kTypical) == rel(numeric, 1e-7));
}

TEST_CASE("boundary limit formula") {
    const FpkParams driftless{1.0, 0.0, 0.0, 0.5};
    CHECK(boundary_limit(2.0, kUnitMass, driftless) == rel(0.6065306597126334, 1e-14));
    CHECK(boundary_limit(1.0, kUnitMass, FpkParams{1.0, 0.5, 0.0, 0.7}) ==
          rel(flux_rhs(1.0, kUnitMass, FpkParams{1.0, 0.5, 0.0, 0.7}), 1e-14));
    CHECK(boundary_limit(1.0, kUnitMass, kTypical) == 0.0);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(FpkParams({0.0, 0.5, 0.3, 0.7}).validate(), DomainError);
    CHECK_THROWS_AS(FpkParams({1.0, -0.1, 0.3, 0.7}).validate(), DomainError);
    CHECK_THROWS_AS(FpkParams({1.0, 0.5, 0.3, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(omega(-1.0, 1.0, kUnitMass, nullptr, kTypical), DomainError);
}
