#include "fbmfp/errors.hpp"
#include "fbmfp/special_fn.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include "support.hpp"

#include <cmath>

using namespace fbmfp;

TEST_CASE("upper incomplete gamma at closed-form points") {
    CHECK(upper_incomplete_gamma(1.0, 0.0) == rel(1.0, 1e-15));
    CHECK(upper_incomplete_gamma(1.0, 2.0) == rel(0.1353352832366127, 1e-14));
    CHECK(upper_incomplete_gamma(2.0, 1.0) == rel(0.7357588823428847, 1e-14));
}

TEST_CASE("upper incomplete gamma against a 40-digit quadrature reference") {
    // mpmath gammainc(1.4, 1.3, inf) at 40 digits.
    CHECK(upper_incomplete_gamma(1.4, 1.3) ==
          rel(0.37338659611087071125, 1e-14));
}

TEST_CASE("upper incomplete gamma agrees with Boost across regimes") {
    for (double q : {0.05, 0.3, 0.5, 1.0, 1.4, 2.6, 7.5})
        for (double p : {1e-8, 1e-3, 0.1, 0.9, 1.5, 4.0, 20.0}) {
            CAPTURE(q);
            CAPTURE(p);
            CHECK(upper_incomplete_gamma(q, p) ==
                  rel(boost::math::tgamma(q, p), 1e-12));
        }
}

TEST_CASE("upper incomplete gamma recurrence Gamma(q+1, p) = q Gamma(q, p) + p^q e^-p") {
    for (double q : {0.2, 0.7, 1.3, 3.1})
        for (double p : {0.01, 0.5, 2.0, 9.0}) {
            const double lhs = upper_incomplete_gamma(q + 1.0, p);
            const double rhs = q * upper_incomplete_gamma(q, p) + std::pow(p, q) * std::exp(-p);
            CHECK(lhs == rel(rhs, 1e-12));
        }
}

TEST_CASE("upper incomplete gamma is decreasing in its argument") {
    for (double q : {0.3, 1.4, 4.0}) {
        double prev = upper_incomplete_gamma(q, 0.0);
        for (double p = 0.05; p < 12.0; p *= 1.3) {
            const double cur = upper_incomplete_gamma(q, p);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("gamma arguments are validated") {
    CHECK_THROWS_AS(upper_incomplete_gamma(GammaArgs{0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(upper_incomplete_gamma(GammaArgs{1.0, -1.0}), DomainError);
}

TEST_CASE("Psi values") {
    CHECK(psi(0.0, FpkParams{1.0, 0.5, 0.3, 0.7}) == 0.0);
    CHECK(psi(2.0, FpkParams{1.0, 0.0, 0.0, 0.5}) == rel(-2.0, 1e-14));
    // -int_0^1 tau^0.4 e^{-tau/2} d tau, mpmath at 40 digits.
    CHECK(psi(1.0, FpkParams{1.0, 0.5, 0.3, 0.7}) ==
          rel(-0.53842655922827847184, 1e-12));
}

TEST_CASE("Psi is negative and decreasing for b > 0") {
    const FpkParams p{0.8, 1.2, 0.0, 0.35};
    double prev = 0.0;
    for (double mu = 0.01; mu < 20.0; mu *= 1.5) {
        const double cur = psi(mu, p);
        CHECK(cur < 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("Delta values") {
    const FpkParams p{1.0, 0.5, 0.3, 0.7};
    CHECK(delta(1.0, 1.0, p) == 0.0);
    CHECK(delta(1.0, 4.0, FpkParams{1.0, 0.0, 0.0, 0.5}) == rel(3.0, 1e-14));
    // e^{b mu} int_mu^1 a tau^{2v-1} e^{-b tau} d tau at mu = 0.3, mpmath.
    CHECK(delta(0.3, 1.0, p) == rel(0.48452456567149750267, 1e-12));
}

TEST_CASE("Delta keeps relative accuracy as mu approaches t") {
    const FpkParams p{1.0, 0.5, 0.3, 0.7};
    const KernelContext ctx(p, 1.0);
    for (double gap : {1e-3, 1e-6, 1e-9, 1e-12}) {
        // Delta ~ a t^{2v-1} e^{-b t} e^{b mu} gap to first order.
        const double lead = gap;
        CHECK(ctx.delta_gap(gap) == rel(lead, 2.0 * gap));
    }
}

TEST_CASE("small-b limits are continuous across the series switchover") {
    for (double v : {0.3, 0.5, 0.7}) {
        const FpkParams zero{1.3, 0.0, 0.0, v};
        const FpkParams tiny{1.3, 1e-6, 0.0, v};
        for (double mu : {0.5, 1.0, 3.0}) {
            // The first-order b correction is O(b mu), far below 1e-5 here.
            CHECK(psi(mu, tiny) == rel(psi(mu, zero), 1e-5));
            CHECK(delta(mu / 2, mu, tiny) == rel(delta(mu / 2, mu, zero), 1e-5));
        }
    }
}

TEST_CASE("Psi is continuous across the small-b series switchover") {
    // -a sum_k (-b)^k mu^{2v+k} / (k! (2v + k)), summed directly.
    auto series = [](double mu, const FpkParams& p) {
        double sum = 0.0, term = 1.0;
        for (int k = 0; k < 30; ++k) {
            if (k > 0) term *= -p.b * mu / k;
            sum += term / (2.0 * p.v + k);
        }
        return -p.a * std::pow(mu, 2.0 * p.v) * sum;
    };
    for (double v : {0.3, 0.5, 0.7})
        for (double b : {0.99e-4, 1.01e-4, 1e-3}) {
            const FpkParams p{1.3, b, 0.0, v};
            CAPTURE(v);
            CAPTURE(b);
            CHECK(psi(1.0, p) == rel(series(1.0, p), 1e-10));
        }
}

TEST_CASE("kernel context combinations agree with the free functions") {
    const FpkParams p{0.7, 0.4, 0.1, 0.6};
    const KernelContext ctx(p, 2.0);
    for (double mu : {0.0, 0.4, 1.1, 1.9}) {
        CHECK(ctx.psi(mu) == rel(psi(mu, p), 1e-13));
        CHECK(ctx.delta(mu) == rel(delta(mu, 2.0, p), 1e-12));
        // Delta(mu) = Phi(mu) - e^{b(mu - t)} Phi(t).
        CHECK(ctx.delta(mu) ==
              doctest::Approx(ctx.phi(mu) - std::exp(p.b * (mu - 2.0)) * ctx.phi(2.0)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(KernelContext(FpkParams{1.0, 0.0, 0.0, 0.5}, 1.0).phi(0.5), DomainError);
}

TEST_CASE("noncentral chi-squared density") {
    CHECK(noncentral_chi2_pdf(1.0, 2.0, 0.0) == rel(0.3032653298563167, 1e-13));
    CHECK(noncentral_chi2_pdf(0.0, 3.5, 2.0) == 0.0);
    // Poisson mixture summed to convergence in mpmath.
    CHECK(noncentral_chi2_pdf(2.0, 3.0, 1.5) == rel(0.15496299662495928101, 1e-12));
}

TEST_CASE("noncentral chi-squared density integrates to one and matches its cdf") {
    for (double dof : {0.6, 2.0, 5.0})
        for (double nc : {0.0, 0.8, 12.0}) {
            auto pdf = [&](double x) { return noncentral_chi2_pdf(x, dof, nc); };
            // tanh-sinh copes with the x^{dof/2 - 1} endpoint singularity.
            boost::math::quadrature::tanh_sinh<double> integrator;
            const double mass = integrator.integrate(pdf, 0.0, 200.0, 1e-13);
            CAPTURE(dof);
            CAPTURE(nc);
            CHECK(mass == rel(1.0, 1e-8));
            const double partial = integrator.integrate(pdf, 0.0, 3.0, 1e-13);
            CHECK(noncentral_chi2_cdf(3.0, dof, nc) == rel(partial, 1e-8));
        }
}
