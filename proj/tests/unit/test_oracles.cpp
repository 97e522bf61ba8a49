#include "fbmfp/errors.hpp"
#include "fbmfp/oracles/characteristics.hpp"
#include "fbmfp/oracles/fbm_mc.hpp"
#include "fbmfp/oracles/fd_pde.hpp"
#include "fbmfp/oracles/feller.hpp"
#include "fbmfp/oracles/ks.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace fbmfp;
using namespace fbmfp::oracles;

namespace {

// Asymptotic Kolmogorov distribution with Stephens' finite-n correction.
double kolmogorov_cdf(double d, int n) {
    const double x = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) sum += (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
    return 1.0 - 2.0 * sum;
}

}  // namespace

TEST_CASE("v = 1/2 closed form") {
    const FpkParams p{1.0, 0.5, 0.5, 0.5};
    // scale = (e^{1/2} - 1), dof 1, noncentrality e^{1/2} / scale; mpmath Poisson mixture.
    CHECK(feller_v_half_density(1.0, 1.0, 1.0, p) == rel(0.23717028075642582, 1e-10));
    const auto law = feller_law(1.0, 1.0, p);
    CHECK(law.dof == 1.0);
    CHECK(law.scale == rel(std::exp(0.5) - 1.0, 1e-14));
}

TEST_CASE("v = 1/2 closed form integrates to one and matches its cdf") {
    for (const FpkParams& p : {FpkParams{1.0, 0.0, 1.0, 0.5}, FpkParams{1.0, 0.5, 0.5, 0.5}}) {
        auto pdf = [&](double x) { return feller_v_half_density(1.0, x, 1.0, p); };
        // tanh-sinh copes with the x^{-1/2} endpoint behaviour at one degree of freedom.
        boost::math::quadrature::tanh_sinh<double> integrator;
        const double mass = integrator.integrate(pdf, 0.0, 60.0, 1e-13);
        CHECK(mass == rel(1.0, 1e-8));
        const double part = integrator.integrate(pdf, 0.0, 1.5, 1e-13);
        CHECK(feller_v_half_cdf(1.0, 1.5, 1.0, p) == rel(part, 1e-8));
    }
}

TEST_CASE("v = 1/2 closed form concentrates at the start as t -> 0") {
    const FpkParams p{1.0, 0.5, 0.5, 0.5};
    CHECK(feller_v_half_cdf(1e-5, 0.95, 1.0, p) < 1e-6);
    CHECK(feller_v_half_cdf(1e-5, 1.05, 1.0, p) > 1.0 - 1e-6);
    CHECK_THROWS_AS(feller_law(1.0, 1.0, FpkParams{1.0, 0.5, 0.5, 0.7}), DomainError);
}

TEST_CASE("characteristic integration reduces to pi at t = 0") {
    const auto init = InitialDistribution::point_mass(1.3);
    const cplx s(0.7, 1.1);
    CHECK(std::abs(characteristic_omega(0.0, s, init, FpkParams{1.0, 0.5, 0.3, 0.7}) -
                   std::exp(-1.3 * s)) < 1e-15);
}

TEST_CASE("fractional Gaussian noise autocovariance") {
    CHECK(fgn_autocovariance(0, 0.7) == 1.0);
    CHECK(fgn_autocovariance(1, 0.5) == 0.0);
    CHECK(fgn_autocovariance(1, 0.7) == rel(std::pow(2.0, 1.4) / 2.0 - 1.0, 1e-14));
}

TEST_CASE("Brownian increments are uncorrelated at H = 1/2") {
    FbmSimConfig cfg;
    cfg.hurst = 0.5;
    const int n = 256, pairs = 400;
    FgnGenerator gen(n, 0.5);
    std::vector<double> first, second;
    double lag1 = 0.0, lag0 = 0.0;
    for (int k = 0; k < pairs; ++k) {
        auto rng = path_rng(cfg.seed, static_cast<std::uint64_t>(k));
        gen.generate_pair(rng, first, second);
        for (const auto* path : {&first, &second})
            for (int i = 0; i < n; ++i) {
                lag0 += (*path)[i] * (*path)[i];
                if (i + 1 < n) lag1 += (*path)[i] * (*path)[i + 1];
            }
    }
    const double samples = 2.0 * pairs * n;
    CHECK(std::abs(lag1 / lag0) <= 3.0 / std::sqrt(samples));
    CHECK(lag0 / samples == doctest::Approx(1.0).epsilon(4.0 * std::sqrt(2.0 / samples)));
}

TEST_CASE("fractional Brownian motion covariance") {
    for (double hurst : {0.3, 0.7}) {
        const int n = 64, pairs = 4000;
        const int i = 10, j = 40;  // B at times i and j in unit steps
        FgnGenerator gen(n, hurst);
        std::vector<double> first, second;
        std::vector<double> products;
        for (int k = 0; k < pairs; ++k) {
            auto rng = path_rng(7, static_cast<std::uint64_t>(k));
            gen.generate_pair(rng, first, second);
            for (const auto* path : {&first, &second}) {
                double bi = 0.0, bj = 0.0;
                for (int m = 0; m < j; ++m) {
                    if (m < i) bi += (*path)[m];
                    bj += (*path)[m];
                }
                products.push_back(bi * bj);
            }
        }
        double mean = 0.0, sq = 0.0;
        for (double x : products) mean += x;
        mean /= products.size();
        for (double x : products) sq += (x - mean) * (x - mean);
        const double se = std::sqrt(sq / (products.size() - 1) / products.size());
        const double q = 2.0 * hurst;
        const double exact = 0.5 * (std::pow(i, q) + std::pow(j, q) - std::pow(j - i, q));
        CAPTURE(hurst);
        CHECK(std::abs(mean - exact) <= 4.0 * se);
    }
}

TEST_CASE("path simulation is deterministic and validated") {
    FbmSimConfig cfg;
    cfg.hurst = 0.7;
    cfg.n_paths = 200;
    cfg.n_steps = 32;
    const FpkParams p{1.0, 0.5, 0.3, 0.7};
    const auto a = simulate_fbm_paths(cfg, p);
    const auto b = simulate_fbm_paths(cfg, p);
    CHECK(a == b);
    CHECK(a.size() == 200);
    CHECK(std::all_of(a.begin(), a.end(), [](double x) { return x >= 0.0; }));
    cfg.hurst = 0.5;
    CHECK_THROWS_AS(simulate_fbm_paths(cfg, p), DomainError);
}

TEST_CASE("Kolmogorov-Smirnov self-test") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = 2000;
    std::vector<double> samples(n);
    for (auto& x : samples) x = -std::log1p(-unif(rng));
    const double d = ks_statistic(samples, [](double x) { return x > 0 ? 1.0 - std::exp(-x) : 0.0; });
    CHECK(d < 1.63 / std::sqrt(n));
}

TEST_CASE("Kolmogorov-Smirnov statistic of uniform samples follows its law") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = 100, reps = 2000;
    const double critical = 1.36 / (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    int below = 0;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> s(n);
        for (auto& x : s) x = unif(rng);
        if (ks_statistic(s, [](double x) { return std::clamp(x, 0.0, 1.0); }) <= critical) ++below;
    }
    const double expected = kolmogorov_cdf(critical, n);
    CHECK(static_cast<double>(below) / reps ==
          doctest::Approx(expected).epsilon(4.0 * std::sqrt(expected * (1 - expected) / reps)));
}

TEST_CASE("Kolmogorov-Smirnov statistic handles atoms") {
    // Half the samples at 0 against a cdf with an atom of 1/2 at 0.
    std::vector<double> s{0.0, 0.0, 0.25, 0.75};
    auto cdf = [](double x) { return x < 0.0 ? 0.0 : 0.5 + 0.5 * std::min(x, 1.0); };
    CHECK(ks_statistic(s, cdf) == doctest::Approx(0.125));
}

TEST_CASE("tabulated cdf") {
    const TabulatedCdf cdf({1.0, 2.0}, {0.4, 1.0}, 0.2);
    CHECK(cdf(0.5) == doctest::Approx(0.3));
    CHECK(cdf(1.5) == doctest::Approx(0.7));
    CHECK(cdf(5.0) == 1.0);
}

TEST_CASE("finite-volume solver conserves mass") {
    FdSolverConfig cfg;
    cfg.n_x = 160;
    const auto sol = fd_pde_solve(cfg, FpkParams{1.0, 0.5, 0.3, 0.5}, 1.0, 0.25, 0.5);
    CHECK(std::abs(sol.final_mass - sol.initial_mass) <= 1e-8);
    CHECK(sol.max_step_mass_drift <= 1e-8);
    CHECK(sol.min_value >= 0.0);
    CHECK_THROWS_AS(fd_pde_solve(cfg, FpkParams{1.0, 0.5, 0.3, 0.5}, 1.0, 1e-3, 0.5), DomainError);
}
