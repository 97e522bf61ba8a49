#include "fbmfp/errors.hpp"
#include "fbmfp/oracles/feller.hpp"
#include "fbmfp/solver.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>

using namespace fbmfp;

namespace {
const auto kUnitMass = InitialDistribution::point_mass(1.0);
}

TEST_CASE("v = 1/2 density matches the closed form near the mode") {
    const FpkParams p{1.0, 0.5, 0.5, 0.5};
    const auto grid = geometric_grid(0.2, 5.0, 40);
    const auto curve = density_curve(1.0, grid, kUnitMass, BoundaryMode::reflecting, p, {});
    REQUIRE(curve.diagnostics.failed_points == 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double exact = oracles::feller_v_half_density(1.0, grid[i], 1.0, p);
        if (exact < 1e-2 * curve.diagnostics.peak) continue;
        CAPTURE(grid[i]);
        CHECK(curve.u[i] == rel(exact, 1e-3));
    }
    // mpmath Poisson-mixture value at x = 1.
    CHECK(density_at(1.0, 1.0, kUnitMass, p) == rel(0.23717028075642582, 1e-8));
}

TEST_CASE("reflecting densities are normalized") {
    for (const FpkParams& p : {FpkParams{1.0, 0.5, 0.3, 0.7}, FpkParams{0.5, 0.5, 0.3, 0.3},
                               FpkParams{1.0, 0.0, 0.0, 0.5}, FpkParams{2.0, 1.0, 0.1, 0.9}}) {
        CAPTURE(p.describe());
        const auto curve = density_curve(1.0, default_x_grid(1.0, kUnitMass, p), kUnitMass,
                                         BoundaryMode::reflecting, p, {});
        CHECK(curve.diagnostics.failed_points == 0);
        CHECK(std::abs(curve.diagnostics.normalization - 1.0) <= 5e-3);
        CHECK(curve.diagnostics.min_value >= -1e-6 * curve.diagnostics.peak);
    }
}

TEST_CASE("first moment") {
    const FpkParams p{1.0, 0.5, 0.3, 0.7};
    CHECK(p.mean(1.0, 1.0) == rel(2.0379540331202050, 1e-14));
    CHECK(p.mean(1.0, 0.0) == 1.0);
    CHECK(FpkParams({1.0, 0.0, 0.0, 0.3}).mean(1.7, 5.0) == 1.7);
    const auto curve = density_curve(1.0, geometric_grid(1e-3, 20.0, 400), kUnitMass,
                                     BoundaryMode::reflecting, p, {});
    const auto m = moment_check(curve, p);
    CHECK(m.relative_deviation <= 5e-3);
    CHECK_FALSE(m.edge_warning);
}

TEST_CASE("distribution function agrees with the integrated density") {
    const FpkParams p{1.0, 0.5, 0.3, 0.7};
    const auto grid = geometric_grid(1e-3, 3.0, 300);
    const auto curve = density_curve(1.0, grid, kUnitMass, BoundaryMode::reflecting, p, {});
    double acc = curve.diagnostics.below_grid_mass;
    for (std::size_t i = 1; i < grid.size(); ++i)
        acc += 0.5 * (curve.u[i] + curve.u[i - 1]) * (grid[i] - grid[i - 1]);
    CHECK(distribution_at(1.0, 3.0, kUnitMass, p) == doctest::Approx(acc).epsilon(1e-3));
}

TEST_CASE("flux mode loses mass through the boundary") {
    const FpkParams p{1.0, 0.5, 0.2, 0.7};
    const auto curve = density_curve(1.0, default_x_grid(1.0, kUnitMass, p, 48), kUnitMass,
                                     BoundaryMode::flux, p, {});
    CHECK(curve.diagnostics.failed_points == 0);
    CHECK(curve.diagnostics.flux.has_value());
    CHECK(curve.diagnostics.normalization < 1.0);
    CHECK(curve.diagnostics.normalization > 0.5);
}

TEST_CASE("single-point grid") {
    const FpkParams p{1.0, 0.5, 0.3, 0.7};
    const auto curve = density_curve(1.0, {1.0}, kUnitMass, BoundaryMode::reflecting, p, {});
    CHECK(curve.u.size() == 1);
    CHECK(std::isfinite(curve.u[0]));
}

TEST_CASE("grids and regimes are validated") {
    const FpkParams p{1.0, 0.5, 0.3, 0.7};
    CHECK_THROWS_AS(density_curve(1.0, {}, kUnitMass, BoundaryMode::reflecting, p, {}), DomainError);
    CHECK_THROWS_AS(density_curve(1.0, {1.0, 0.5}, kUnitMass, BoundaryMode::reflecting, p, {}),
                    DomainError);
    CHECK_THROWS_AS(density_curve(0.0, {1.0}, kUnitMass, BoundaryMode::reflecting, p, {}), DomainError);
    CHECK_THROWS_AS(density_curve(1.0, {1.0}, kUnitMass, BoundaryMode::reflecting,
                                  FpkParams{1.0, 0.5, -0.3, 0.7}, {}),
                    DomainError);
    CHECK_THROWS_AS(parse_boundary_mode("absorbing"), DomainError);
    const auto g = geometric_grid(0.1, 10.0, 3);
    CHECK(g[1] == doctest::Approx(1.0));
}
