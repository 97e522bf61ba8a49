#include "fbmfp/errors.hpp"
#include "fbmfp/flux.hpp"

#include <doctest.h>

#include "support.hpp"

#include <cmath>

using namespace fbmfp;

namespace {
const auto kUnitMass = InitialDistribution::point_mass(1.0);
}

TEST_CASE("with c = 0 the flux is minus the derivative of the right-hand side") {
    const FpkParams p{1.0, 0.5, 0.0, 0.7};
    const auto flux = solve_flux(uniform_time_grid(1.0, 200), kUnitMass, p);
    const auto& grid = flux.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CAPTURE(grid[i]);
        CHECK(std::abs(flux.values()[i] + flux_rhs_derivative(grid[i], kUnitMass, p)) <= 1e-4);
    }
}

TEST_CASE("solved flux satisfies the boundary condition under independent quadrature") {
    const FpkParams p{1.0, 0.5, 0.2, 0.7};
    const auto flux = solve_flux(uniform_time_grid(1.0, 64), kUnitMass, p);
    for (double t : flux.grid()) {
        CAPTURE(t);
        CHECK(flux_condition_residual(flux, t, kUnitMass, p) <= 1e-6);
    }
}

TEST_CASE("reflecting data does not satisfy the flux condition") {
    const FpkParams p{1.0, 0.5, 0.0, 0.7};
    const auto grid = uniform_time_grid(1.0, 8);
    const FluxFunction zero(grid, std::vector<double>(grid.size() - 1, 0.0),
                            std::vector<double>(grid.size(), 0.0),
                            std::vector<std::vector<double>>(grid.size()), {});
    const double residual = flux_condition_residual(zero, 1.0, kUnitMass, p);
    CHECK(residual == rel(flux_rhs(1.0, kUnitMass, p), 1e-12));
    CHECK(residual > 0.0);
}

TEST_CASE("the t = 0 node is finite with zero residual") {
    const FpkParams p{1.0, 0.5, 0.2, 0.7};
    const auto flux = solve_flux(uniform_time_grid(1.0, 16), kUnitMass, p);
    CHECK(std::isfinite(flux.values().front()));
    CHECK(flux_condition_residual(flux, 0.0, kUnitMass, p) == 0.0);
}

TEST_CASE("non-integrable kernels are refused") {
    // c / (a t^{2v-1}) = 2 at every node with a non-negligible right-hand side.
    const FpkParams p{1.0, 0.5, 2.0, 0.5};
    CHECK_THROWS_AS(solve_flux(uniform_time_grid(1.0, 16), kUnitMass, p), NonIntegrableKernelError);
}

TEST_CASE("uniform time grid") {
    const auto g = uniform_time_grid(2.0, 4);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 2.0);
    CHECK(g[1] == 0.5);
    CHECK_THROWS_AS(uniform_time_grid(1.0, 0), DomainError);
}
