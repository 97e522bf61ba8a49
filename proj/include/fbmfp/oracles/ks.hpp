#pragma once

#include <functional>
#include <vector>

namespace fbmfp::oracles {

/// sup_x |F_n(x) - F(x)| for the empirical distribution of `samples`.
/// Samples are copied and sorted; atoms in the sample are handled exactly.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Piecewise-linear interpolant of a CDF tabulated on an increasing grid.
/// Below the grid it interpolates linearly to (0, cdf_at_zero); above it is
/// clamped to the last value.
class TabulatedCdf {
public:
    TabulatedCdf(std::vector<double> x, std::vector<double> cdf, double cdf_at_zero = 0.0);
    double operator()(double x) const;

private:
    std::vector<double> x_, cdf_;
    double at_zero_;
};

}  // namespace fbmfp::oracles
