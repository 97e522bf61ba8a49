#include "fbmfp/oracles/ks.hpp"

#include "fbmfp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbmfp::oracles {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("ks_statistic needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        // Left limit against the empirical value before the tie, so model atoms count.
        const double below = cdf(std::nextafter(samples[i], -std::numeric_limits<double>::infinity()));
        d = std::max(d, std::abs(static_cast<double>(i) / n - below));
        d = std::max(d, std::abs(static_cast<double>(j) / n - cdf(samples[i])));
        i = j;
    }
    return d;
}

TabulatedCdf::TabulatedCdf(std::vector<double> x, std::vector<double> cdf, double cdf_at_zero)
    : x_(std::move(x)), cdf_(std::move(cdf)), at_zero_(cdf_at_zero) {
    if (x_.size() < 2 || x_.size() != cdf_.size()) throw DomainError("tabulated cdf needs matching grids");
    if (!(x_.front() > 0.0)) throw DomainError("tabulated cdf grid must be positive");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1])) throw DomainError("tabulated cdf grid must be increasing");
}

double TabulatedCdf::operator()(double x) const {
    if (x < 0.0) return 0.0;
    if (x <= x_.front()) return at_zero_ + (cdf_.front() - at_zero_) * x / x_.front();
    if (x >= x_.back()) return cdf_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin());
    const double w = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
    return (1.0 - w) * cdf_[k - 1] + w * cdf_[k];
}

}  // namespace fbmfp::oracles
