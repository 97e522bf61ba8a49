#include "fbmfp/inversion.hpp"

#include "fbmfp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

namespace fbmfp {

InversionMethod parse_inversion_method(const std::string& name) {
    if (name == "talbot") return InversionMethod::talbot;
    if (name == "stehfest") return InversionMethod::stehfest;
    if (name == "both") return InversionMethod::both;
    throw DomainError("unknown inversion method '" + name + "'");
}

std::string to_string(InversionMethod m) {
    switch (m) {
        case InversionMethod::talbot: return "talbot";
        case InversionMethod::stehfest: return "stehfest";
        case InversionMethod::both: return "both";
    }
    return "unknown";
}

void InversionConfig::validate() const {
    if (talbot_nodes < 16) throw DomainError("talbot_nodes must be >= 16");
    if (stehfest_terms <= 0 || stehfest_terms % 2 != 0)
        throw DomainError("stehfest_terms must be a positive even integer");
    if (stehfest_terms > 20) throw DomainError("stehfest_terms > 20 overflows double precision");
    if (!(cross_check_tolerance > 0.0)) throw DomainError("cross_check_tolerance must be positive");
    if (!(absolute_tolerance >= 0.0)) throw DomainError("absolute_tolerance must be >= 0");
}

bool InversionResult::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {
constexpr double kExpUnderflow = -745.0;
}

TalbotSum talbot_sum(const ComplexTransform& transform, double x, int nodes, double height) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Talbot inversion requires x > 0");
    if (nodes < 2) throw DomainError("Talbot inversion requires at least 2 nodes");
    if (!(height >= 1.0)) throw DomainError("Talbot contour height must be >= 1");
    using std::numbers::pi;
    const int base = static_cast<int>(std::lround(nodes / height));
    const double rx = std::min(0.4 * std::max(base, 2), 10.0);
    const double r = rx / x;
    const int m = nodes;

    // Terms are e^{s x} F(s) s'(theta) / i, with s'(0) / i = r height.
    const double first = 0.5 * (transform({r, 0.0}) * std::exp(rx)).real() * height;
    double sum = first;
    double largest = std::abs(first);
    for (int k = 1; k < m; ++k) {
        const double theta = k * pi / m;
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s(r * theta * cot, r * height * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        // Past exp underflow a term only matters if F is astronomically large, and
        // then its neighbours already fail the growth test.
        if (x * s.real() < kExpUnderflow) break;
        const auto term = std::exp(x * s) * transform(s) * std::complex<double>(height, sigma);
        sum += term.real();
        largest = std::max(largest, std::abs(term));
    }
    TalbotSum out;
    out.value = r / m * sum;
    out.scale = std::abs(2.0 * first / height) * r;
    out.growth = first != 0.0 ? largest / std::abs(first) : std::numeric_limits<double>::infinity();
    if (!std::isfinite(out.value)) out.growth = std::numeric_limits<double>::infinity();
    return out;
}

double invert_talbot(const ComplexTransform& transform, double x, int nodes, double absolute_tolerance) {
    constexpr double kAcceptedGrowth = 1e4;
    constexpr double kAgreement = 1e-8;
    constexpr double kRoundoff = 1e4 * std::numeric_limits<double>::epsilon();
    constexpr double kMaxHeight = 64.0;
    auto sum_at = [&](double height) {
        return talbot_sum(transform, x, static_cast<int>(nodes * height), height);
    };
    auto sound = [&](const TalbotSum& s) { return s.growth <= kAcceptedGrowth; };
    TalbotSum lower = sum_at(1.0);
    for (double height = 2.0; height <= kMaxHeight; height *= 2.0) {
        const TalbotSum upper = sum_at(height);
        const double tolerance =
            absolute_tolerance + kAgreement * std::max(std::abs(lower.value), std::abs(upper.value)) +
            kRoundoff * std::max(lower.scale * lower.growth, upper.scale * upper.growth);
        if (sound(lower) && sound(upper) && std::abs(lower.value - upper.value) <= tolerance)
            return lower.value;
        lower = upper;
    }
    std::ostringstream msg;
    msg << "Talbot contours up to height " << kMaxHeight << " did not agree at x = " << x;
    throw InversionError(msg.str());
}

const std::vector<double>& stehfest_weights(int terms) {
    if (terms <= 0 || terms % 2 != 0 || terms > 20)
        throw DomainError("stehfest_terms must be even and in [2, 20]");
    static std::array<std::vector<double>, 21> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto& w = cache[static_cast<std::size_t>(terms)];
    if (!w.empty()) return w;

    const int half = terms / 2;
    auto fact = [](int n) {
        long double f = 1.0L;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    w.assign(static_cast<std::size_t>(terms) + 1, 0.0);
    for (int k = 1; k <= terms; ++k) {
        long double acc = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            acc += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
                   (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
        }
        const int sign = ((k + half) % 2 == 0) ? 1 : -1;
        w[static_cast<std::size_t>(k)] = static_cast<double>(sign * acc);
    }
    return w;
}

std::vector<double> stehfest_nodes(double x, int terms) {
    std::vector<double> s(static_cast<std::size_t>(terms));
    const double step = std::numbers::ln2 / x;
    for (int k = 1; k <= terms; ++k) s[static_cast<std::size_t>(k - 1)] = k * step;
    return s;
}

double invert_stehfest(const RealTransform& transform, double x, int terms) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Stehfest inversion requires x > 0");
    const auto& w = stehfest_weights(terms);
    const auto nodes = stehfest_nodes(x, terms);
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k)
        sum += w[static_cast<std::size_t>(k)] * transform(nodes[static_cast<std::size_t>(k - 1)]);
    const double value = std::numbers::ln2 / x * sum;
    if (!std::isfinite(value)) throw InversionError("Stehfest inversion produced a non-finite value");
    return value;
}

double relative_spread(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

InversionResult invert(const ComplexTransform& transform, double x, const InversionConfig& cfg) {
    cfg.validate();
    InversionResult out;
    std::vector<std::string> errors;
    const bool use_talbot = cfg.method != InversionMethod::stehfest;
    const bool use_stehfest = cfg.method != InversionMethod::talbot;

    if (use_talbot) {
        try {
            out.method_values.emplace_back("talbot", invert_talbot(transform, x, cfg.talbot_nodes, cfg.absolute_tolerance));
        } catch (const Error& e) {
            errors.push_back(std::string("talbot: ") + e.what());
            out.flags.push_back("talbot_failed");
        }
    }
    if (use_stehfest) {
        try {
            auto real_transform = [&](double s) { return transform({s, 0.0}).real(); };
            out.method_values.emplace_back("stehfest",
                                           invert_stehfest(real_transform, x, cfg.stehfest_terms));
        } catch (const Error& e) {
            errors.push_back(std::string("stehfest: ") + e.what());
            out.flags.push_back("stehfest_failed");
        }
    }
    if (out.method_values.empty()) {
        std::ostringstream msg;
        msg << "all inversion methods failed at x = " << x;
        for (const auto& e : errors) msg << "; " << e;
        throw InversionError(msg.str());
    }
    out.value = out.method_values.front().second;
    for (std::size_t i = 0; i < out.method_values.size(); ++i)
        for (std::size_t j = i + 1; j < out.method_values.size(); ++j)
            out.discrepancy = std::max(out.discrepancy, relative_spread(out.method_values[i].second,
                                                                        out.method_values[j].second));
    if (out.discrepancy > cfg.cross_check_tolerance) out.flags.push_back("discrepancy");
    if (out.value < -cfg.absolute_tolerance) out.flags.push_back("negative");
    return out;
}

}  // namespace fbmfp
