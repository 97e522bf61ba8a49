#pragma once

#include "fbmfp/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <type_traits>
#include <vector>

namespace fbmfp::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 2000;
};

template <typename T>
struct Result {
    T value{};
    double error = 0.0;
    int intervals = 0;
    int evaluations = 0;
};

namespace detail {

// Kronrod 15 / Gauss 7 nodes and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& z) { return std::abs(z); }

template <typename T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F, typename T>
Panel<T> kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T resg = fc * wg[3];
    T resk = fc * wgk[7];
    double resabs = magnitude(fc) * wgk[7];
    std::array<T, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        resk += (f1[j] + f2[j]) * wgk[j];
        resabs += (magnitude(f1[j]) + magnitude(f2[j])) * wgk[j];
        if (j % 2 == 1) resg += (f1[j] + f2[j]) * wg[j / 2];
    }
    const T mean = resk * 0.5;
    double resasc = magnitude(fc - mean) * wgk[7];
    for (int j = 0; j < 7; ++j)
        resasc += (magnitude(f1[j] - mean) + magnitude(f2[j] - mean)) * wgk[j];
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = magnitude((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a real- or
/// complex-valued integrand over [a, b]. Interior breakpoints seed the
/// initial partition. Throws QuadratureError when the tolerance cannot be
/// met within `max_intervals` panels.
template <typename F>
auto integrate(F&& f, double a, double b, const Options& opt = {},
               std::span<const double> breakpoints = {}) {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    Result<T> out;
    if (a == b) return out;

    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > std::min(a, b) && p < std::max(a, b)) cuts.push_back(p);
    cuts.push_back(b);
    if (a < b) std::sort(cuts.begin(), cuts.end());
    else std::sort(cuts.begin(), cuts.end(), std::greater<>());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<detail::Panel<T>> heap;
    T total{};
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = detail::kronrod15<F, T>(f, cuts[i], cuts[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    out.evaluations = 15 * static_cast<int>(heap.size());

    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };
    while (total_err > target()) {
        if (static_cast<int>(heap.size()) >= opt.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive quadrature on [" << a << ", " << b << "] reached " << heap.size()
                << " intervals with error estimate " << total_err << " > " << target();
            throw QuadratureError(msg.str(), total_err);
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {
            // Interval can no longer be split in double precision.
            throw QuadratureError("adaptive quadrature interval underflow", total_err);
        }
        auto left = detail::kronrod15<F, T>(f, worst.a, mid);
        auto right = detail::kronrod15<F, T>(f, mid, worst.b);
        out.evaluations += 30;
        total += (left.value + right.value) - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to drop the accumulated update rounding.
    total = T{};
    total_err = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().value;
        total_err += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = total_err;
    return out;
}

/// Fixed N-point Gauss-Legendre rule on [a, b].
template <int N, typename F>
auto gauss_legendre(F&& f, double a, double b) {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T sum{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            sum += f(center) * w[i];
        } else {
            sum += (f(center - half * x[i]) + f(center + half * x[i])) * w[i];
        }
    }
    return sum * half;
}

}  // namespace fbmfp::quad
