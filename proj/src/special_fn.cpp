#include "fbmfp/special_fn.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <functional>
#include <limits>
#include <sstream>

namespace fbmfp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

// Below this b*mu the three-term expansion of gamma(q, x)/x^q is used.
constexpr double kSmallArgument = 1e-4;

// sum_{n>=0} x^n / (q (q+1) ... (q+n)); gamma(q, x) = x^q e^{-x} * this.
double lower_series(double q, double x) {
    double term = 1.0 / q;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
        term *= x / (q + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return sum;
    }
    throw NumericalError("series_divergence", "incomplete gamma series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Gamma(q, x) e^{x} x^{-q}.
double upper_fraction(double q, double x) {
    double b = x + 1.0 - q;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - q);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericalError("series_divergence", "incomplete gamma continued fraction did not converge");
}

// Gamma(q, p) for q < 1/2, p <= 1.5, written so nothing of size Gamma(q) is subtracted:
//   Gamma(q, p) = (Gamma(1+q) - 1)/q - (p^q - 1)/q - p^q sum_{n>=1} (-p)^n / (n! (q+n)).
double upper_small_order(double q, double p) {
    const double gamma1p_m1_over_q = std::expm1(std::lgamma(1.0 + q)) / q;
    const double log_p = std::log(p);
    const double pq_m1_over_q = std::expm1(q * log_p) / q;
    double term = 1.0;
    double sum = 0.0;
    for (int n = 1; n < kMaxIter; ++n) {
        term *= -p / n;
        const double contrib = term / (q + n);
        sum += contrib;
        if (std::abs(contrib) < kEps * std::abs(sum)) break;
    }
    return gamma1p_m1_over_q - pq_m1_over_q - std::exp(q * log_p) * sum;
}

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        std::ostringstream msg;
        msg << name << " must be finite";
        throw DomainError(msg.str());
    }
}

}  // namespace

void GammaArgs::validate() const {
    require_finite(order, "gamma order");
    require_finite(argument, "gamma argument");
    if (order <= 0.0) throw DomainError("incomplete gamma requires order > 0");
    if (argument < 0.0)
        throw DomainError("incomplete gamma with negative argument is outside the supported regime");
}

double upper_incomplete_gamma(double q, double p) {
    GammaArgs{q, p}.validate();
    if (p == 0.0) return std::tgamma(q);
    if (p < q + 1.0) {
        if (q < 0.5 && p <= 1.5) return upper_small_order(q, p);
        const double lower = std::exp(q * std::log(p) - p) * lower_series(q, p);
        return std::tgamma(q) - lower;
    }
    return std::exp(q * std::log(p) - p) * upper_fraction(q, p);
}

double scaled_lower_gamma(double q, double x) {
    GammaArgs{q, x}.validate();
    if (x == 0.0) return 1.0 / q;
    if (x < q + 1.0) return std::exp(-x) * lower_series(q, x);
    const double upper_scaled = std::exp(-x) * upper_fraction(q, x);  // Gamma(q,x) / x^q
    return std::tgamma(q) * std::exp(-q * std::log(x)) - upper_scaled;
}

double regularized_gamma_p(double q, double x) {
    GammaArgs{q, x}.validate();
    if (x == 0.0) return 0.0;
    const double log_prefix = q * std::log(x) - x - std::lgamma(q);
    if (x < q + 1.0) return std::exp(log_prefix) * lower_series(q, x);
    return 1.0 - std::exp(log_prefix) * upper_fraction(q, x);
}

double psi(double mu, const FpkParams& params) {
    params.validate();
    require_finite(mu, "mu");
    if (mu < 0.0) throw DomainError("psi requires mu >= 0");
    if (mu == 0.0) return 0.0;
    const double q = 2.0 * params.v;
    const double x = params.b * mu;
    const double mu_pow = std::pow(mu, q);
    double scaled;
    if (x < kSmallArgument) {
        scaled = 1.0 / q - x / (q + 1.0) + 0.5 * x * x / (q + 2.0);
    } else {
        scaled = scaled_lower_gamma(q, x);
    }
    return -params.a * mu_pow * scaled;
}

double delta(double mu, double t_ref, const FpkParams& params) {
    params.validate();
    require_finite(mu, "mu");
    require_finite(t_ref, "t_ref");
    if (mu < 0.0) throw DomainError("delta requires mu >= 0");
    if (mu > t_ref) throw DomainError("delta requires mu <= t_ref");
    if (mu == t_ref) return 0.0;

    const double width = t_ref - mu;
    if (width <= 0.5 * t_ref && params.b * width < 1.0) {
        // Close to t_ref the gamma difference cancels; integrate the smooth
        // integrand e^{b(mu - tau)} a tau^{2v-1} on [mu, t_ref] directly.
        const double q1 = 2.0 * params.v - 1.0;
        const double a = params.a, b = params.b;
        return quad::gauss_legendre<24>(
            [=](double tau) { return a * std::pow(tau, q1) * std::exp(b * (mu - tau)); }, mu,
            t_ref);
    }
    return std::exp(params.b * mu) * (psi(mu, params) - psi(t_ref, params));
}

namespace {

// log I_nu(z) for nu > -1, z > 0 by the ascending series, summed relative to
// its largest term so large arguments neither overflow nor underflow.
double log_bessel_i(double nu, double z) {
    const double log_half_z = std::log(0.5 * z);
    const double log_t0 = nu * log_half_z - std::lgamma(nu + 1.0);
    // Terms rise until m ~ z/2 then fall; start at the peak and walk both ways.
    const double disc = std::sqrt(nu * nu + z * z);
    const int peak = std::max(0, static_cast<int>(std::floor(0.5 * (disc - nu))));

    auto log_term = [&](int m) {
        return (2.0 * m + nu) * log_half_z - std::lgamma(m + 1.0) - std::lgamma(m + nu + 1.0);
    };
    const double log_peak = peak == 0 ? log_t0 : log_term(peak);

    double sum = 1.0;
    double lt = log_peak;
    for (int m = peak; m < peak + kMaxIter; ++m) {
        lt += 2.0 * log_half_z - std::log(m + 1.0) - std::log(m + nu + 1.0);
        const double r = std::exp(lt - log_peak);
        sum += r;
        if (r < kEps * sum) break;
    }
    lt = log_peak;
    for (int m = peak; m > 0; --m) {
        lt -= 2.0 * log_half_z - std::log(static_cast<double>(m)) - std::log(m + nu);
        const double r = std::exp(lt - log_peak);
        sum += r;
        if (r < kEps * sum) break;
    }
    return log_peak + std::log(sum);
}

void validate_chi2(double x, double dof, double noncentrality) {
    require_finite(x, "x");
    require_finite(dof, "dof");
    require_finite(noncentrality, "noncentrality");
    if (x < 0.0) throw DomainError("noncentral chi-squared requires x >= 0");
    if (dof <= 0.0) throw DomainError("noncentral chi-squared requires dof > 0");
    if (noncentrality < 0.0) throw DomainError("noncentral chi-squared requires noncentrality >= 0");
}

}  // namespace

double noncentral_chi2_pdf(double x, double dof, double noncentrality) {
    validate_chi2(x, dof, noncentrality);
    const double half_k = 0.5 * dof;
    if (x == 0.0) {
        if (dof > 2.0) return 0.0;
        if (dof < 2.0) return std::numeric_limits<double>::infinity();
        return 0.5 * std::exp(-0.5 * noncentrality);
    }
    if (noncentrality == 0.0) {
        return std::exp((half_k - 1.0) * std::log(x) - 0.5 * x - half_k * std::log(2.0) -
                        std::lgamma(half_k));
    }
    const double nu = half_k - 1.0;
    const double z = std::sqrt(noncentrality * x);
    const double log_pdf = std::log(0.5) - 0.5 * (x + noncentrality) +
                           0.5 * nu * std::log(x / noncentrality) + log_bessel_i(nu, z);
    return std::exp(log_pdf);
}

double noncentral_chi2_cdf(double x, double dof, double noncentrality) {
    validate_chi2(x, dof, noncentrality);
    if (x == 0.0) return 0.0;
    const double half_lambda = 0.5 * noncentrality;
    if (half_lambda == 0.0) return regularized_gamma_p(0.5 * dof, 0.5 * x);
    // Poisson weights walked outward from the mode j ~ lambda/2.
    const int mode = static_cast<int>(std::floor(half_lambda));
    auto weight = [&](int j) {
        return std::exp(-half_lambda + j * std::log(half_lambda) - std::lgamma(j + 1.0));
    };
    double sum = 0.0;
    double mass = 0.0;
    for (int j = mode; j < mode + kMaxIter; ++j) {
        const double w = weight(j);
        sum += w * regularized_gamma_p(0.5 * dof + j, 0.5 * x);
        mass += w;
        if (w < 1e-18 && j > mode + 10) break;
    }
    for (int j = mode - 1; j >= 0; --j) {
        const double w = weight(j);
        sum += w * regularized_gamma_p(0.5 * dof + j, 0.5 * x);
        mass += w;
        if (w < 1e-18) break;
    }
    return std::min(1.0, sum);
}

namespace {

// Chebyshev coefficients of f on [lo, hi] from n first-kind nodes.
std::vector<double> chebyshev_fit(const std::function<double(double)>& f, double lo, double hi, int n) {
    using std::numbers::pi;
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double x = std::cos(pi * (k + 0.5) / n);
        values[static_cast<std::size_t>(k)] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
    }
    std::vector<double> coeffs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += values[static_cast<std::size_t>(k)] * std::cos(pi * j * (k + 0.5) / n);
        coeffs[static_cast<std::size_t>(j)] = (j == 0 ? 1.0 : 2.0) * sum / n;
    }
    return coeffs;
}

double clenshaw(const std::vector<double>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = c.size(); j-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + c[j];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + c[0];
}

}  // namespace

KernelContext::KernelContext(const FpkParams& params, double t_ref)
    : params_(params), t_ref_(t_ref), psi_ref_(0.0) {
    params_.validate();
    require_finite(t_ref, "t_ref");
    if (t_ref < 0.0) throw DomainError("kernel context requires t_ref >= 0");
    psi_ref_ = fbmfp::psi(t_ref_, params_);
    if (t_ref_ == 0.0) return;

    auto quotient = [&](double mu) { return fbmfp::delta(mu, t_ref_, params_) / (t_ref_ - mu); };
    for (int n = 16; n <= 128; n *= 2) {
        auto coeffs = chebyshev_fit(quotient, 0.5 * t_ref_, t_ref_, n);
        double largest = 0.0;
        for (double c : coeffs) largest = std::max(largest, std::abs(c));
        const double tail = std::abs(coeffs[coeffs.size() - 1]) + std::abs(coeffs[coeffs.size() - 2]) +
                            std::abs(coeffs[coeffs.size() - 3]);
        // Converged once the last coefficients sit on the roundoff plateau of the samples.
        constexpr double eps = std::numeric_limits<double>::epsilon();
        if (tail <= 8.0 * eps * largest) {
            while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 2.0 * eps * largest) coeffs.pop_back();
            near_coeffs_ = std::move(coeffs);
            return;
        }
    }
}

double KernelContext::near_quotient(double mu) const {
    return clenshaw(near_coeffs_, (4.0 * mu - 3.0 * t_ref_) / t_ref_);
}

double KernelContext::phi(double mu) const {
    if (params_.b == 0.0) throw DomainError("Phi diverges at b = 0; use psi/delta");
    const double q = 2.0 * params_.v;
    return params_.a * std::pow(params_.b, -q) * upper_incomplete_gamma(q, params_.b * mu) *
           std::exp(params_.b * mu);
}

double KernelContext::psi(double mu) const { return fbmfp::psi(mu, params_); }

double KernelContext::delta(double mu) const {
    if (mu < 0.0 || mu > t_ref_) throw DomainError("delta requires 0 <= mu <= t_ref");
    if (mu == t_ref_) return 0.0;
    const double width = t_ref_ - mu;
    if (!near_coeffs_.empty() && width <= 0.5 * t_ref_) return width * near_quotient(mu);
    if (width <= 0.5 * t_ref_ && params_.b * width < 1.0) return fbmfp::delta(mu, t_ref_, params_);
    return std::exp(params_.b * mu) * (fbmfp::psi(mu, params_) - psi_ref_);
}

double KernelContext::delta_gap(double gap) const {
    if (gap < 0.0 || gap > t_ref_) throw DomainError("delta_gap requires 0 <= gap <= t_ref");
    if (gap == 0.0) return 0.0;
    if (!near_coeffs_.empty() && gap <= 0.5 * t_ref_) return gap * near_quotient(t_ref_ - gap);
    if (gap <= 0.5 * t_ref_ && params_.b * gap < 1.0) {
        const double q1 = 2.0 * params_.v - 1.0;
        const double a = params_.a, b = params_.b, t = t_ref_;
        return quad::gauss_legendre<24>(
            [=](double y) { return a * std::pow(t - y, q1) * std::exp(b * (y - gap)); }, 0.0, gap);
    }
    return delta(t_ref_ - gap);
}

}  // namespace fbmfp
