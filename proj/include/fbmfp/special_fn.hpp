#pragma once

#include "fbmfp/params.hpp"

#include <vector>

namespace fbmfp {

/// Order/argument pair of an incomplete gamma evaluation.
struct GammaArgs {
    double order;     ///< q > 0
    double argument;  ///< p >= 0

    void validate() const;
};

/// Upper incomplete gamma Gamma(q, p) = int_p^inf x^{q-1} e^{-x} dx.
///
/// Series for p < q + 1, Lentz continued fraction otherwise. A dedicated
/// branch handles q < 1/2 with small p, where Gamma(q) - gamma(q, p) would
/// cancel. At p = 0 the complete gamma function is returned.
double upper_incomplete_gamma(double q, double p);
inline double upper_incomplete_gamma(const GammaArgs& g) {
    g.validate();
    return upper_incomplete_gamma(g.order, g.argument);
}

/// Lower incomplete gamma divided by x^q: gamma(q, x) / x^q. Entire in x,
/// equal to 1/q at x = 0, so it never forms the divergent b^{-2v} factors.
double scaled_lower_gamma(double q, double x);

/// Regularized lower incomplete gamma P(q, x).
double regularized_gamma_p(double q, double x);

/// Psi(mu) = a b^{-2v} (Gamma(2v, b mu) - Gamma(2v)), with the b -> 0 limit
/// -a mu^{2v} / (2v). Three-term series in b mu below 1e-4.
double psi(double mu, const FpkParams& params);

/// Delta(mu, t) = a b^{-2v} e^{b mu} (Gamma(2v, b mu) - Gamma(2v, b t)), for 0 <= mu <= t.
/// Equivalently e^{b mu} int_mu^t e^{-b tau} a tau^{2v-1} d tau, which is how it is
/// evaluated close to t to keep full relative accuracy as mu -> t.
double delta(double mu, double t_ref, const FpkParams& params);

/// Noncentral chi-squared density evaluated through the modified Bessel
/// function of the first kind (series summed in log space).
double noncentral_chi2_pdf(double x, double dof, double noncentrality);

/// Noncentral chi-squared distribution function (Poisson mixture of central laws).
double noncentral_chi2_cdf(double x, double dof, double noncentrality);

/// Kernel combinations at a fixed reference time t_ref.
///
///   Phi(mu)   = a b^{-2v} Gamma(2v, b mu) e^{b mu}            (b > 0 only)
///   Psi(mu)   = a b^{-2v} (Gamma(2v, b mu) - Gamma(2v))
///   Delta(mu) = a b^{-2v} e^{b mu} (Gamma(2v, b mu) - Gamma(2v, b t_ref))
///
/// On [t_ref/2, t_ref] Delta is evaluated as (t_ref - mu) D(mu) with D a
/// Chebyshev interpolant, built at construction to roundoff, of the smooth
/// quotient Delta(mu) / (t_ref - mu).
///
/// Immutable after construction.
class KernelContext {
public:
    KernelContext(const FpkParams& params, double t_ref);

    const FpkParams& params() const { return params_; }
    double t_ref() const { return t_ref_; }

    /// Throws DomainError for b == 0, where Phi diverges.
    double phi(double mu) const;
    double psi(double mu) const;
    double delta(double mu) const;
    /// Delta(t_ref - gap), accurate in relative terms for tiny gaps.
    double delta_gap(double gap) const;
    double psi_at_ref() const { return psi_ref_; }

private:
    double near_quotient(double mu) const;

    FpkParams params_;
    double t_ref_;
    double psi_ref_;
    std::vector<double> near_coeffs_;  ///< empty: evaluate Delta directly
};

}  // namespace fbmfp
