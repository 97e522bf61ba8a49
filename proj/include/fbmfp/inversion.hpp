#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fbmfp {

enum class InversionMethod { talbot, stehfest, both };

InversionMethod parse_inversion_method(const std::string& name);
std::string to_string(InversionMethod m);

struct InversionConfig {
    InversionMethod method = InversionMethod::talbot;
    int talbot_nodes = 48;
    int stehfest_terms = 16;
    double cross_check_tolerance = 1e-4;
    double absolute_tolerance = 0.0;  ///< floor of the Talbot agreement test and of the negative flag

    void validate() const;
};

struct InversionResult {
    double value = 0.0;
    std::vector<std::pair<std::string, double>> method_values;
    double discrepancy = 0.0;  ///< max pairwise relative difference of method_values
    std::vector<std::string> flags;

    bool has_flag(const std::string& f) const;
};

using ComplexTransform = std::function<std::complex<double>(std::complex<double>)>;
using RealTransform = std::function<double(double)>;

struct TalbotSum {
    double value = 0.0;
    double growth = 0.0;  ///< largest contour term over the term at theta = 0
    double scale = 0.0;   ///< r e^{r x} |F(r)|, the magnitude the sum is measured against
};

/// One Talbot sum on s(theta) = r theta (cot theta + i height), 0 < theta < pi,
/// with r x = min(2 (nodes / height) / 5, 10). height = 1 is the fixed Talbot contour.
TalbotSum talbot_sum(const ComplexTransform& transform, double x, int nodes, double height);

/// Talbot inversion with `nodes` contour points.
///
/// Capping r x at 10 keeps the e^{r x} prefactor, and with it the
/// double-precision cancellation, bounded. Transforms that grow inside the
/// left half-plane (a narrow density far from the origin behaves like a delay
/// e^{-m s}) make the fixed contour useless, so a sum is accepted only when
/// the sums at heights h and 2h (nodes scaled with h) keep their terms within
/// 1e4 of the theta = 0 term and agree to
///   absolute_tolerance + 1e-8 |value| + 1e4 eps scale growth.
/// The height starts at 1 and doubles up to 64; the value at the lower height
/// of the first agreeing pair is returned. Throws InversionError otherwise.
double invert_talbot(const ComplexTransform& transform, double x, int nodes,
                     double absolute_tolerance = 0.0);

/// Gaver-Stehfest inversion along the real axis with `terms` (even, <= 20) terms.
double invert_stehfest(const RealTransform& transform, double x, int terms);

/// Stehfest weights V_1..V_N (index 0 unused).
const std::vector<double>& stehfest_weights(int terms);

/// Real-axis sample points k ln2 / x used by invert_stehfest.
std::vector<double> stehfest_nodes(double x, int terms);

/// Combined inversion. With method = both the Talbot value is reported and
/// the Stehfest value cross-checks it.
InversionResult invert(const ComplexTransform& transform, double x, const InversionConfig& cfg);

double relative_spread(double a, double b);

}  // namespace fbmfp
