#pragma once

#include "fbmfp/params.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace fbmfp::oracles {

enum class FbmScheme {
    /// Full-truncation Euler with the deterministic correction that removes the
    /// correlation between sqrt(X_n) and the next fGn increment, so the scheme
    /// targets the Fokker-Planck dynamics with diffusion rate d(t^{2H})/dt.
    wick_euler,
    /// Plain full-truncation Euler on the fGn increments (diagnostic only).
    pathwise_euler,
};

struct FbmSimConfig {
    double hurst = 0.5;
    int n_paths = 200000;
    int n_steps = 1000;
    double horizon = 1.0;
    double x0 = 1.0;
    std::uint64_t seed = 20240601;
    FbmScheme scheme = FbmScheme::wick_euler;
    unsigned threads = 0;  ///< 0 = default_thread_count()

    void validate() const;
};

/// Generator of fractional Gaussian noise (unit step) of length n by circulant
/// embedding. Each call to `generate_pair` yields two independent exact samples.
/// Falls back to a Cholesky factor of the Toeplitz covariance if the embedding
/// has a negative eigenvalue.
class FgnGenerator {
public:
    FgnGenerator(int n, double hurst);
    ~FgnGenerator();
    FgnGenerator(const FgnGenerator&) = delete;
    FgnGenerator& operator=(const FgnGenerator&) = delete;

    int size() const { return n_; }
    bool uses_circulant() const { return circulant_; }
    void generate_pair(std::mt19937_64& rng, std::vector<double>& first, std::vector<double>& second);

private:
    struct Impl;
    int n_;
    bool circulant_;
    std::unique_ptr<Impl> impl_;
};

/// Autocovariance of unit-step fGn at integer lag k.
double fgn_autocovariance(int k, double hurst);

/// Per-pair generator seeded from (seed, index) through SplitMix64.
std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t index);

/// Terminal values at the horizon of
///     dX = (b X + c) dt + sqrt(a / v) sqrt(X) dB^H,   H = v,
/// clamped at 0 (full truncation). Deterministic for a given config.
std::vector<double> simulate_fbm_paths(const FbmSimConfig& cfg, const FpkParams& params);

}  // namespace fbmfp::oracles
