#include "fbmfp/oracles/fbm_mc.hpp"

#include "fbmfp/errors.hpp"
#include "fbmfp/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace fbmfp::oracles {

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

void FbmSimConfig::validate() const {
    if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("hurst must lie in (0, 1)");
    if (n_paths < 1 || n_steps < 1) throw DomainError("n_paths and n_steps must be positive");
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    if (!(x0 > 0.0)) throw DomainError("x0 must be positive");
}

double fgn_autocovariance(int k, double hurst) {
    const double h2 = 2.0 * hurst;
    const double kk = std::abs(static_cast<double>(k));
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(std::abs(kk - 1.0), h2));
}

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state))};
    return std::mt19937_64(seq);
}

struct FgnGenerator::Impl {
    // Circulant embedding: sqrt of eigenvalues / (2n), plan over a 2n-point buffer.
    std::vector<double> scale;
    fftw_plan plan = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    // Cholesky fallback: lower-triangular factor, row-major.
    std::vector<double> chol;
};

FgnGenerator::FgnGenerator(int n, double hurst) : n_(n), circulant_(true), impl_(std::make_unique<Impl>()) {
    if (n < 1) throw DomainError("fGn length must be positive");
    if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("hurst must lie in (0, 1)");
    const int m = 2 * n;
    std::vector<double> row(static_cast<std::size_t>(m));
    for (int k = 0; k <= n; ++k) row[static_cast<std::size_t>(k)] = fgn_autocovariance(k, hurst);
    for (int k = n + 1; k < m; ++k) row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(m - k)];

    impl_->in = fftw_alloc_complex(static_cast<std::size_t>(m));
    impl_->out = fftw_alloc_complex(static_cast<std::size_t>(m));
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        impl_->plan = fftw_plan_dft_1d(m, impl_->in, impl_->out, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (int k = 0; k < m; ++k) {
        impl_->in[k][0] = row[static_cast<std::size_t>(k)];
        impl_->in[k][1] = 0.0;
    }
    fftw_execute(impl_->plan);
    impl_->scale.resize(static_cast<std::size_t>(m));
    double min_eig = 0.0, max_eig = 0.0;
    for (int k = 0; k < m; ++k) {
        const double lam = impl_->out[k][0];
        min_eig = std::min(min_eig, lam);
        max_eig = std::max(max_eig, lam);
        impl_->scale[static_cast<std::size_t>(k)] = std::sqrt(std::max(lam, 0.0) / m);
    }
    if (min_eig < -1e-12 * max_eig) {
        circulant_ = false;
        const auto nn = static_cast<std::size_t>(n);
        auto& L = impl_->chol;
        L.assign(nn * nn, 0.0);
        for (std::size_t i = 0; i < nn; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = fgn_autocovariance(static_cast<int>(i) - static_cast<int>(j), hurst);
                for (std::size_t k = 0; k < j; ++k) s -= L[i * nn + k] * L[j * nn + k];
                if (i == j) {
                    if (!(s > 0.0)) throw IllConditionedError("fGn covariance is not positive definite");
                    L[i * nn + i] = std::sqrt(s);
                } else {
                    L[i * nn + j] = s / L[j * nn + j];
                }
            }
        }
    }
}

FgnGenerator::~FgnGenerator() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (impl_->plan) fftw_destroy_plan(impl_->plan);
    fftw_free(impl_->in);
    fftw_free(impl_->out);
}

void FgnGenerator::generate_pair(std::mt19937_64& rng, std::vector<double>& first,
                                 std::vector<double>& second) {
    std::normal_distribution<double> normal;
    const auto n = static_cast<std::size_t>(n_);
    first.resize(n);
    second.resize(n);
    if (!circulant_) {
        const auto& L = impl_->chol;
        std::vector<double> z1(n), z2(n);
        for (std::size_t i = 0; i < n; ++i) {
            z1[i] = normal(rng);
            z2[i] = normal(rng);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double a = 0.0, b = 0.0;
            for (std::size_t k = 0; k <= i; ++k) {
                a += L[i * n + k] * z1[k];
                b += L[i * n + k] * z2[k];
            }
            first[i] = a;
            second[i] = b;
        }
        return;
    }
    const std::size_t m = 2 * n;
    // fftw_execute_dft on a shared plan is thread safe with private buffers.
    fftw_complex* in = fftw_alloc_complex(m);
    fftw_complex* out = fftw_alloc_complex(m);
    for (std::size_t k = 0; k < m; ++k) {
        in[k][0] = impl_->scale[k] * normal(rng);
        in[k][1] = impl_->scale[k] * normal(rng);
    }
    fftw_execute_dft(impl_->plan, in, out);
    for (std::size_t k = 0; k < n; ++k) {
        first[k] = out[k][0];
        second[k] = out[k][1];
    }
    fftw_free(in);
    fftw_free(out);
}

std::vector<double> simulate_fbm_paths(const FbmSimConfig& cfg, const FpkParams& params) {
    cfg.validate();
    params.validate();
    if (std::abs(cfg.hurst - params.v) > 1e-15)
        throw DomainError("simulation hurst must equal the exponent v");

    const int n = cfg.n_steps;
    const double dt = cfg.horizon / n;
    const double h2 = 2.0 * cfg.hurst;
    const double sigma = std::sqrt(params.a / params.v);
    const double noise_scale = std::pow(dt, cfg.hurst);
    // g(X_n) dB_n has mean g g' E[B(t_n) dB_n]; with g = sigma sqrt(x) that is
    // (sigma^2 / 4)(t_{n+1}^{2H} - t_n^{2H} - dt^{2H}).
    std::vector<double> correction(static_cast<std::size_t>(n), 0.0);
    if (cfg.scheme == FbmScheme::wick_euler) {
        for (int k = 0; k < n; ++k) {
            const double t0 = k * dt, t1 = (k + 1) * dt;
            correction[static_cast<std::size_t>(k)] =
                0.25 * sigma * sigma * (std::pow(t1, h2) - std::pow(t0, h2) - std::pow(dt, h2));
        }
    }

    FgnGenerator gen(n, cfg.hurst);
    const std::size_t pairs = (static_cast<std::size_t>(cfg.n_paths) + 1) / 2;
    std::vector<double> out(static_cast<std::size_t>(cfg.n_paths));

    auto run_path = [&](const std::vector<double>& noise) {
        double x = cfg.x0;
        for (int k = 0; k < n; ++k) {
            const double xp = std::max(x, 0.0);
            const double root = std::sqrt(xp);
            double step = (params.b * xp + params.c) * dt + sigma * root * noise_scale * noise[static_cast<std::size_t>(k)];
            if (xp > 0.0) step -= correction[static_cast<std::size_t>(k)];
            x += step;
        }
        return std::max(x, 0.0);
    };

    parallel_for(
        pairs,
        [&](std::size_t p) {
            auto rng = path_rng(cfg.seed, p);
            std::vector<double> first, second;
            gen.generate_pair(rng, first, second);
            out[2 * p] = run_path(first);
            if (2 * p + 1 < out.size()) out[2 * p + 1] = run_path(second);
        },
        cfg.threads);
    return out;
}

}  // namespace fbmfp::oracles
