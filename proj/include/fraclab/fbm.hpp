#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/rng.hpp"

namespace fraclab::stoch {

enum class FbmMethod { Cholesky, Circulant, Auto };

inline constexpr std::size_t kMaxCholeskyGrid = std::size_t{1} << 14;
inline constexpr std::size_t kMaxCirculantGrid = std::size_t{1} << 20;
inline constexpr std::size_t kAutoCirculantAbove = std::size_t{1} << 12;

/// Values on the uniform grid t_k = k dt, k = 0..n.
struct PathSample {
    double dt = 1.0;
    std::vector<double> values;
    std::optional<double> hurst;
    FbmMethod method = FbmMethod::Auto;
    std::string warning;

    std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
    double time(std::size_t k) const { return static_cast<double>(k) * dt; }
    double horizon() const { return time(steps()); }
    std::vector<double> times() const {
        std::vector<double> t(values.size());
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = time(k);
        return t;
    }
};

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
inline double fgn_autocovariance(double hurst, std::size_t k) {
    const double h2 = 2.0 * hurst;
    const double kk = static_cast<double>(k);
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(std::abs(kk - 1.0), h2));
}

/// Closed-form covariance of B^H at times s and t.
inline double fbm_covariance(double hurst, double s, double t) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
}

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

/// In-place forward DFT of length data.size().
inline void fft_inplace(std::vector<std::complex<double>>& data) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
}

/// Eigenvalues of the minimal circulant embedding of the fGn covariance.
/// Empty if the embedding is not nonnegative definite.
inline std::vector<double> circulant_eigenvalues(double hurst, std::size_t n) {
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> c(m);
    for (std::size_t k = 0; k <= n; ++k) c[k] = fgn_autocovariance(hurst, k);
    for (std::size_t k = n + 1; k < m; ++k) c[k] = c[m - k];
    fft_inplace(c);
    std::vector<double> lambda(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double v = c[k].real();
        if (v < -1e-10 * static_cast<double>(m)) return {};
        lambda[k] = std::max(v, 0.0);
    }
    return lambda;
}

/// Memoised circulant_eigenvalues; repeated paths share one transform.
inline std::shared_ptr<const std::vector<double>> cached_circulant_eigenvalues(double hurst, std::size_t n) {
    static std::mutex m;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const std::vector<double>>> cache;
    {
        std::lock_guard lock(m);
        if (auto it = cache.find({hurst, n}); it != cache.end()) return it->second;
    }
    auto lambda = std::make_shared<const std::vector<double>>(circulant_eigenvalues(hurst, n));
    std::lock_guard lock(m);
    if (cache.size() > 8) cache.clear();
    cache.emplace(std::pair{hurst, n}, lambda);
    return lambda;
}

/// Unit-step fGn by circulant embedding; nullopt when the embedding fails.
inline std::optional<std::vector<double>> fgn_circulant(double hurst, std::size_t n, Engine& eng) {
    const auto cached = cached_circulant_eigenvalues(hurst, n);
    const auto& lambda = *cached;
    if (lambda.empty()) return std::nullopt;
    const std::size_t m = lambda.size();
    std::normal_distribution<double> gauss;
    std::vector<std::complex<double>> w(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double a = std::sqrt(lambda[k] / static_cast<double>(m));
        const double re = gauss(eng);
        const double im = gauss(eng);
        w[k] = {a * re, a * im};
    }
    fft_inplace(w);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = w[k].real();
    return out;
}

/// Unit-step fGn through the Cholesky factor of its Toeplitz covariance,
/// applied row by row with the Durbin-Levinson recursion (O(n^2) time,
/// O(n) memory).
inline std::vector<double> fgn_cholesky(double hurst, std::size_t n, Engine& eng) {
    std::normal_distribution<double> gauss;
    std::vector<double> gamma(n + 1);
    for (std::size_t k = 0; k <= n; ++k) gamma[k] = fgn_autocovariance(hurst, k);
    std::vector<double> x(n), phi, prev;
    phi.reserve(n);
    prev.reserve(n);
    double v = gamma[0];
    x[0] = std::sqrt(v) * gauss(eng);
    for (std::size_t i = 1; i < n; ++i) {
        // phi holds the order-i prediction coefficients for x[i-1], ..., x[0].
        double acc = gamma[i];
        for (std::size_t j = 0; j + 1 < i; ++j) acc -= prev[j] * gamma[i - 1 - j];
        const double kappa = acc / v;
        phi.assign(i, 0.0);
        phi[i - 1] = kappa;
        for (std::size_t j = 0; j + 1 < i; ++j) phi[j] = prev[j] - kappa * prev[i - 2 - j];
        v *= (1.0 - kappa * kappa);
        double mean = 0.0;
        for (std::size_t j = 0; j < i; ++j) mean += phi[j] * x[i - 1 - j];
        x[i] = mean + std::sqrt(std::max(v, 0.0)) * gauss(eng);
        std::swap(prev, phi);
    }
    return x;
}

}  // namespace detail

/// Fractional Brownian motion on [0, horizon] with n steps, B_0 = 0.
inline PathSample sample_fbm(double hurst, std::size_t n, double horizon, const RngSpec& rng,
                             FbmMethod method = FbmMethod::Auto) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("sample_fbm: Hurst index must lie in (0, 1)");
    if (n < 1) throw std::invalid_argument("sample_fbm: need at least one step");
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_fbm: horizon must be positive");
    if (method == FbmMethod::Auto) method = n > kAutoCirculantAbove ? FbmMethod::Circulant : FbmMethod::Cholesky;
    if (method == FbmMethod::Cholesky && n > kMaxCholeskyGrid) {
        throw std::invalid_argument("sample_fbm: Cholesky limited to 2^14 steps");
    }
    if (method == FbmMethod::Circulant && n > kMaxCirculantGrid) {
        throw std::invalid_argument("sample_fbm: circulant embedding limited to 2^20 steps");
    }

    auto eng = make_engine(rng);
    PathSample path;
    path.dt = horizon / static_cast<double>(n);
    path.hurst = hurst;
    path.method = method;

    std::vector<double> noise;
    if (method == FbmMethod::Circulant) {
        auto w = detail::fgn_circulant(hurst, n, eng);
        if (w) {
            noise = std::move(*w);
        } else {
            if (n > kMaxCholeskyGrid) {
                throw std::runtime_error("sample_fbm: circulant embedding not nonnegative definite and grid too "
                                         "large for Cholesky");
            }
            path.warning = "circulant embedding not nonnegative definite; fell back to Cholesky";
            path.method = FbmMethod::Cholesky;
            noise = detail::fgn_cholesky(hurst, n, eng);
        }
    } else {
        noise = detail::fgn_cholesky(hurst, n, eng);
    }

    const double step_sd = std::pow(path.dt, hurst);
    path.values.resize(n + 1);
    path.values[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += noise[k];
        path.values[k + 1] = acc * step_sd;
    }
    return path;
}

}  // namespace fraclab::stoch
