#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/point.hpp"
#include "fraclab/rng.hpp"
#include "fraclab/spaces.hpp"

namespace fraclab::stoch {

struct ExitTimeEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_censored = 0;
};

struct BmOptions {
    /// 1 for coordinates driven by an independent standard Brownian motion,
    /// 0 for frozen ones. Empty means all coordinates move.
    std::vector<double> active_axes;
    std::size_t step_cap = 10'000'000;
    unsigned workers = 1;
};

/// Monte Carlo mean of the first time a standard Brownian motion started at
/// `start` reaches distance r from it.
///
/// Gaussian Euler steps; an exit between two inside steps is detected with
/// the Brownian-bridge crossing probability exp(-2 g0 g1 / dt), g the
/// coordinate gap to the ball boundary. Exits are timed at the interpolated
/// boundary hit or at mid-step for bridge exits.
inline ExitTimeEstimate bm_exit_time_mc(const SpaceDescriptor& space, std::span<const double> start, double r,
                                        double dt, std::size_t n_paths, const RngSpec& rng,
                                        const BmOptions& options = {}) {
    if (!(r > 0.0)) throw std::invalid_argument("bm_exit_time_mc: radius must be positive");
    if (!(dt > 0.0) || dt > r * r / 100.0) {
        throw std::invalid_argument("bm_exit_time_mc: dt must lie in (0, r^2/100]");
    }
    if (n_paths < 100) throw std::invalid_argument("bm_exit_time_mc: need at least 100 paths");
    const std::size_t d = space.point_dim();
    if (start.size() != d) throw std::invalid_argument("bm_exit_time_mc: start point has wrong dimension");
    std::vector<double> axes = options.active_axes.empty() ? std::vector<double>(d, 1.0) : options.active_axes;
    if (axes.size() != d) throw std::invalid_argument("bm_exit_time_mc: active_axes has wrong dimension");
    // Surfaces unsupported spaces before any simulation.
    (void)boundary_gap(space, start, r, start, axes);

    const double sqdt = std::sqrt(dt);
    std::vector<double> times(n_paths, 0.0);
    std::vector<std::uint8_t> censored(n_paths, 0);

    parallel_for(n_paths, options.workers, [&](std::size_t p) {
        auto eng = make_engine(rng.fork(p));
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> unif;
        Point x(start.begin(), start.end());
        Point y(d);
        double g0 = boundary_gap(space, start, r, x, axes);
        for (std::size_t step = 0; step < options.step_cap; ++step) {
            for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + (axes[i] > 0.0 ? sqdt * gauss(eng) : 0.0);
            const double g1 = boundary_gap(space, start, r, y, axes);
            const double t = static_cast<double>(step) * dt;
            if (g1 <= 0.0) {
                times[p] = t + dt * g0 / (g0 - g1);
                return;
            }
            if (unif(eng) < std::exp(-2.0 * g0 * g1 / dt)) {
                times[p] = t + 0.5 * dt;
                return;
            }
            std::swap(x, y);
            g0 = g1;
        }
        censored[p] = 1;
    });

    ExitTimeEstimate est;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (censored[p]) {
            ++est.n_censored;
            continue;
        }
        sum += times[p];
        sum2 += times[p] * times[p];
        ++est.n_paths;
    }
    if (static_cast<double>(est.n_censored) > 0.01 * static_cast<double>(n_paths)) {
        throw std::runtime_error("bm_exit_time_mc: " + std::to_string(est.n_censored) + " of " +
                                 std::to_string(n_paths) + " paths hit the step cap");
    }
    const double n = static_cast<double>(est.n_paths);
    est.mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * est.mean * est.mean) / (n - 1.0)) : 0.0;
    est.std_error = std::sqrt(var / n);
    return est;
}

}  // namespace fraclab::stoch
