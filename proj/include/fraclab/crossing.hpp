#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/fbm.hpp"

namespace fraclab::stoch {

/// Last entry into / first exit from the sup-metric ball of radius r around
/// (T, f(T)) on the graph of a sampled path.
struct CrossingTimes {
    double anchor = 0.0;
    double radius = 0.0;
    double theta_minus = 0.0;
    double theta_plus = 0.0;
    bool censored_minus = false;
    bool censored_plus = false;
    /// Radius below 10 grid-increment standard deviations.
    bool unreliable = false;

    bool censored() const { return censored_minus || censored_plus; }
};

/// Standard deviation of one grid increment (of `stride` steps).
inline double increment_sd(const PathSample& path, std::size_t stride = 1) {
    const double step = path.dt * static_cast<double>(stride);
    if (path.hurst) return std::pow(step, *path.hurst);
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t k = stride; k < path.values.size(); k += stride) {
        const double d = path.values[k] - path.values[k - stride];
        s += d * d;
        ++n;
    }
    return n == 0 ? 0.0 : std::sqrt(s / static_cast<double>(n));
}

/// One-directional scan from anchor index k over every `stride`-th sample.
/// For each radius (ascending) writes min(time of first |f - f(T)| >= r, r),
/// the crossing located by linear interpolation between the bracketing
/// samples. A radius is censored if the path ends first.
inline void scan_leg(std::span<const double> values, double dt, std::size_t k, int direction, std::size_t stride,
                     std::span<const double> radii_ascending, std::span<double> lengths,
                     std::span<std::uint8_t> censored) {
    const std::size_t nr = radii_ascending.size();
    const double v0 = values[k];
    const double step = dt * static_cast<double>(stride);
    std::size_t i = 0;
    double prev = 0.0;
    std::size_t j = 1;
    for (;; ++j) {
        const std::size_t offset = j * stride;
        const bool in_range = direction > 0 ? k + offset < values.size() : offset <= k;
        if (!in_range) break;
        const double d = values[direction > 0 ? k + offset : k - offset] - v0;
        const double t = static_cast<double>(j) * step;
        const double ad = std::abs(d);
        while (i < nr && (ad >= radii_ascending[i] || t >= radii_ascending[i])) {
            const double r = radii_ascending[i];
            double len = r;
            if (ad >= r) {
                const double target = d > 0.0 ? r : -r;
                const double tc = static_cast<double>(j - 1) * step + (target - prev) / (d - prev) * step;
                len = std::min(tc, r);
            }
            lengths[i] = len;
            censored[i] = 0;
            ++i;
        }
        if (i == nr) return;
        prev = d;
    }
    const double available = static_cast<double>(j - 1) * step;
    for (; i < nr; ++i) {
        // The time leg alone would have ended the excursion.
        if (radii_ascending[i] <= available) {
            lengths[i] = radii_ascending[i];
            censored[i] = 0;
        } else {
            lengths[i] = available;
            censored[i] = 1;
        }
    }
}

inline CrossingTimes crossing_times(const PathSample& path, std::size_t anchor_index, double r,
                                    std::size_t stride = 1) {
    if (!(r > 0.0)) throw std::invalid_argument("crossing_times: radius must be positive");
    if (anchor_index == 0 || anchor_index >= path.steps()) {
        throw std::invalid_argument("crossing_times: anchor index must be interior to the grid");
    }
    if (stride == 0) throw std::invalid_argument("crossing_times: stride must be positive");
    const double radius[] = {r};
    double len_plus[1], len_minus[1];
    std::uint8_t cens_plus[1], cens_minus[1];
    scan_leg(path.values, path.dt, anchor_index, +1, stride, radius, len_plus, cens_plus);
    scan_leg(path.values, path.dt, anchor_index, -1, stride, radius, len_minus, cens_minus);
    CrossingTimes ct;
    ct.anchor = path.time(anchor_index);
    ct.radius = r;
    ct.theta_plus = ct.anchor + len_plus[0];
    ct.theta_minus = ct.anchor - len_minus[0];
    ct.censored_plus = cens_plus[0] != 0;
    ct.censored_minus = cens_minus[0] != 0;
    ct.unreliable = r < 10.0 * increment_sd(path, stride);
    return ct;
}

/// Mean exit time of a Brownian motion on the time axis from
/// (theta_minus, theta_plus) started at the anchor: (theta+ - T)(T - theta-).
inline double graph_exit_expectation(const CrossingTimes& ct) {
    if (ct.censored()) throw std::invalid_argument("graph_exit_expectation: censored crossing times");
    return (ct.theta_plus - ct.anchor) * (ct.anchor - ct.theta_minus);
}

}  // namespace fraclab::stoch
