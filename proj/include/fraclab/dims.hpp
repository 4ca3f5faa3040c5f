#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/bm.hpp"
#include "fraclab/crossing.hpp"
#include "fraclab/fbm.hpp"
#include "fraclab/fit.hpp"
#include "fraclab/point.hpp"
#include "fraclab/rng.hpp"
#include "fraclab/spaces.hpp"
#include "fraclab/srw.hpp"

namespace fraclab::dims {

/// Mean exit times E[tau(r)] across radii.
struct ExitCurve {
    std::vector<double> radii;  // strictly decreasing
    std::vector<double> means;
    std::vector<double> std_errors;
    std::string source;

    void validate() const {
        if (radii.size() != means.size() || radii.size() != std_errors.size()) {
            throw std::invalid_argument("ExitCurve: radii, means and std_errors differ in length");
        }
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (!(radii[i] > 0.0)) throw std::invalid_argument("ExitCurve: radii must be positive");
            if (i > 0 && !(radii[i] < radii[i - 1])) {
                throw std::invalid_argument("ExitCurve: radii must be strictly decreasing");
            }
            if (!(means[i] > 0.0)) {
                throw std::invalid_argument("ExitCurve: nonpositive mean at radius " + std::to_string(radii[i]));
            }
        }
    }
};

enum class WalkDimKind { LocalLimit, UpperLimsup };

inline const char* to_string(WalkDimKind k) { return k == WalkDimKind::LocalLimit ? "local_limit" : "upper_limsup"; }

struct WalkDimEstimate {
    double value = 0.0;
    WalkDimKind kind = WalkDimKind::LocalLimit;
    DimensionFit fit;
    /// Number of smallest radii in the fit window.
    std::size_t window_points = 0;
};

namespace detail {
inline void check_curve(const ExitCurve& curve) {
    curve.validate();
    if (curve.radii.size() < 4) throw std::invalid_argument("walk_dimension: need at least 4 radii");
    if (curve.radii.front() / curve.radii.back() < 4.0 - 1e-12) {
        throw std::invalid_argument("walk_dimension: radii must span at least two octaves");
    }
}
}  // namespace detail

/// Slope of log E[tau(r)] against log r.
inline WalkDimEstimate walk_dimension(const ExitCurve& curve) {
    detail::check_curve(curve);
    WalkDimEstimate est;
    est.kind = WalkDimKind::LocalLimit;
    est.fit = loglog_fit(curve.radii, curve.means);
    est.value = est.fit.slope;
    est.window_points = curve.radii.size();
    return est;
}

/// Largest slope over the trailing windows made of the j smallest radii,
/// j = 4..all.
inline WalkDimEstimate upper_walk_dimension(const ExitCurve& curve) {
    detail::check_curve(curve);
    const std::size_t n = curve.radii.size();
    WalkDimEstimate best;
    best.kind = WalkDimKind::UpperLimsup;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 4; j <= n; ++j) {
        const auto r = std::span(curve.radii).subspan(n - j);
        const auto m = std::span(curve.means).subspan(n - j);
        const auto fit = loglog_fit(r, m);
        if (fit.slope > best.value) {
            best.value = fit.slope;
            best.fit = fit;
            best.window_points = j;
        }
    }
    return best;
}

/// Exit curve of Brownian motion from metric balls around `start`.
inline ExitCurve bm_exit_curve(const SpaceDescriptor& space, std::span<const double> start,
                               std::span<const double> radii, double dt_fraction, std::size_t n_paths,
                               const RngSpec& rng, const stoch::BmOptions& options = {},
                               double coordinate_scale = 1.0) {
    ExitCurve curve;
    curve.source = "brownian motion on " + space.name();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        const double rc = r / coordinate_scale;
        const double dt = std::min(r * r, rc * rc) * dt_fraction;
        const auto est = stoch::bm_exit_time_mc(space, start, r, dt, n_paths, rng.fork(i), options);
        curve.radii.push_back(r);
        curve.means.push_back(est.mean);
        curve.std_errors.push_back(est.std_error);
    }
    curve.validate();
    return curve;
}

struct SgWalkCurve {
    ExitCurve curve;  // radius 2^-m, mean crossing time in units of 5^-n steps
    std::vector<stoch::SrwCrossingStats> stats;
};

/// Crossing times of the random walk on G_n at coarse scales 2^-m.
inline SgWalkCurve sg_walk_curve(int fine_level, std::span<const int> coarse_levels, std::size_t n_runs,
                                 const RngSpec& rng) {
    SgWalkCurve out;
    out.curve.source = "simple random walk on G_" + std::to_string(fine_level);
    const double unit = std::pow(5.0, -fine_level);
    for (std::size_t i = 0; i < coarse_levels.size(); ++i) {
        const int m = coarse_levels[i];
        auto st = stoch::srw_crossing_stats(fine_level, m, rng.fork(static_cast<std::uint64_t>(m)), n_runs);
        out.curve.radii.push_back(std::ldexp(1.0, -m));
        out.curve.means.push_back(st.mean_steps * unit);
        out.curve.std_errors.push_back(st.std_error * unit);
        out.stats.push_back(std::move(st));
    }
    out.curve.validate();
    return out;
}

/// Options for exit curves on graphs of fractional Brownian motion.
struct FbmGraphOptions {
    std::size_t grid_steps = std::size_t{1} << 16;
    double horizon = 1.0;
    /// 0: raw finest grid. 1 or 2: Richardson extrapolation in the grid
    /// resolution using strides 1, 2 (and 4), removing discrete-monitoring
    /// bias of order 1 (and 2) in the increment standard deviation.
    int extrapolation_order = 1;
    unsigned workers = 1;
};

/// Exit curve data on fBM graphs, one curve per quantity.
struct FbmGraphCurves {
    ExitCurve product;     // E[(theta+ - T)(T - theta-)]
    ExitCurve plus_leg;    // E[theta+ - T]
    ExitCurve minus_leg;   // E[T - theta-]
    ExitCurve raw_product; // finest grid, no extrapolation
    std::size_t samples = 0;
    std::size_t censored = 0;
    bool unreliable = false;
    double increment_sd = 0.0;
};

namespace detail {

/// Per-(path) sums over anchors, for one stride and one quantity.
struct Sums {
    std::vector<double> s, s2;
    std::size_t n = 0;
};

inline std::vector<double> extrapolate_log(const std::vector<std::vector<double>>& means_by_stride, double rho,
                                           int order) {
    const std::size_t nr = means_by_stride[0].size();
    std::vector<double> out(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        const double l1 = std::log(means_by_stride[0][i]);
        if (order == 0) {
            out[i] = l1;
            continue;
        }
        const double l2 = std::log(means_by_stride[1][i]);
        const double r1 = (rho * l1 - l2) / (rho - 1.0);
        if (order == 1) {
            out[i] = r1;
            continue;
        }
        const double l4 = std::log(means_by_stride[2][i]);
        const double r2 = (rho * l2 - l4) / (rho - 1.0);
        out[i] = (rho * rho * r1 - r2) / (rho * rho - 1.0);
    }
    return out;
}

}  // namespace detail

using PathSource = std::function<stoch::PathSample(const RngSpec&)>;

/// Exit curves of the time-axis Brownian motion seen on function graphs:
/// for each (path, anchor), (theta+ - T)(T - theta-) from the crossing times,
/// averaged. Anchors are uniform on the middle half of the path. Radii are
/// strictly decreasing. `resolution_exponent` is the power of dt that the
/// path increments scale with (H for fBM, 1 for Lipschitz paths); it sets the
/// extrapolation ratio 2^exponent. options.grid_steps and options.horizon
/// are only used for the reliability flag.
inline FbmGraphCurves graph_walk_curve(const PathSource& source, double resolution_exponent,
                                       std::span<const double> radii, std::size_t n_paths,
                                       std::size_t anchors_per_path, const RngSpec& rng,
                                       const FbmGraphOptions& options = {}) {
    const double hurst = resolution_exponent;
    if (radii.size() < 4) throw std::invalid_argument("fbm_graph_walk_curve: need at least 4 radii");
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] < radii[i - 1])) throw std::invalid_argument("fbm_graph_walk_curve: radii must decrease");
    }
    if (n_paths < 2 || anchors_per_path < 1) {
        throw std::invalid_argument("fbm_graph_walk_curve: need at least 2 paths and 1 anchor");
    }
    if (options.extrapolation_order < 0 || options.extrapolation_order > 2) {
        throw std::invalid_argument("fbm_graph_walk_curve: extrapolation order must be 0, 1 or 2");
    }
    const std::size_t nr = radii.size();
    const std::size_t n_strides = static_cast<std::size_t>(options.extrapolation_order) + 1;
    std::vector<double> asc(radii.rbegin(), radii.rend());

    // Per path, per stride, per quantity (product, plus, minus), per radius (ascending).
    const std::size_t block = n_strides * 3 * nr;
    std::vector<double> sums(n_paths * block, 0.0);
    std::vector<double> sums2(n_paths * block, 0.0);
    std::vector<std::size_t> counts(n_paths * n_strides * nr, 0);
    std::vector<std::size_t> censored(n_paths, 0);

    parallel_for(n_paths, options.workers, [&](std::size_t p) {
        const auto child = rng.fork(p);
        const auto path = source(child);
        auto eng = make_engine(child.fork(0xa11c));
        const std::size_t n = path.steps();
        std::uniform_int_distribution<std::size_t> pick(n / 4, (3 * n) / 4);
        std::vector<double> lp(nr), lm(nr);
        std::vector<std::uint8_t> cp(nr), cm(nr);
        for (std::size_t a = 0; a < anchors_per_path; ++a) {
            const std::size_t k = pick(eng);
            for (std::size_t s = 0; s < n_strides; ++s) {
                const std::size_t stride = std::size_t{1} << s;
                stoch::scan_leg(path.values, path.dt, k, +1, stride, asc, lp, cp);
                stoch::scan_leg(path.values, path.dt, k, -1, stride, asc, lm, cm);
                double* base = &sums[p * block + s * 3 * nr];
                double* base2 = &sums2[p * block + s * 3 * nr];
                for (std::size_t i = 0; i < nr; ++i) {
                    if (cp[i] || cm[i]) {
                        if (s == 0) ++censored[p];
                        continue;
                    }
                    const double q[3] = {lp[i] * lm[i], lp[i], lm[i]};
                    for (std::size_t c = 0; c < 3; ++c) {
                        base[c * nr + i] += q[c];
                        base2[c * nr + i] += q[c] * q[c];
                    }
                    ++counts[(p * n_strides + s) * nr + i];
                }
            }
        }
    });

    FbmGraphCurves out;
    out.samples = n_paths * anchors_per_path * nr;
    for (auto c : censored) out.censored += c;
    if (static_cast<double>(out.censored) > 0.01 * static_cast<double>(out.samples)) {
        throw std::runtime_error("fbm_graph_walk_curve: " + std::to_string(out.censored) + " of " +
                                 std::to_string(out.samples) + " crossings censored");
    }
    out.increment_sd = std::pow(options.horizon / static_cast<double>(options.grid_steps), resolution_exponent);
    out.unreliable = radii.back() < 10.0 * out.increment_sd;
    const double rho = std::pow(2.0, hurst);

    // Means over a subset of paths (all, or all but one for the jackknife).
    auto means_excluding = [&](std::size_t skip, std::size_t quantity) {
        std::vector<std::vector<double>> m(n_strides, std::vector<double>(nr));
        for (std::size_t s = 0; s < n_strides; ++s) {
            for (std::size_t i = 0; i < nr; ++i) {
                double sum = 0.0;
                std::size_t cnt = 0;
                for (std::size_t p = 0; p < n_paths; ++p) {
                    if (p == skip) continue;
                    sum += sums[p * block + s * 3 * nr + quantity * nr + i];
                    cnt += counts[(p * n_strides + s) * nr + i];
                }
                // Radii back in decreasing order.
                m[s][nr - 1 - i] = cnt ? sum / static_cast<double>(cnt) : 0.0;
            }
        }
        return m;
    };

    auto build = [&](std::size_t quantity, int order, const std::string& label) {
        ExitCurve c;
        c.source = label;
        c.radii.assign(radii.begin(), radii.end());
        const auto full = detail::extrapolate_log(means_excluding(n_paths, quantity), rho, order);
        // Delete-one-path jackknife for the standard error of the log mean.
        std::vector<double> acc(nr, 0.0), acc2(nr, 0.0);
        for (std::size_t p = 0; p < n_paths; ++p) {
            const auto loo = detail::extrapolate_log(means_excluding(p, quantity), rho, order);
            for (std::size_t i = 0; i < nr; ++i) {
                acc[i] += loo[i];
                acc2[i] += loo[i] * loo[i];
            }
        }
        const double np = static_cast<double>(n_paths);
        for (std::size_t i = 0; i < nr; ++i) {
            const double mean_loo = acc[i] / np;
            const double var = (np - 1.0) / np * std::max(0.0, acc2[i] - np * mean_loo * mean_loo);
            const double value = std::exp(full[i]);
            c.means.push_back(value);
            c.std_errors.push_back(value * std::sqrt(var));
        }
        c.validate();
        return c;
    };

    const int order = options.extrapolation_order;
    const std::string tag = "function graph";
    out.product = build(0, order, tag + " product");
    out.plus_leg = build(1, order, tag + " plus leg");
    out.minus_leg = build(2, order, tag + " minus leg");
    out.raw_product = build(0, 0, tag + " product (finest grid)");
    return out;
}

/// graph_walk_curve on independent fBM paths.
inline FbmGraphCurves fbm_graph_walk_curve(double hurst, std::span<const double> radii, std::size_t n_paths,
                                           std::size_t anchors_per_path, const RngSpec& rng,
                                           const FbmGraphOptions& options = {}) {
    const PathSource source = [&](const RngSpec& child) {
        return stoch::sample_fbm(hurst, options.grid_steps, options.horizon, child);
    };
    auto out = graph_walk_curve(source, hurst, radii, n_paths, anchors_per_path, rng, options);
    for (auto* c : {&out.product, &out.plus_leg, &out.minus_leg, &out.raw_product}) {
        c->source.replace(0, 14, "fbm graph H=" + std::to_string(hurst));
    }
    return out;
}

/// Points (t, f(t)) of the piecewise-linear graph, subdivided so that
/// consecutive points differ by at most `max_gap` in each coordinate.
inline PointCloud graph_cloud(const stoch::PathSample& path, double max_gap) {
    if (!(max_gap > 0.0)) throw std::invalid_argument("graph_cloud: max_gap must be positive");
    PointCloud cloud(2);
    cloud.reserve(path.values.size());
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        const double t = path.time(k), v = path.values[k];
        if (k > 0) {
            const double t0 = path.time(k - 1), v0 = path.values[k - 1];
            const double span = std::max(t - t0, std::abs(v - v0));
            const auto pieces = static_cast<std::size_t>(std::ceil(span / max_gap));
            for (std::size_t j = 1; j < pieces; ++j) {
                const double a = static_cast<double>(j) / static_cast<double>(pieces);
                const double p[2] = {t0 + a * (t - t0), v0 + a * (v - v0)};
                cloud.push_back(p);
            }
        }
        const double p[2] = {t, v};
        cloud.push_back(p);
    }
    return cloud;
}

struct HolderEstimate {
    double alpha = 0.0;
    bool infinite = false;  // zero oscillation: no finite exponent
    DimensionFit fit;
};

/// Slope of log max_{|s-t|<=r} |f(s) - f(t)| against log r; radii in time units.
inline HolderEstimate holder_regularity(const stoch::PathSample& path, std::size_t t_index,
                                        std::span<const double> radii) {
    if (radii.size() < 4) throw std::invalid_argument("holder_regularity: need at least 4 radii");
    if (t_index > path.steps()) throw std::invalid_argument("holder_regularity: index outside the path");
    std::vector<double> osc;
    for (double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("holder_regularity: radii must be positive");
        const auto w = static_cast<std::size_t>(std::floor(r / path.dt + 1e-9));
        if (w == 0) throw std::invalid_argument("holder_regularity: radius below the grid spacing");
        const bool fits_left = w <= t_index;
        const bool fits_right = t_index + w <= path.steps();
        if (!fits_left && !fits_right) throw std::invalid_argument("holder_regularity: radius exceeds the path window");
        const std::size_t lo = fits_left ? t_index - w : 0;
        const std::size_t hi = fits_right ? t_index + w : path.steps();
        double m = 0.0;
        const double f0 = path.values[t_index];
        for (std::size_t k = lo; k <= hi; ++k) m = std::max(m, std::abs(path.values[k] - f0));
        osc.push_back(m);
    }
    HolderEstimate est;
    for (double o : osc) {
        if (!(o > 0.0)) {
            est.infinite = true;
            est.alpha = std::numeric_limits<double>::infinity();
            return est;
        }
    }
    est.fit = loglog_fit(radii, osc);
    est.alpha = est.fit.slope;
    return est;
}

}  // namespace fraclab::dims
