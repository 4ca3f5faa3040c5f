#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/fit.hpp"
#include "fraclab/point.hpp"
#include "fraclab/rng.hpp"
#include "fraclab/sg.hpp"

namespace fraclab::ifs {

/// Planar similitude x -> ratio * Q x + shift, Q orthogonal.
class Similitude {
public:
    /// `angle` rotates counterclockwise; `reflect` mirrors in the x axis first.
    Similitude(double ratio, std::array<double, 2> shift, double angle = 0.0, bool reflect = false)
        : ratio_(ratio), shift_(shift) {
        if (!(ratio > 0.0 && ratio < 1.0)) {
            throw std::invalid_argument("Similitude: contraction ratio " + std::to_string(ratio) +
                                        " outside (0, 1)");
        }
        const double c = std::cos(angle), s = std::sin(angle);
        const double f = reflect ? -1.0 : 1.0;
        linear_ = {ratio * c, -ratio * s * f, ratio * s, ratio * c * f};
    }

    double ratio() const { return ratio_; }

    std::array<double, 2> operator()(std::array<double, 2> p) const {
        return {linear_[0] * p[0] + linear_[1] * p[1] + shift_[0],
                linear_[2] * p[0] + linear_[3] * p[1] + shift_[1]};
    }

    /// Unique point with S(p) = p.
    std::array<double, 2> fixed_point() const {
        const double a = 1.0 - linear_[0], b = -linear_[1], c = -linear_[2], d = 1.0 - linear_[3];
        const double det = a * d - b * c;
        return {(d * shift_[0] - b * shift_[1]) / det, (-c * shift_[0] + a * shift_[1]) / det};
    }

private:
    double ratio_;
    std::array<double, 2> shift_;
    std::array<double, 4> linear_{};
};

/// Finite family of contracting similitudes. Whether the open set condition
/// holds is asserted by the caller, not checked.
class IFSystem {
public:
    explicit IFSystem(std::vector<Similitude> maps, bool open_set_condition = true)
        : maps_(std::move(maps)), osc_(open_set_condition) {
        if (maps_.empty()) throw std::invalid_argument("IFSystem: need at least one map");
    }

    const std::vector<Similitude>& maps() const { return maps_; }
    bool open_set_condition() const { return osc_; }

    std::vector<double> ratios() const {
        std::vector<double> r;
        r.reserve(maps_.size());
        for (const auto& m : maps_) r.push_back(m.ratio());
        return r;
    }

private:
    std::vector<Similitude> maps_;
    bool osc_;
};

inline IFSystem sierpinski_gasket() {
    std::vector<Similitude> maps;
    for (const auto& q : sg::corners()) {
        maps.emplace_back(0.5, std::array<double, 2>{q[0] / 2.0, q[1] / 2.0});
    }
    return IFSystem(std::move(maps));
}

/// Middle-third Cantor set on the x axis.
inline IFSystem cantor_set() {
    return IFSystem({Similitude(1.0 / 3.0, {0.0, 0.0}), Similitude(1.0 / 3.0, {2.0 / 3.0, 0.0})});
}

/// Root s of sum r_i^s = 1, found by bisection on the decreasing map s -> sum r_i^s.
inline double moran_dimension(std::span<const double> ratios) {
    if (ratios.empty()) throw std::invalid_argument("moran_dimension: empty ratio list");
    double r_max = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0 && r < 1.0)) {
            throw std::invalid_argument("moran_dimension: ratio " + std::to_string(r) + " outside (0, 1)");
        }
        r_max = std::max(r_max, r);
    }
    auto excess = [&](double s) {
        double sum = 0.0;
        for (double r : ratios) sum += std::pow(r, s);
        return sum - 1.0;
    };
    if (ratios.size() == 1) return 0.0;

    double lo = 0.0;
    double hi = std::log(static_cast<double>(ratios.size())) / std::log(1.0 / r_max) + 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline constexpr std::size_t kChaosBurnIn = 100;
inline constexpr std::size_t kChaosBlock = 1 << 16;

/// Chaos-game sample of the attractor. Points are produced in fixed blocks,
/// each with its own stream and burn-in, so the cloud does not depend on
/// `workers`.
inline PointCloud chaos_game(const IFSystem& system, std::size_t n_points, const RngSpec& rng,
                             unsigned workers = 1) {
    if (n_points < 1) throw std::invalid_argument("chaos_game: n_points must be at least 1");
    const std::size_t n_blocks = (n_points + kChaosBlock - 1) / kChaosBlock;
    std::vector<PointCloud> blocks(n_blocks, PointCloud(2));
    const auto& maps = system.maps();
    parallel_for(n_blocks, workers, [&](std::size_t b) {
        const std::size_t count = std::min(kChaosBlock, n_points - b * kChaosBlock);
        auto eng = make_engine(rng.fork(b));
        std::uniform_int_distribution<std::size_t> pick(0, maps.size() - 1);
        std::array<double, 2> p{0.0, 0.0};
        for (std::size_t i = 0; i < kChaosBurnIn; ++i) p = maps[pick(eng)](p);
        auto& out = blocks[b];
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            p = maps[pick(eng)](p);
            out.push_back(p);
        }
    });
    PointCloud cloud(2);
    cloud.reserve(n_points);
    for (const auto& b : blocks) cloud.append(b);
    return cloud;
}

struct BoxCountResult {
    std::vector<double> scales;
    std::vector<std::size_t> counts;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool degenerate = false;
    /// Set when the first fit had r2 < 0.99 and the end scales were dropped.
    bool refit = false;
    double full_slope = 0.0;
    double full_r2 = 0.0;
};

inline std::size_t count_boxes(const PointCloud& points, std::span<const double> origin, double scale) {
    const std::size_t d = points.dim();
    std::vector<std::array<std::int64_t, 3>> keys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = points[i];
        std::array<std::int64_t, 3> k{0, 0, 0};
        for (std::size_t j = 0; j < d; ++j) {
            k[j] = static_cast<std::int64_t>(std::floor((p[j] - origin[j]) / scale));
        }
        keys[i] = k;
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

/// Box-counting slope of log N(scale) against log(1/scale).
inline BoxCountResult box_counting_dimension(const PointCloud& points, std::span<const double> scales) {
    if (scales.size() < 2) throw std::invalid_argument("box_counting_dimension: need at least two scales");
    if (points.size() < 1000) throw std::invalid_argument("box_counting_dimension: need at least 1000 points");
    if (points.dim() > 3) throw std::invalid_argument("box_counting_dimension: dimension above 3");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] > 0.0)) throw std::invalid_argument("box_counting_dimension: scales must be positive");
        if (i > 0 && !(scales[i] < scales[i - 1])) {
            throw std::invalid_argument("box_counting_dimension: scales must be strictly decreasing");
        }
    }
    const std::size_t d = points.dim();
    std::vector<double> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) {
        lo[j] = hi[j] = points[0][j];
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], points[i][j]);
            hi[j] = std::max(hi[j], points[i][j]);
        }
    }

    BoxCountResult res;
    res.scales.assign(scales.begin(), scales.end());
    bool all_equal = true;
    for (std::size_t j = 0; j < d; ++j) all_equal = all_equal && lo[j] == hi[j];
    if (all_equal) {
        res.counts.assign(scales.size(), 1);
        res.degenerate = true;
        return res;
    }

    std::vector<double> x, y;
    for (double s : scales) {
        const auto c = count_boxes(points, lo, s);
        res.counts.push_back(c);
        x.push_back(std::log(1.0 / s));
        y.push_back(std::log(static_cast<double>(c)));
    }
    auto fit = linear_fit(x, y);
    res.full_slope = fit.slope;
    res.full_r2 = fit.r2;
    if (fit.r2 < 0.99 && scales.size() >= 4) {
        fit = linear_fit(std::span(x).subspan(1, x.size() - 2), std::span(y).subspan(1, y.size() - 2));
        res.refit = true;
    }
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    res.r2 = fit.r2;
    return res;
}

/// Dyadic scales 2^-from, ..., 2^-to.
inline std::vector<double> dyadic_scales(int from, int to) {
    std::vector<double> s;
    for (int k = from; k <= to; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
}

}  // namespace fraclab::ifs
