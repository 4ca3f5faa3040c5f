#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fraclab {

/// Least-squares line through (x, y) with goodness of fit. Used for every
/// log-log dimension estimate; `window` records the abscissa range fitted.
struct DimensionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    std::size_t n_points = 0;
};

inline DimensionFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("linear_fit: x and y differ in length");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("linear_fit: need at least two points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("linear_fit: abscissa has zero spread");
    }
    DimensionFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    // A perfectly flat response is fitted exactly.
    fit.r2 = syy > 0.0 ? std::min(1.0, (sxy * sxy) / (sxx * syy)) : 1.0;
    double lo = x[0], hi = x[0];
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    fit.window = {lo, hi};
    fit.n_points = x.size();
    return fit;
}

/// Fits log(y) against log(x). Rejects nonpositive entries.
inline DimensionFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("loglog_fit: x and y differ in length");
    }
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("loglog_fit: nonpositive value at index " + std::to_string(i));
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear_fit(lx, ly);
}

}  // namespace fraclab
