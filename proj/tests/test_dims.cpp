#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fraclab/dims.hpp"
#include "fraclab/fbm.hpp"
#include "fraclab/spaces.hpp"

using namespace fraclab;
using namespace fraclab::dims;

namespace {

std::vector<double> dyadic(double r0, std::size_t n) {
    std::vector<double> r;
    for (std::size_t k = 0; k < n; ++k) r.push_back(std::ldexp(r0, -static_cast<int>(k)));
    return r;
}

ExitCurve power_curve(const std::vector<double>& radii, double exponent) {
    ExitCurve c;
    c.radii = radii;
    for (double r : radii) {
        c.means.push_back(std::pow(r, exponent));
        c.std_errors.push_back(0.0);
    }
    return c;
}

std::vector<double> geometric(double hi, double lo, std::size_t n) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = hi * std::pow(lo / hi, static_cast<double>(i) / static_cast<double>(n - 1));
    return r;
}

stoch::PathSample function_path(double (*f)(double), std::size_t n, double t0, double t1) {
    stoch::PathSample p;
    p.dt = (t1 - t0) / static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) p.values.push_back(f(t0 + static_cast<double>(k) * p.dt));
    return p;
}

}  // namespace

TEST(WalkDimension, PurePowerLaw) {
    const auto c = power_curve(dyadic(1.0, 6), 2.0);
    const auto local = walk_dimension(c);
    EXPECT_NEAR(local.value, 2.0, 1e-10);
    EXPECT_EQ(local.kind, WalkDimKind::LocalLimit);
    const auto upper = upper_walk_dimension(c);
    EXPECT_NEAR(upper.value, 2.0, 1e-10);
    EXPECT_EQ(upper.kind, WalkDimKind::UpperLimsup);
    EXPECT_STREQ(to_string(upper.kind), "upper_limsup");
}

TEST(WalkDimension, AlternatingEnvelopes) {
    const auto radii = dyadic(1.0, 10);
    ExitCurve c;
    c.radii = radii;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        c.means.push_back(std::pow(radii[k], k % 2 == 0 ? 2.0 : 3.0));
        c.std_errors.push_back(0.0);
    }
    // Brute force: slope of every trailing window by the normal equations.
    double best = -1e9;
    std::size_t best_j = 0;
    for (std::size_t j = 4; j <= radii.size(); ++j) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = radii.size() - j; i < radii.size(); ++i) {
            const double x = std::log(radii[i]), y = std::log(c.means[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(j);
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if (slope > best) {
            best = slope;
            best_j = j;
        }
    }
    const auto upper = upper_walk_dimension(c);
    EXPECT_NEAR(upper.value, best, 1e-10);
    EXPECT_EQ(upper.window_points, best_j);
    EXPECT_GE(upper.value, walk_dimension(c).value);
}

TEST(WalkDimension, UpperDominatesLocalOnNoisyCurves) {
    std::mt19937_64 eng(1);
    std::normal_distribution<double> g(0.0, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        auto c = power_curve(dyadic(1.0, 8), 2.3);
        for (auto& m : c.means) m *= std::exp(g(eng));
        EXPECT_GE(upper_walk_dimension(c).value, walk_dimension(c).value - 1e-12);
    }
}

TEST(WalkDimension, Errors) {
    auto c = power_curve(dyadic(1.0, 3), 2.0);
    EXPECT_THROW(walk_dimension(c), std::invalid_argument);
    c = power_curve({1.0, 0.9, 0.8, 0.7}, 2.0);
    EXPECT_THROW(walk_dimension(c), std::invalid_argument);
    c = power_curve(dyadic(1.0, 5), 2.0);
    c.means[2] = 0.0;
    EXPECT_THROW(walk_dimension(c), std::invalid_argument);
    c = power_curve(dyadic(1.0, 5), 2.0);
    std::swap(c.radii[0], c.radii[1]);
    EXPECT_THROW(upper_walk_dimension(c), std::invalid_argument);
    c = power_curve(dyadic(1.0, 5), 2.0);
    c.std_errors.pop_back();
    EXPECT_THROW(walk_dimension(c), std::invalid_argument);
}

TEST(BmCurve, LineWalkDimensionTwo) {
    const double x0[] = {0.0};
    const auto radii = dyadic(0.4, 5);
    const auto c = bm_exit_curve(SpaceDescriptor::euclidean(1), x0, radii, 1.0 / 400, 4000, RngSpec{1, 0});
    EXPECT_NEAR(walk_dimension(c).value, 2.0, 0.05);
}

TEST(BmCurve, BiLipschitzScalingKeepsTheSlope) {
    const double x0[] = {0.0};
    const auto radii = dyadic(0.4, 5);
    const auto base = bm_exit_curve(SpaceDescriptor::euclidean(1), x0, radii, 1.0 / 400, 4000, RngSpec{2, 0});
    for (double s : {0.5, 3.0}) {
        std::vector<double> scaled;
        for (double r : radii) scaled.push_back(r * s);
        const auto c = bm_exit_curve(SpaceDescriptor::euclidean(1, s), x0, scaled, 1.0 / 400, 4000, RngSpec{2, 1},
                                     {}, s);
        EXPECT_NEAR(walk_dimension(c).value, walk_dimension(base).value, 0.05) << s;
        // The curve itself moves: mean exit times are the same at r*s.
        EXPECT_NEAR(c.means[0], base.means[0], 0.1 * base.means[0]);
    }
}

TEST(BmCurve, HolderBoundAndStrictWitness) {
    const double x0[] = {0.0, 0.0};
    stoch::BmOptions moving;
    moving.active_axes = {0.0, 1.0};
    const auto radii = geometric(0.4, 0.025, 5);
    const auto y = bm_exit_curve(SpaceDescriptor::l1_plane(), x0, radii, 1.0 / 400, 3000, RngSpec{3, 0}, moving);
    const double local_y = walk_dimension(y).value;
    EXPECT_NEAR(local_y, 2.0, 0.1);
    for (double alpha : {0.5, 0.8}) {
        const auto x = bm_exit_curve(SpaceDescriptor::holder_product(alpha), x0, radii, 1.0 / 400, 3000,
                                     RngSpec{3, 1}, moving);
        const double dim_x = walk_dimension(x).value;
        EXPECT_LE(upper_walk_dimension(y).value, dim_x / alpha + 0.1) << alpha;
        EXPECT_LT(local_y, 2.0 / alpha);
    }
}

TEST(SgCurve, WalkDimension) {
    const int coarse[] = {1, 2, 3, 4};
    const auto sw = sg_walk_curve(6, coarse, 2000, RngSpec{4, 0});
    ASSERT_EQ(sw.stats.size(), 4u);
    EXPECT_NEAR(walk_dimension(sw.curve).value, std::log(5.0) / std::log(2.0), 0.1);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(sw.curve.radii[i], std::ldexp(1.0, -coarse[i]), 0.0);
        EXPECT_NEAR(sw.stats[i].exact_mean * std::pow(5.0, -6), std::pow(5.0, -coarse[i]), 1e-12);
    }
}

TEST(GraphCurve, LipschitzPathHasWalkDimensionTwo) {
    const std::size_t n = 1 << 14;
    const PathSource line = [n](const RngSpec&) {
        return function_path([](double t) { return t; }, n, 0.0, 1.0);
    };
    const auto radii = geometric(0.05, 0.005, 5);
    FbmGraphOptions opt;
    opt.grid_steps = n;
    const auto curves = graph_walk_curve(line, 1.0, radii, 4, 5, RngSpec{5, 0}, opt);
    EXPECT_NEAR(walk_dimension(curves.product).value, 2.0, 0.05);
    EXPECT_NEAR(walk_dimension(curves.plus_leg).value, 1.0, 0.05);
    EXPECT_NEAR(walk_dimension(curves.minus_leg).value, 1.0, 0.05);
    EXPECT_EQ(curves.censored, 0u);
    EXPECT_NE(curves.product.source.find("function graph"), std::string::npos);
}

TEST(GraphCurve, FbmSlopes) {
    struct Case {
        double h, target, tol;
    };
    for (const auto& c : {Case{0.5, 4.0, 0.2}, Case{0.8, 2.5, 0.2}}) {
        FbmGraphOptions opt;
        opt.grid_steps = std::size_t{1} << 16;
        opt.horizon = 1.0 / 256;
        const double sd = std::pow(opt.horizon / static_cast<double>(opt.grid_steps), c.h);
        const auto radii = geometric(40 * sd, 10 * sd, 5);
        const auto curves = fbm_graph_walk_curve(c.h, radii, 100, 20, RngSpec{6, 0}, opt);
        const double full = walk_dimension(curves.product).value;
        EXPECT_NEAR(full, c.target, c.tol) << c.h;
        const double plus = walk_dimension(curves.plus_leg).value;
        const double minus = walk_dimension(curves.minus_leg).value;
        EXPECT_NEAR(plus, 1.0 / c.h, 0.15);
        EXPECT_NEAR(minus, 1.0 / c.h, 0.15);
        EXPECT_NEAR(plus + minus, full, 0.1);
        EXPECT_GE(upper_walk_dimension(curves.product).value, full - 1e-12);
        EXPECT_LE(static_cast<double>(curves.censored), 0.01 * static_cast<double>(curves.samples));
        EXPECT_EQ(curves.product.source.rfind("fbm graph H=", 0), 0u);
    }
}

TEST(GraphCurve, Errors) {
    const double radii3[] = {0.3, 0.2, 0.1};
    EXPECT_THROW(fbm_graph_walk_curve(0.5, radii3, 10, 1, RngSpec{}), std::invalid_argument);
    const double up[] = {0.1, 0.2, 0.3, 0.4};
    EXPECT_THROW(fbm_graph_walk_curve(0.5, up, 10, 1, RngSpec{}), std::invalid_argument);
    const double ok[] = {0.4, 0.3, 0.2, 0.1};
    EXPECT_THROW(fbm_graph_walk_curve(0.5, ok, 1, 1, RngSpec{}), std::invalid_argument);
    FbmGraphOptions bad;
    bad.extrapolation_order = 3;
    EXPECT_THROW(fbm_graph_walk_curve(0.5, ok, 10, 1, RngSpec{}, bad), std::invalid_argument);
    // Radii near the path length censor almost every crossing.
    FbmGraphOptions small;
    small.grid_steps = 1024;
    const double huge[] = {4.0, 3.0, 2.0, 1.0};
    EXPECT_THROW(fbm_graph_walk_curve(0.5, huge, 4, 4, RngSpec{}, small), std::runtime_error);
}

TEST(Holder, Examples) {
    const auto line = function_path([](double t) { return t; }, 4096, 0.0, 1.0);
    EXPECT_NEAR(holder_regularity(line, 2048, dyadic(0.2, 6)).alpha, 1.0, 0.02);

    const auto root = function_path([](double t) { return std::sqrt(std::abs(t)); }, 1 << 16, 0.0, 1.0);
    EXPECT_NEAR(holder_regularity(root, 0, dyadic(0.5, 8)).alpha, 0.5, 0.02);

    stoch::PathSample flat;
    flat.dt = 0.01;
    flat.values.assign(101, 1.0);
    const auto f = holder_regularity(flat, 50, dyadic(0.4, 4));
    EXPECT_TRUE(f.infinite);
    EXPECT_TRUE(std::isinf(f.alpha));
}

TEST(Holder, BrownianPathsAreHalfRegular) {
    double sum = 0.0;
    const std::size_t n = 1 << 16;
    for (std::size_t a = 0; a < 50; ++a) {
        const auto p = stoch::sample_fbm(0.5, n, 1.0, RngSpec{8, a});
        sum += holder_regularity(p, n / 2, dyadic(0.25, 10)).alpha;
    }
    EXPECT_NEAR(sum / 50.0, 0.5, 0.05);
}

TEST(Holder, Errors) {
    const auto line = function_path([](double t) { return t; }, 100, 0.0, 1.0);
    EXPECT_THROW(holder_regularity(line, 50, dyadic(0.2, 3)), std::invalid_argument);
    EXPECT_THROW(holder_regularity(line, 101, dyadic(0.2, 4)), std::invalid_argument);
    EXPECT_THROW(holder_regularity(line, 50, dyadic(0.001, 4)), std::invalid_argument);
    const double too_big[] = {0.8, 0.4, 0.2, 0.1};
    EXPECT_THROW(holder_regularity(line, 50, too_big), std::invalid_argument);
}

TEST(GraphCloud, GapsAreBounded) {
    const auto p = stoch::sample_fbm(0.5, 256, 1.0, RngSpec{9, 0});
    const double gap = 0.01;
    const auto cloud = graph_cloud(p, gap);
    EXPECT_GE(cloud.size(), p.values.size());
    for (std::size_t i = 1; i < cloud.size(); ++i) {
        EXPECT_LE(std::abs(cloud[i][0] - cloud[i - 1][0]), gap + 1e-12);
        EXPECT_LE(std::abs(cloud[i][1] - cloud[i - 1][1]), gap + 1e-12);
    }
    EXPECT_THROW(graph_cloud(p, 0.0), std::invalid_argument);
}
