#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "fraclab/fbm.hpp"
#include "fraclab/sg.hpp"
#include "fraclab/spaces.hpp"

using namespace fraclab;

namespace {

using Sampler = std::function<Point(std::mt19937_64&)>;

void check_metric_axioms(const SpaceDescriptor& s, const Sampler& sample, double tol = 1e-12) {
    std::mt19937_64 eng(42);
    for (int i = 0; i < 1000; ++i) {
        const auto x = sample(eng), y = sample(eng), z = sample(eng);
        const double dxy = distance(s, x, y), dyx = distance(s, y, x);
        const double dxz = distance(s, x, z), dzy = distance(s, z, y);
        ASSERT_GE(dxy, 0.0);
        ASSERT_NEAR(dxy, dyx, tol);
        ASSERT_EQ(distance(s, x, x), 0.0);
        if (x != y) ASSERT_GT(dxy, 0.0);
        ASSERT_LE(dxy, dxz + dzy + tol) << s.name();
    }
}

Sampler uniform_points(std::size_t dim, double lo, double hi) {
    return [=](std::mt19937_64& e) {
        std::uniform_real_distribution<double> u(lo, hi);
        Point p(dim);
        for (auto& v : p) v = u(e);
        return p;
    };
}

}  // namespace

TEST(Distance, SpecExamples) {
    const auto arctan = SpaceDescriptor::arctan_line();
    const Point zero{0.0}, one{1.0};
    EXPECT_NEAR(distance(arctan, zero, one), 0.785398163397448, 1e-12);
    const auto holder = SpaceDescriptor::holder_product(0.5);
    const Point o{0.0, 0.0}, d{1.0, 1.0};
    EXPECT_DOUBLE_EQ(distance(holder, o, d), 2.0);
    const Point q{0.25, -3.0};
    EXPECT_DOUBLE_EQ(distance(holder, o, q), 0.5 + 3.0);
}

TEST(Distance, IdentityOnEveryKind) {
    const Point p1{0.3}, p2{0.3, -1.2};
    EXPECT_EQ(distance(SpaceDescriptor::euclidean(1), p1, p1), 0.0);
    EXPECT_EQ(distance(SpaceDescriptor::arctan_line(), p1, p1), 0.0);
    EXPECT_EQ(distance(SpaceDescriptor::holder_product(0.3), p2, p2), 0.0);
    EXPECT_EQ(distance(SpaceDescriptor::l1_plane(), p2, p2), 0.0);
    const auto g = graph_of_function_space({0.0, 1.0}, {0.0, 2.0});
    const Point on{0.5, 1.0};
    EXPECT_EQ(distance(g, on, on), 0.0);
}

TEST(Distance, DimensionMismatchAndNonFinite) {
    const auto e2 = SpaceDescriptor::euclidean(2);
    const Point a{1.0}, b{1.0, 2.0};
    EXPECT_THROW(distance(e2, a, b), std::invalid_argument);
    EXPECT_THROW(distance(SpaceDescriptor::arctan_line(), b, b), std::invalid_argument);
    const Point bad{std::nan(""), 0.0};
    EXPECT_THROW(distance(e2, bad, b), std::invalid_argument);
}

TEST(Distance, MetricAxiomsEuclidean) {
    check_metric_axioms(SpaceDescriptor::euclidean(1), uniform_points(1, -5, 5));
    check_metric_axioms(SpaceDescriptor::euclidean(3, 2.5), uniform_points(3, -5, 5));
    check_metric_axioms(SpaceDescriptor::l1_plane(), uniform_points(2, -5, 5));
}

TEST(Distance, MetricAxiomsArctanAndBound) {
    const auto s = SpaceDescriptor::arctan_line();
    check_metric_axioms(s, uniform_points(1, -1e6, 1e6));
    check_metric_axioms(s, uniform_points(1, -3, 3));
    std::mt19937_64 eng(1);
    std::cauchy_distribution<double> heavy;
    for (int i = 0; i < 1000; ++i) {
        const Point x{heavy(eng)}, y{heavy(eng)};
        EXPECT_LE(distance(s, x, y), std::numbers::pi);
    }
}

TEST(Distance, ArctanIsometryThroughTan) {
    const auto s = SpaceDescriptor::arctan_line();
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(eng), b = u(eng);
        const Point x{std::tan(a)}, y{std::tan(b)};
        EXPECT_NEAR(distance(s, x, y), std::abs(a - b), 1e-12);
    }
}

TEST(Distance, MetricAxiomsHolderProduct) {
    for (double alpha : {0.2, 0.5, 0.9}) {
        check_metric_axioms(SpaceDescriptor::holder_product(alpha), uniform_points(2, -2, 2));
    }
}

TEST(Distance, MetricAxiomsFunctionGraph) {
    const auto path = stoch::sample_fbm(0.4, 1024, 1.0, RngSpec{5, 0});
    const auto s = graph_of_function_space(path.times(), path.values);
    const auto* f = s.as<FunctionGraphSup>();
    ASSERT_NE(f, nullptr);
    check_metric_axioms(s, [&](std::mt19937_64& e) {
        const double t = std::uniform_real_distribution<double>(0.0, 1.0)(e);
        return f->phi(t);
    });
}

TEST(Distance, MetricAxiomsGraphMetric) {
    auto g = std::make_shared<const sg::GraphApprox>(sg::build_graph(3));
    const SpaceDescriptor s(GraphMetric{g});
    check_metric_axioms(s, [&](std::mt19937_64& e) {
        const auto i = std::uniform_int_distribution<std::size_t>(0, g->size() - 1)(e);
        const auto& v = g->vertex(i);
        return Point{v[0], v[1]};
    });
    // Adjacent vertices are one hop of length 2^-3 apart.
    const auto& [a, b] = g->edges().front();
    const Point pa{g->vertex(a)[0], g->vertex(a)[1]}, pb{g->vertex(b)[0], g->vertex(b)[1]};
    EXPECT_DOUBLE_EQ(distance(s, pa, pb), 0.125);
    const Point off{0.1, 0.1};
    EXPECT_THROW(distance(s, pa, off), std::invalid_argument);
}

TEST(BallExitRadius, Examples) {
    const Point zero{0.0}, p{0.3};
    EXPECT_DOUBLE_EQ(ball_exit_radius(SpaceDescriptor::euclidean(1), zero, p), 0.3);
    const Point q{std::tan(0.2)};
    EXPECT_NEAR(ball_exit_radius(SpaceDescriptor::arctan_line(), zero, q), 0.2, 1e-15);
    // f(t) = t^2 on [0, 1], center (0, f(0)).
    std::vector<double> t, v;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(k / 100.0);
        v.push_back(t.back() * t.back());
    }
    const auto g = graph_of_function_space(t, v);
    const Point c{0.0, 0.0};
    for (int k : {10, 50, 100}) {
        const Point pt{t[k], v[k]};
        EXPECT_DOUBLE_EQ(ball_exit_radius(g, c, pt), std::max(t[k], v[k]));
    }
}

TEST(FunctionGraph, ConstantAndDiagonal) {
    const auto flat = graph_of_function_space({0.0, 0.5, 1.0}, {0.0, 0.0, 0.0});
    for (double s : {0.0, 0.2, 0.7}) {
        for (double u : {0.1, 1.0}) {
            const Point a{s, 0.0}, b{u, 0.0};
            EXPECT_DOUBLE_EQ(distance(flat, a, b), std::abs(s - u));
        }
    }
    const auto diag = graph_of_function_space({0.0, 1.0}, {0.0, 1.0});
    const Point a{0.0, 0.0}, b{1.0, 1.0};
    EXPECT_DOUBLE_EQ(distance(diag, a, b), 1.0);
    const Point off{0.5, 0.7};
    EXPECT_THROW(distance(diag, a, off), std::invalid_argument);
}

TEST(FunctionGraph, FbmSpotChecksAgainstDirectMax) {
    const auto path = stoch::sample_fbm(0.5, 256, 1.0, RngSpec{9, 1});
    const auto s = graph_of_function_space(path.times(), path.values);
    std::mt19937_64 eng(4);
    std::uniform_int_distribution<std::size_t> pick(0, 256);
    for (int i = 0; i < 200; ++i) {
        const auto j = pick(eng), k = pick(eng);
        const Point a{path.time(j), path.values[j]}, b{path.time(k), path.values[k]};
        const double direct = std::max(std::abs(path.time(j) - path.time(k)), std::abs(path.values[j] - path.values[k]));
        EXPECT_DOUBLE_EQ(distance(s, a, b), direct);
    }
}

TEST(FunctionGraph, PhiAndProjection) {
    const auto s = graph_of_function_space({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
    const auto* f = s.as<FunctionGraphSup>();
    const auto p = f->phi(0.25);
    EXPECT_DOUBLE_EQ(p[0], 0.25);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
    EXPECT_DOUBLE_EQ(FunctionGraphSup::project(p), 0.25);
    EXPECT_THROW(f->eval(2.5), std::out_of_range);
}

TEST(FunctionGraph, HolderPathBound) {
    // f(t) = 2 sqrt(t) is 1/2-Holder with constant 2.
    std::vector<double> t, v;
    for (int k = 0; k <= 4000; ++k) {
        t.push_back(k / 4000.0);
        v.push_back(2.0 * std::sqrt(t.back()));
    }
    const auto s = graph_of_function_space(t, v);
    std::mt19937_64 eng(8);
    std::uniform_int_distribution<int> pick(0, 4000);
    for (int i = 0; i < 1000; ++i) {
        const int j = pick(eng), k = pick(eng);
        if (j == k || std::abs(t[j] - t[k]) >= 1.0) continue;
        const Point a{t[j], v[j]}, b{t[k], v[k]};
        EXPECT_LE(distance(s, a, b), 2.0 * std::sqrt(std::abs(t[j] - t[k])) + 1e-12);
    }
}

TEST(FunctionGraph, RejectsBadSamples) {
    EXPECT_THROW(graph_of_function_space({0.0, 1.0}, {0.0}), std::invalid_argument);
    EXPECT_THROW(graph_of_function_space({0.0, 1.0, 0.5}, {0.0, 1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(graph_of_function_space({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST(SpaceDescriptor, ValidatesParameters) {
    EXPECT_THROW(SpaceDescriptor::holder_product(1.0), std::invalid_argument);
    EXPECT_THROW(SpaceDescriptor::holder_product(0.0), std::invalid_argument);
    EXPECT_THROW(SpaceDescriptor::euclidean(0), std::invalid_argument);
    EXPECT_THROW(SpaceDescriptor::euclidean(1, -1.0), std::invalid_argument);
}

TEST(BoundaryGap, MatchesDistanceToComplement) {
    const Point c{0.0};
    const auto e = SpaceDescriptor::euclidean(1, 3.0);
    const std::vector<double> w{1.0};
    const Point p{0.1};
    // Metric radius 0.6 is coordinate radius 0.2.
    EXPECT_NEAR(boundary_gap(e, c, 0.6, p, w), 0.1, 1e-15);
    const auto a = SpaceDescriptor::arctan_line();
    const Point q{0.2};
    EXPECT_NEAR(boundary_gap(a, c, 0.3, q, w), std::tan(0.3) - 0.2, 1e-15);
    const Point far{1e6};
    EXPECT_LT(boundary_gap(a, c, 0.3, far, w), 0.0);
    const auto g = graph_of_function_space({0.0, 1.0}, {0.0, 1.0});
    const Point g0{0.0, 0.0};
    const std::vector<double> w2{1.0, 1.0};
    EXPECT_THROW(boundary_gap(g, g0, 0.1, g0, w2), std::invalid_argument);
}
