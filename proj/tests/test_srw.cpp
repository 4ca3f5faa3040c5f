#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "fraclab/sg.hpp"
#include "fraclab/srw.hpp"
#include "support/stats.hpp"

using namespace fraclab;
using namespace fraclab::stoch;

namespace {

// Expected absorption time through the fundamental matrix (I - Q)^-1 of the
// transition matrix restricted to the transient states.
double fundamental_matrix_mean(const sg::GraphApprox& g, int coarse_level, std::size_t start) {
    const std::size_t coarse = sg::vertex_count(coarse_level);
    std::vector<std::ptrdiff_t> idx(g.size(), -1);
    std::vector<std::size_t> states;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (v == start || v >= coarse) {
            idx[v] = static_cast<std::ptrdiff_t>(states.size());
            states.push_back(v);
        }
    }
    const auto m = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& nb = g.neighbors(states[i]);
        for (auto w : nb) {
            if (idx[w] >= 0) q(static_cast<Eigen::Index>(i), idx[w]) += 1.0 / static_cast<double>(nb.size());
        }
    }
    const Eigen::MatrixXd n = (Eigen::MatrixXd::Identity(m, m) - q).inverse();
    return n.row(idx[start]).sum();
}

}  // namespace

TEST(Srw, ExactCrossingMeans) {
    for (int n = 1; n <= 6; ++n) {
        const auto g = sg::build_graph(n);
        for (int m = 0; m < n; ++m) {
            const double expected = std::pow(5.0, n - m);
            EXPECT_NEAR(exact_crossing_mean(g, m, 0), expected, 1e-8 * expected) << n << " " << m;
            if (m >= 1) {
                EXPECT_NEAR(exact_crossing_mean(g, m, 3), expected, 1e-8 * expected) << n << " " << m;
            }
        }
    }
}

TEST(Srw, ExamplesAndJunctionSymmetry) {
    const auto a = srw_crossing_stats(1, 0, RngSpec{1, 0}, 10);
    EXPECT_NEAR(a.exact_mean, 5.0, 1e-12);
    const auto b = srw_crossing_stats(2, 0, RngSpec{1, 0}, 10);
    EXPECT_NEAR(b.exact_mean, 25.0, 1e-10);
    for (int m = 1; m <= 4; ++m) {
        const auto s = srw_crossing_stats(m + 1, m, RngSpec{1, 0}, 10);
        EXPECT_NEAR(s.exact_mean, s.exact_mean_junction, 1e-9);
        EXPECT_NEAR(s.exact_mean, 5.0, 1e-9);
    }
}

TEST(Srw, LinearSolveMatchesFundamentalMatrix) {
    for (int n = 1; n <= 4; ++n) {
        const auto g = sg::build_graph(n);
        for (int m = 0; m < n; ++m) {
            for (std::size_t v = 0; v < sg::vertex_count(m); ++v) {
                EXPECT_NEAR(exact_crossing_mean(g, m, v), fundamental_matrix_mean(g, m, v), 1e-8);
            }
        }
    }
}

TEST(Srw, MonteCarloAgreesWithExact) {
    const std::pair<int, int> cases[] = {{2, 0}, {3, 1}, {4, 2}, {5, 3}, {5, 2}};
    std::uint64_t stream = 0;
    for (auto [n, m] : cases) {
        const auto s = srw_crossing_stats(n, m, RngSpec{2, stream++}, 5000);
        EXPECT_EQ(s.n_runs, 5000u);
        EXPECT_LT(std::abs(s.mean_steps - s.exact_mean), 3.0 * s.std_error) << n << " " << m;
    }
}

TEST(Srw, EmbeddedWalkIsCoarseWalk) {
    const auto s = srw_crossing_stats(3, 1, RngSpec{3, 0}, 40000, true);
    ASSERT_EQ(s.embedded_walk.size(), 40001u);
    const auto g1 = sg::build_graph(1);
    for (std::size_t k = 1; k < s.embedded_walk.size(); ++k) {
        const auto& nb = g1.neighbors(s.embedded_walk[k - 1]);
        ASSERT_NE(std::find(nb.begin(), nb.end(), s.embedded_walk[k]), nb.end());
    }
    const std::size_t from = 3;
    const auto& nb = g1.neighbors(from);
    std::vector<double> observed(nb.size(), 0.0), probs(nb.size(), 1.0 / static_cast<double>(nb.size()));
    for (std::size_t k = 1; k < s.embedded_walk.size(); ++k) {
        if (s.embedded_walk[k - 1] != from) continue;
        const auto it = std::find(nb.begin(), nb.end(), s.embedded_walk[k]);
        observed[static_cast<std::size_t>(it - nb.begin())] += 1.0;
    }
    const auto chi = fraclab::testing::chi_square(observed, probs);
    EXPECT_EQ(chi.dof, 3u);
    EXPECT_GT(chi.p_value, 0.01);
}

TEST(Srw, Deterministic) {
    const auto a = srw_crossing_stats(4, 1, RngSpec{8, 8}, 300);
    const auto b = srw_crossing_stats(4, 1, RngSpec{8, 8}, 300);
    EXPECT_EQ(a.mean_steps, b.mean_steps);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Srw, Errors) {
    EXPECT_THROW(srw_crossing_stats(2, 2, RngSpec{}, 10), std::invalid_argument);
    EXPECT_THROW(srw_crossing_stats(9, 1, RngSpec{}, 10), std::invalid_argument);
    EXPECT_THROW(srw_crossing_stats(2, -1, RngSpec{}, 10), std::invalid_argument);
    EXPECT_THROW(srw_crossing_stats(2, 1, RngSpec{}, 0), std::invalid_argument);
    const auto g = sg::build_graph(2);
    EXPECT_THROW(exact_crossing_mean(g, 0, 5), std::invalid_argument);
    EXPECT_THROW(expected_hitting_time(g, 0, std::vector<bool>(3, true)), std::invalid_argument);
}
