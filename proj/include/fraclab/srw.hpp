#pragma once

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/rng.hpp"
#include "fraclab/sg.hpp"

namespace fraclab::stoch {

/// Expected number of steps for the simple random walk on g, started at
/// vertex `start`, to hit `targets`. Solves deg(x) h(x) - sum_{y~x} h(y) =
/// deg(x) off the targets with h = 0 on them.
inline double expected_hitting_time(const sg::GraphApprox& g, std::size_t start,
                                    const std::vector<bool>& targets) {
    if (targets.size() != g.size()) throw std::invalid_argument("expected_hitting_time: target mask size");
    if (targets[start]) return 0.0;
    std::vector<std::ptrdiff_t> row(g.size(), -1);
    std::ptrdiff_t m = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (!targets[v]) row[v] = m++;
    }
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs(m);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (row[v] < 0) continue;
        const double deg = static_cast<double>(g.degree(v));
        trip.emplace_back(row[v], row[v], deg);
        rhs(row[v]) = deg;
        for (auto w : g.neighbors(v)) {
            if (row[w] >= 0) trip.emplace_back(row[v], row[w], -1.0);
        }
    }
    Eigen::SparseMatrix<double> a(m, m);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) throw std::runtime_error("expected_hitting_time: factorisation failed");
    const Eigen::VectorXd h = solver.solve(rhs);
    return h(row[start]);
}

/// Exact expected steps on G_n from v in V_m until the walk reaches another
/// point of V_m.
inline double exact_crossing_mean(const sg::GraphApprox& g, int coarse_level, std::size_t v) {
    const std::size_t coarse = sg::vertex_count(coarse_level);
    if (v >= coarse) throw std::invalid_argument("exact_crossing_mean: start is not a coarse vertex");
    std::vector<bool> targets(g.size(), false);
    for (std::size_t u = 0; u < coarse; ++u) targets[u] = u != v;
    return expected_hitting_time(g, v, targets);
}

struct SrwCrossingStats {
    int fine_level = 0;
    int coarse_level = 0;
    double mean_steps = 0.0;
    double std_error = 0.0;
    std::size_t n_runs = 0;
    double exact_mean = 0.0;           // from a corner
    double exact_mean_junction = 0.0;  // from a coarse vertex shared by two cells; equals exact_mean
    /// Coarse vertices in visiting order, starting at the initial corner.
    std::vector<std::size_t> embedded_walk;
};

/// Steps of the simple random walk on G_n between successive visits to
/// distinct points of V_m, by simulation and by the absorbing-chain solve.
inline SrwCrossingStats srw_crossing_stats(int fine_level, int coarse_level, const RngSpec& rng,
                                           std::size_t n_runs, bool record_embedded = false) {
    if (!(0 <= coarse_level && coarse_level < fine_level && fine_level <= 8)) {
        throw std::invalid_argument("srw_crossing_stats: need 0 <= m < n <= 8");
    }
    if (n_runs == 0) throw std::invalid_argument("srw_crossing_stats: need at least one run");
    const auto g = sg::build_graph(fine_level);
    const std::size_t coarse = sg::vertex_count(coarse_level);

    SrwCrossingStats out;
    out.fine_level = fine_level;
    out.coarse_level = coarse_level;
    out.exact_mean = exact_crossing_mean(g, coarse_level, 0);
    out.exact_mean_junction = coarse_level >= 1 ? exact_crossing_mean(g, coarse_level, 3) : out.exact_mean;

    auto eng = make_engine(rng);
    std::size_t v = 0;
    std::size_t last_coarse = 0;
    if (record_embedded) out.embedded_walk.push_back(0);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t run = 0; run < n_runs; ++run) {
        std::size_t steps = 0;
        for (;;) {
            const auto& nb = g.neighbors(v);
            v = nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(eng)];
            ++steps;
            if (v < coarse && v != last_coarse) break;
        }
        last_coarse = v;
        if (record_embedded) out.embedded_walk.push_back(v);
        const double s = static_cast<double>(steps);
        sum += s;
        sum2 += s * s;
    }
    const double n = static_cast<double>(n_runs);
    out.n_runs = n_runs;
    out.mean_steps = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum2 - n * out.mean_steps * out.mean_steps) / (n - 1.0)) : 0.0;
    out.std_error = std::sqrt(var / n);
    return out;
}

}  // namespace fraclab::stoch
