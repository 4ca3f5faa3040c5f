#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/fit.hpp"
#include "fraclab/sg.hpp"

namespace fraclab::energy {

/// Real function on the vertices of G_level, indexed like the graph.
struct VertexFunction {
    int level = 0;
    std::vector<double> values;
};

struct SpectrumResult {
    std::vector<double> eigenvalues;  // ascending, with multiplicity
    int level = 0;
    double normalization = 1.0;
};

/// Per-level energy factor: the renormalised form is (5/3)^n times the raw one.
inline double renormalization(int level) { return std::pow(5.0 / 3.0, level); }

/// Time scale 5^n applied to the level-n gasket Laplacian.
inline double sg_laplacian_scale(int level) { return std::pow(5.0, level); }

namespace detail {
inline void check_level(const sg::GraphApprox& g, const VertexFunction& u, const char* op) {
    if (u.level != g.level() || u.values.size() != g.size()) {
        throw std::invalid_argument(std::string(op) + ": function on level " + std::to_string(u.level) + " (" +
                                    std::to_string(u.values.size()) + " values) does not match graph level " +
                                    std::to_string(g.level()));
    }
}
}  // namespace detail

/// Sum over edges of (u(x) - u(y))^2, optionally times (5/3)^n.
inline double energy(const sg::GraphApprox& g, const VertexFunction& u, bool renormalized = false) {
    detail::check_level(g, u, "energy");
    double e = 0.0;
    for (const auto& [a, b] : g.edges()) {
        const double d = u.values[a] - u.values[b];
        e += d * d;
    }
    return renormalized ? e * renormalization(g.level()) : e;
}

/// Energy-minimising extension from V_n to V_{n+1}. Each new vertex facing
/// corner value a of a cell with the other corners b, c gets (a + 2b + 2c) / 5.
inline VertexFunction harmonic_extension(const sg::GraphApprox& g, const VertexFunction& u) {
    detail::check_level(g, u, "harmonic_extension");
    if (g.level() + 1 > sg::kMaxLevel) {
        throw std::invalid_argument("harmonic_extension: level " + std::to_string(g.level() + 1) + " too fine");
    }
    VertexFunction out;
    out.level = g.level() + 1;
    out.values = u.values;
    out.values.reserve(sg::vertex_count(out.level));
    // New vertices follow build_graph's order: per cell, the midpoints facing
    // its first, second and third corner.
    for (const auto& [a, b, c] : g.cells()) {
        const double ua = u.values[a], ub = u.values[b], uc = u.values[c];
        out.values.push_back((ua + 2.0 * ub + 2.0 * uc) / 5.0);
        out.values.push_back((2.0 * ua + ub + 2.0 * uc) / 5.0);
        out.values.push_back((2.0 * ua + 2.0 * ub + uc) / 5.0);
    }
    return out;
}

/// Repeated harmonic extension from V_0 values to level n.
inline VertexFunction extend_to_level(std::span<const double> corner_values, int level) {
    if (corner_values.size() != 3) throw std::invalid_argument("extend_to_level: need three corner values");
    VertexFunction u{0, {corner_values.begin(), corner_values.end()}};
    for (int k = 0; k < level; ++k) u = harmonic_extension(sg::build_graph(k), u);
    return u;
}

/// Dirichlet Laplacian restricted to the interior vertices.
struct DirichletLaplacian {
    Eigen::MatrixXd matrix;
    std::vector<std::size_t> interior;  // row i corresponds to vertex interior[i]
    double scale = 1.0;
};

/// L[i][i] = deg(i) s, L[i][j] = -s per edge, boundary rows and columns removed.
/// Degrees count edges to boundary vertices.
inline DirichletLaplacian assemble_dirichlet_laplacian(std::size_t n_vertices,
                                                       std::span<const std::pair<std::size_t, std::size_t>> edges,
                                                       std::span<const std::size_t> boundary, double scale) {
    std::vector<bool> fixed(n_vertices, false);
    for (auto b : boundary) {
        if (b >= n_vertices) throw std::invalid_argument("laplacian_matrix: boundary vertex out of range");
        fixed[b] = true;
    }
    std::vector<std::ptrdiff_t> row(n_vertices, -1);
    DirichletLaplacian out;
    out.scale = scale;
    for (std::size_t v = 0; v < n_vertices; ++v) {
        if (!fixed[v]) {
            row[v] = static_cast<std::ptrdiff_t>(out.interior.size());
            out.interior.push_back(v);
        }
    }
    if (out.interior.empty()) throw std::invalid_argument("laplacian_matrix: empty interior");
    const auto m = static_cast<Eigen::Index>(out.interior.size());
    out.matrix = Eigen::MatrixXd::Zero(m, m);
    for (const auto& [a, b] : edges) {
        if (row[a] >= 0) out.matrix(row[a], row[a]) += scale;
        if (row[b] >= 0) out.matrix(row[b], row[b]) += scale;
        if (row[a] >= 0 && row[b] >= 0) {
            out.matrix(row[a], row[b]) -= scale;
            out.matrix(row[b], row[a]) -= scale;
        }
    }
    return out;
}

/// Gasket Laplacian on G_n with the three corners as Dirichlet set; scale
/// defaults to 5^n.
inline DirichletLaplacian laplacian_matrix(const sg::GraphApprox& g, std::span<const std::size_t> boundary,
                                           double scale) {
    return assemble_dirichlet_laplacian(g.size(), g.edges(), boundary, scale);
}

inline DirichletLaplacian laplacian_matrix(const sg::GraphApprox& g) {
    const auto b = g.boundary();
    return laplacian_matrix(g, b, sg_laplacian_scale(g.level()));
}

/// Path with m interior nodes on an interval of the given length, endpoints
/// fixed; scale 1/h^2.
inline DirichletLaplacian path_laplacian(std::size_t m, double length = 1.0) {
    if (m == 0) throw std::invalid_argument("path_laplacian: need interior nodes");
    const double h = length / static_cast<double>(m + 1);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i + 1 < m + 2; ++i) edges.emplace_back(i, i + 1);
    const std::size_t boundary[] = {0, m + 1};
    return assemble_dirichlet_laplacian(m + 2, edges, boundary, 1.0 / (h * h));
}

/// Five-point Laplacian on the lattice hZ^2 inside the disk of the given
/// radius; lattice points outside are the Dirichlet set.
inline DirichletLaplacian disk_laplacian(double h, double radius = 1.0) {
    if (!(h > 0.0 && h < radius)) throw std::invalid_argument("disk_laplacian: need 0 < h < radius");
    const auto k = static_cast<long>(std::ceil(radius / h)) + 1;
    const auto side = static_cast<std::size_t>(2 * k + 1);
    auto id = [&](long i, long j) { return static_cast<std::size_t>(i + k) * side + static_cast<std::size_t>(j + k); };
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> boundary;
    auto inside = [&](long i, long j) {
        const double x = static_cast<double>(i) * h, y = static_cast<double>(j) * h;
        return x * x + y * y < radius * radius;
    };
    for (long i = -k; i <= k; ++i) {
        for (long j = -k; j <= k; ++j) {
            if (!inside(i, j)) {
                boundary.push_back(id(i, j));
                continue;
            }
            for (auto [di, dj] : {std::pair{1L, 0L}, std::pair{0L, 1L}, std::pair{-1L, 0L}, std::pair{0L, -1L}}) {
                const long a = i + di, b = j + dj;
                // Interior pairs once; interior-boundary pairs from the interior side.
                if (inside(a, b) && (di < 0 || dj < 0)) continue;
                edges.emplace_back(id(i, j), id(a, b));
            }
        }
    }
    return assemble_dirichlet_laplacian(side * side, edges, boundary, 1.0 / (h * h));
}

/// Dense symmetric eigensolve.
inline SpectrumResult spectrum(const DirichletLaplacian& lap, int level = 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap.matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
    SpectrumResult out;
    out.level = level;
    out.normalization = lap.scale;
    const auto& ev = solver.eigenvalues();
    out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    if (!out.eigenvalues.empty() && out.eigenvalues.front() < -1e-9 * std::max(1.0, lap.scale)) {
        throw std::runtime_error("spectrum: negative eigenvalue " + std::to_string(out.eigenvalues.front()));
    }
    return out;
}

/// N(x) = #{k : lambda_k <= x}.
inline std::size_t eigenvalue_counting(const SpectrumResult& spec, double x) {
    if (x < 0.0) throw std::invalid_argument("eigenvalue_counting: threshold must be nonnegative");
    return static_cast<std::size_t>(std::upper_bound(spec.eigenvalues.begin(), spec.eigenvalues.end(), x) -
                                    spec.eigenvalues.begin());
}

/// Fraction of the spectrum (by index) used for the Weyl-type fit.
struct SpectralWindow {
    double low = 0.01;
    double high = 0.15;
};

/// Slope of log N(lambda_k) against log lambda_k for k in the window.
inline DimensionFit spectral_dimension_fit(const SpectrumResult& spec, SpectralWindow window = {}) {
    if (!(window.low >= 0.0 && window.low < window.high && window.high <= 1.0)) {
        throw std::invalid_argument("spectral_dimension_fit: window must satisfy 0 <= low < high <= 1");
    }
    const auto m = spec.eigenvalues.size();
    const auto first = static_cast<std::size_t>(std::ceil(window.low * static_cast<double>(m)));
    const auto last = static_cast<std::size_t>(std::floor(window.high * static_cast<double>(m)));
    std::vector<double> x, y;
    for (std::size_t k = std::max<std::size_t>(first, 1); k <= last && k <= m; ++k) {
        const double lam = spec.eigenvalues[k - 1];
        if (!(lam > 0.0)) continue;
        x.push_back(lam);
        y.push_back(static_cast<double>(eigenvalue_counting(spec, lam)));
    }
    if (x.size() < 20) {
        throw std::invalid_argument("spectral_dimension_fit: only " + std::to_string(x.size()) +
                                    " eigenvalues in window, need 20");
    }
    return loglog_fit(x, y);
}

}  // namespace fraclab::energy
