#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fraclab/point.hpp"
#include "fraclab/sg.hpp"

namespace fraclab {

enum class Norm { L2, L1 };

/// Open subset of R^n with a (possibly rescaled) Euclidean or 1-norm metric.
/// `metric_scale` c realises the image of the domain under x -> c x without
/// moving coordinates: d(x, y) = c |x - y|.
struct EuclideanDomain {
    std::size_t dim = 1;
    std::vector<double> lower;  // empty: unbounded
    std::vector<double> upper;
    double metric_scale = 1.0;
    Norm norm = Norm::L2;
};

/// R with d(x, y) = |arctan x - arctan y|.
struct ArctanLine {};

/// R^2 with d(x, y) = |x1 - y1|^alpha + |x2 - y2|.
struct HolderProduct {
    double alpha = 0.5;
};

/// Graph {(t, f(t))} of a sampled path under the max metric. The path is
/// linearly interpolated between samples.
struct FunctionGraphSup {
    std::shared_ptr<const std::vector<double>> times;
    std::shared_ptr<const std::vector<double>> values;

    double t_min() const { return times->front(); }
    double t_max() const { return times->back(); }

    double eval(double t) const {
        const auto& ts = *times;
        const auto& vs = *values;
        if (t < ts.front() || t > ts.back()) {
            throw std::out_of_range("FunctionGraphSup: time outside the sampled range");
        }
        const auto it = std::upper_bound(ts.begin(), ts.end(), t);
        if (it == ts.end()) return vs.back();
        const auto i = static_cast<std::size_t>(it - ts.begin());
        const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
        return vs[i - 1] + w * (vs[i] - vs[i - 1]);
    }

    /// t -> (t, f(t)).
    Point phi(double t) const { return {t, eval(t)}; }
    /// Projection onto the time axis.
    static double project(std::span<const double> p) { return p[0]; }
};

/// Vertices of a gasket graph with the hop metric scaled by 2^-level.
struct GraphMetric {
    std::shared_ptr<const sg::GraphApprox> graph;
};

class SpaceDescriptor {
public:
    using Kind = std::variant<EuclideanDomain, ArctanLine, HolderProduct, FunctionGraphSup, GraphMetric>;

    SpaceDescriptor(Kind kind) : kind_(std::move(kind)) { validate(); }

    static SpaceDescriptor euclidean(std::size_t dim, double metric_scale = 1.0) {
        EuclideanDomain e;
        e.dim = dim;
        e.metric_scale = metric_scale;
        return SpaceDescriptor(e);
    }
    static SpaceDescriptor arctan_line() { return SpaceDescriptor(ArctanLine{}); }
    static SpaceDescriptor holder_product(double alpha) { return SpaceDescriptor(HolderProduct{alpha}); }
    static SpaceDescriptor l1_plane() {
        EuclideanDomain e;
        e.dim = 2;
        e.norm = Norm::L1;
        return SpaceDescriptor(e);
    }

    const Kind& kind() const { return kind_; }

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&kind_);
    }

    std::size_t point_dim() const {
        return std::visit(
            [](const auto& k) -> std::size_t {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, EuclideanDomain>) {
                    return k.dim;
                } else if constexpr (std::is_same_v<K, ArctanLine>) {
                    return 1;
                } else {
                    return 2;
                }
            },
            kind_);
    }

    std::string name() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, EuclideanDomain>) {
                    return "euclidean(" + std::to_string(k.dim) + ")";
                } else if constexpr (std::is_same_v<K, ArctanLine>) {
                    return "arctan_line";
                } else if constexpr (std::is_same_v<K, HolderProduct>) {
                    return "holder_product";
                } else if constexpr (std::is_same_v<K, FunctionGraphSup>) {
                    return "function_graph_sup";
                } else {
                    return "graph_metric";
                }
            },
            kind_);
    }

private:
    void validate() const {
        if (const auto* e = as<EuclideanDomain>()) {
            if (e->dim == 0) throw std::invalid_argument("EuclideanDomain: dimension must be positive");
            if (!(e->metric_scale > 0.0) || !std::isfinite(e->metric_scale)) {
                throw std::invalid_argument("EuclideanDomain: metric scale must be positive");
            }
            if (e->lower.size() != e->upper.size() || (!e->lower.empty() && e->lower.size() != e->dim)) {
                throw std::invalid_argument("EuclideanDomain: bounds must match the dimension");
            }
            for (std::size_t i = 0; i < e->lower.size(); ++i) {
                if (!(e->lower[i] < e->upper[i])) {
                    throw std::invalid_argument("EuclideanDomain: empty coordinate range");
                }
            }
        } else if (const auto* h = as<HolderProduct>()) {
            if (!(h->alpha > 0.0 && h->alpha < 1.0)) {
                throw std::invalid_argument("HolderProduct: alpha must lie in (0, 1)");
            }
        } else if (const auto* f = as<FunctionGraphSup>()) {
            if (!f->times || !f->values || f->times->size() != f->values->size() || f->times->size() < 2) {
                throw std::invalid_argument("FunctionGraphSup: need at least two samples of equal length");
            }
        } else if (const auto* g = as<GraphMetric>()) {
            if (!g->graph) throw std::invalid_argument("GraphMetric: missing graph");
        }
    }

    Kind kind_;
};

namespace detail {

inline void check_dims(const SpaceDescriptor& space, std::span<const double> p, std::span<const double> q) {
    const std::size_t d = space.point_dim();
    if (p.size() != d || q.size() != d) {
        throw std::invalid_argument("distance on " + space.name() + ": expected points of dimension " +
                                    std::to_string(d) + ", got " + std::to_string(p.size()) + " and " +
                                    std::to_string(q.size()));
    }
    require_finite(p, "distance");
    require_finite(q, "distance");
}

inline double graph_hop_distance(const sg::GraphApprox& g, std::size_t from, std::size_t to) {
    if (from == to) return 0.0;
    std::vector<int> dist(g.size(), -1);
    std::queue<std::size_t> frontier;
    dist[from] = 0;
    frontier.push(from);
    while (!frontier.empty()) {
        const auto v = frontier.front();
        frontier.pop();
        for (auto w : g.neighbors(v)) {
            if (dist[w] >= 0) continue;
            dist[w] = dist[v] + 1;
            if (w == to) return dist[w];
            frontier.push(w);
        }
    }
    throw std::logic_error("graph_hop_distance: graph is disconnected");
}

}  // namespace detail

inline double distance(const SpaceDescriptor& space, std::span<const double> p, std::span<const double> q) {
    detail::check_dims(space, p, q);
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, EuclideanDomain>) {
                double s = 0.0;
                if (k.norm == Norm::L2) {
                    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
                    s = std::sqrt(s);
                } else {
                    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
                }
                return k.metric_scale * s;
            } else if constexpr (std::is_same_v<K, ArctanLine>) {
                return std::abs(std::atan(p[0]) - std::atan(q[0]));
            } else if constexpr (std::is_same_v<K, HolderProduct>) {
                return std::pow(std::abs(p[0] - q[0]), k.alpha) + std::abs(p[1] - q[1]);
            } else if constexpr (std::is_same_v<K, FunctionGraphSup>) {
                // Points are located on the graph by their time coordinate.
                const double fp = k.eval(p[0]);
                const double fq = k.eval(q[0]);
                const double tol = 1e-9;
                if (std::abs(fp - p[1]) > tol * (1.0 + std::abs(fp)) ||
                    std::abs(fq - q[1]) > tol * (1.0 + std::abs(fq))) {
                    throw std::invalid_argument("FunctionGraphSup: point is not on the graph");
                }
                return std::max(std::abs(p[0] - q[0]), std::abs(fp - fq));
            } else {
                const auto a = k.graph->find_vertex(p);
                const auto b = k.graph->find_vertex(q);
                if (!a || !b) throw std::invalid_argument("GraphMetric: point is not a vertex");
                return detail::graph_hop_distance(*k.graph, *a, *b) * std::ldexp(1.0, -k.graph->level());
            }
        },
        space.kind());
}

/// distance(center, p), the quantity compared against r when detecting exits.
inline double ball_exit_radius(const SpaceDescriptor& space, std::span<const double> center,
                               std::span<const double> p) {
    return distance(space, center, p);
}

inline SpaceDescriptor graph_of_function_space(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size()) {
        throw std::invalid_argument("graph_of_function_space: times and values differ in length");
    }
    if (times.size() < 2) {
        throw std::invalid_argument("graph_of_function_space: need at least two samples");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("graph_of_function_space: times must be strictly increasing");
        }
    }
    require_finite(times, "graph_of_function_space");
    require_finite(values, "graph_of_function_space");
    FunctionGraphSup f;
    f.times = std::make_shared<const std::vector<double>>(std::move(times));
    f.values = std::make_shared<const std::vector<double>>(std::move(values));
    return SpaceDescriptor(std::move(f));
}

/// Distance, in coordinate units along the moving axes, from p to the
/// complement of the open ball B(center, r). Negative once p has left.
///
/// Exact for balls in the Euclidean norm and on the arctan line; for the
/// 1-norm and Holder product it is the smallest per-axis gap, which is exact
/// when a single axis moves.
inline double boundary_gap(const SpaceDescriptor& space, std::span<const double> center, double r,
                           std::span<const double> p, std::span<const double> axis_weight) {
    detail::check_dims(space, center, p);
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, EuclideanDomain>) {
                // Normal distance for the 2-norm; along any single axis for the 1-norm.
                return (r - distance(space, center, p)) / k.metric_scale;
            } else if constexpr (std::is_same_v<K, ArctanLine>) {
                const double a = std::atan(center[0]);
                const double hi = a + r >= std::numbers::pi / 2 ? std::numeric_limits<double>::infinity()
                                                                : std::tan(a + r);
                const double lo = a - r <= -std::numbers::pi / 2 ? -std::numeric_limits<double>::infinity()
                                                                 : std::tan(a - r);
                return std::min(hi - p[0], p[0] - lo);
            } else if constexpr (std::is_same_v<K, HolderProduct>) {
                const double d1 = std::abs(p[0] - center[0]);
                const double d2 = std::abs(p[1] - center[1]);
                double gap = std::numeric_limits<double>::infinity();
                if (axis_weight[0] > 0.0) {
                    const double room = r - d2;
                    gap = std::min(gap, room > 0.0 ? std::pow(room, 1.0 / k.alpha) - d1 : -d1);
                }
                if (axis_weight.size() > 1 && axis_weight[1] > 0.0) {
                    gap = std::min(gap, r - std::pow(d1, k.alpha) - d2);
                }
                return gap;
            } else {
                throw std::invalid_argument("boundary_gap: unsupported for " + space.name());
            }
        },
        space.kind());
}

}  // namespace fraclab
