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
#include <unordered_map>
#include <utility>
#include <vector>

#include "fraclab/point.hpp"

namespace fraclab::sg {

inline constexpr int kMaxLevel = 12;

/// Corners of the level-0 triangle: the fixed points of the three gasket maps.
inline std::array<std::array<double, 2>, 3> corners() {
    return {{{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}};
}

/// Gasket similitude i (1-based), x -> (x + q_i) / 2 with q_i the i-th corner.
inline std::array<double, 2> apply_map(int i, std::array<double, 2> p) {
    if (i < 1 || i > 3) {
        throw std::invalid_argument("sg::apply_map: letter must be 1, 2 or 3");
    }
    const auto q = corners()[static_cast<std::size_t>(i - 1)];
    return {(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0};
}

/// Finite word over {1,2,3}; the empty word is the identity.
class Word {
public:
    Word() = default;
    Word(std::initializer_list<int> letters) {
        for (int l : letters) push_back(l);
    }
    explicit Word(std::span<const int> letters) {
        for (int l : letters) push_back(l);
    }

    void push_back(int letter) {
        if (letter < 1 || letter > 3) {
            throw std::invalid_argument("sg::Word: letter " + std::to_string(letter) + " not in {1,2,3}");
        }
        letters_.push_back(static_cast<std::uint8_t>(letter));
    }

    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    int operator[](std::size_t i) const { return letters_[i]; }

    Word concat(const Word& tail) const {
        Word w = *this;
        w.letters_.insert(w.letters_.end(), tail.letters_.begin(), tail.letters_.end());
        return w;
    }

    bool operator==(const Word&) const = default;

private:
    std::vector<std::uint8_t> letters_;
};

/// S_w = S_{w_1} o ... o S_{w_l}; the last letter acts first.
inline std::array<double, 2> apply_word(const Word& w, std::array<double, 2> p) {
    for (std::size_t k = w.size(); k-- > 0;) {
        p = apply_map(w[k], p);
    }
    return p;
}

inline Point apply_word(const Word& w, std::span<const double> p) {
    if (p.size() != 2) {
        throw std::invalid_argument("sg::apply_word: point must be planar");
    }
    const auto q = apply_word(w, std::array<double, 2>{p[0], p[1]});
    return {q[0], q[1]};
}

/// Images of the three corners under S_w.
inline std::array<std::array<double, 2>, 3> cell_vertices(const Word& w) {
    auto c = corners();
    for (auto& p : c) p = apply_word(w, p);
    return c;
}

inline std::size_t vertex_count(int level) {
    std::size_t p = 1;
    for (int i = 0; i <= level; ++i) p *= 3;
    return (p + 3) / 2;
}

inline std::size_t edge_count(int level) {
    std::size_t p = 1;
    for (int i = 0; i <= level; ++i) p *= 3;
    return p;
}

/// Level-n pre-fractal graph G_n.
///
/// Vertex indices are nested: the first |V_k| vertices of G_n are exactly the
/// vertices of G_k, in the same order, for every k <= n. Indices 0, 1, 2 are
/// the corners. Cells are stored in lexicographic word order.
class GraphApprox {
public:
    int level() const { return level_; }
    std::size_t size() const { return vertices_.size(); }
    const std::vector<std::array<double, 2>>& vertices() const { return vertices_; }
    const std::array<double, 2>& vertex(std::size_t i) const { return vertices_.at(i); }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
    const std::array<std::size_t, 3>& boundary() const { return boundary_; }
    const std::vector<std::array<std::size_t, 3>>& cells() const { return cells_; }
    const std::vector<Word>& cell_words() const { return words_; }
    const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
    std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

    bool is_boundary(std::size_t v) const { return v < 3; }

    /// Index of the vertex at p, if p is a vertex to within 1e-12.
    std::optional<std::size_t> find_vertex(std::span<const double> p) const {
        if (p.size() != 2) return std::nullopt;
        const auto it = lookup_.find(snap_key(p[0], p[1]));
        if (it == lookup_.end()) return std::nullopt;
        const auto& v = vertices_[it->second];
        if (std::abs(v[0] - p[0]) > 1e-12 || std::abs(v[1] - p[1]) > 1e-12) return std::nullopt;
        return it->second;
    }

    friend GraphApprox build_graph(int level);

private:
    // Vertex coordinates live on the lattice (i / 2^(n+2), j * sqrt(3) / 2^(n+2)).
    std::uint64_t snap_key(double x, double y) const {
        const double s = std::ldexp(1.0, level_ + 2);
        const auto i = static_cast<std::int64_t>(std::llround(x * s));
        const auto j = static_cast<std::int64_t>(std::llround(y * s / std::sqrt(3.0)));
        return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j & 0xffffffff);
    }

    int level_ = 0;
    std::vector<std::array<double, 2>> vertices_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::array<std::size_t, 3> boundary_{0, 1, 2};
    std::vector<std::array<std::size_t, 3>> cells_;
    std::vector<Word> words_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

inline GraphApprox build_graph(int level) {
    if (level < 0 || level > kMaxLevel) {
        throw std::invalid_argument("sg::build_graph: level " + std::to_string(level) + " outside [0, " +
                                    std::to_string(kMaxLevel) + "]");
    }
    GraphApprox g;
    g.level_ = level;
    const auto c = corners();
    g.vertices_.assign(c.begin(), c.end());
    g.cells_ = {{0, 1, 2}};
    g.words_ = {Word{}};

    auto midpoint = [&](std::size_t a, std::size_t b) {
        const auto& p = g.vertices_[a];
        const auto& q = g.vertices_[b];
        g.vertices_.push_back({(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0});
        return g.vertices_.size() - 1;
    };

    for (int k = 0; k < level; ++k) {
        std::vector<std::array<std::size_t, 3>> next_cells;
        std::vector<Word> next_words;
        next_cells.reserve(g.cells_.size() * 3);
        next_words.reserve(g.cells_.size() * 3);
        for (std::size_t ci = 0; ci < g.cells_.size(); ++ci) {
            const auto [a, b, cc] = g.cells_[ci];
            // Midpoints named by the corner they face.
            const std::size_t ma = midpoint(b, cc);
            const std::size_t mb = midpoint(a, cc);
            const std::size_t mc = midpoint(a, b);
            next_cells.push_back({a, mc, mb});
            next_cells.push_back({mc, b, ma});
            next_cells.push_back({mb, ma, cc});
            for (int letter = 1; letter <= 3; ++letter) {
                next_words.push_back(g.words_[ci].concat(Word{letter}));
            }
        }
        g.cells_ = std::move(next_cells);
        g.words_ = std::move(next_words);
    }

    g.adjacency_.assign(g.vertices_.size(), {});
    g.edges_.reserve(g.cells_.size() * 3);
    for (const auto& [a, b, cc] : g.cells_) {
        for (auto [u, v] : {std::pair{a, b}, std::pair{b, cc}, std::pair{a, cc}}) {
            g.edges_.emplace_back(std::min(u, v), std::max(u, v));
            g.adjacency_[u].push_back(v);
            g.adjacency_[v].push_back(u);
        }
    }

    g.lookup_.reserve(g.vertices_.size());
    for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
        const auto [it, inserted] = g.lookup_.emplace(g.snap_key(g.vertices_[i][0], g.vertices_[i][1]), i);
        if (!inserted) {
            throw std::logic_error("sg::build_graph: duplicate vertex at index " + std::to_string(i));
        }
    }
    return g;
}

}  // namespace fraclab::sg
