#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fraclab/crossing.hpp"
#include "fraclab/dims.hpp"
#include "fraclab/energy.hpp"
#include "fraclab/fit.hpp"
#include "fraclab/ifs.hpp"
#include "fraclab/point.hpp"
#include "fraclab/sg.hpp"

namespace fraclab::io {

using json = nlohmann::ordered_json;

/// Shortest decimal text that round-trips the double.
inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline std::string point_cloud_csv(const PointCloud& cloud) {
    std::ostringstream os;
    os << (cloud.dim() == 1 ? "x\n" : cloud.dim() == 2 ? "x,y\n" : "x,y,z\n");
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud[i];
        for (std::size_t k = 0; k < p.size(); ++k) os << (k ? "," : "") << format_double(p[k]);
        os << '\n';
    }
    return os.str();
}

inline json to_json(const DimensionFit& fit) {
    return json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r2", fit.r2},
                {"window", {fit.window.first, fit.window.second}}};
}

inline json to_json(const ifs::BoxCountResult& r) {
    return json{{"scales", r.scales}, {"counts", r.counts}, {"slope", r.slope}, {"r2", r.r2}};
}

inline std::string boxcount_csv(const ifs::BoxCountResult& r) {
    std::ostringstream os;
    os << "scale,count\n";
    for (std::size_t i = 0; i < r.scales.size(); ++i) os << format_double(r.scales[i]) << ',' << r.counts[i] << '\n';
    return os.str();
}

inline json to_json(const sg::GraphApprox& g) {
    json vertices = json::array();
    for (const auto& v : g.vertices()) vertices.push_back({v[0], v[1]});
    json edges = json::array();
    for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
    const auto bd = g.boundary();
    return json{{"level", g.level()},
                {"vertices", std::move(vertices)},
                {"edges", std::move(edges)},
                {"boundary", {bd[0], bd[1], bd[2]}}};
}

inline std::string spectrum_csv(const energy::SpectrumResult& s) {
    std::ostringstream os;
    os << "k,lambda\n";
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) os << k + 1 << ',' << format_double(s.eigenvalues[k]) << '\n';
    return os.str();
}

inline std::string path_csv(const stoch::PathSample& path) {
    std::ostringstream os;
    os << "t,value\n";
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        os << format_double(path.time(k)) << ',' << format_double(path.values[k]) << '\n';
    }
    return os.str();
}

inline std::string crossing_csv(std::span<const stoch::CrossingTimes> rows) {
    std::ostringstream os;
    os << "T,r,theta_minus,theta_plus,censored\n";
    for (const auto& c : rows) {
        os << format_double(c.anchor) << ',' << format_double(c.radius) << ',' << format_double(c.theta_minus) << ','
           << format_double(c.theta_plus) << ',' << (c.censored() ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::string exit_curve_csv(const dims::ExitCurve& c) {
    std::ostringstream os;
    os << "r,mean,stderr\n";
    for (std::size_t i = 0; i < c.radii.size(); ++i) {
        os << format_double(c.radii[i]) << ',' << format_double(c.means[i]) << ','
           << format_double(c.std_errors[i]) << '\n';
    }
    return os.str();
}

inline json to_json(const dims::WalkDimEstimate& e) {
    return json{{"value", e.value},
                {"kind", dims::to_string(e.kind)},
                {"slope", e.fit.slope},
                {"r2", e.fit.r2},
                {"window", {e.fit.window.first, e.fit.window.second}},
                {"window_points", e.window_points}};
}

}  // namespace fraclab::io
