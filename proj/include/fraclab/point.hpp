#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

using Point = std::vector<double>;

inline void require_finite(std::span<const double> p, const char* what) {
    for (double v : p) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
        }
    }
}

/// Flat storage for many points of one dimension.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::size_t dim) : dim_(dim) {
        if (dim == 0) {
            throw std::invalid_argument("PointCloud: dimension must be positive");
        }
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const { return coords_.empty(); }

    void reserve(std::size_t n) { coords_.reserve(n * dim_); }

    void push_back(std::span<const double> p) {
        if (p.size() != dim_) {
            throw std::invalid_argument("PointCloud: point has dimension " + std::to_string(p.size()) +
                                        ", expected " + std::to_string(dim_));
        }
        coords_.insert(coords_.end(), p.begin(), p.end());
    }

    std::span<const double> operator[](std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

    void append(const PointCloud& other) {
        if (other.empty()) return;
        if (other.dim_ != dim_) {
            throw std::invalid_argument("PointCloud: dimension mismatch on append");
        }
        coords_.insert(coords_.end(), other.coords_.begin(), other.coords_.end());
    }

    const std::vector<double>& raw() const { return coords_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

}  // namespace fraclab
