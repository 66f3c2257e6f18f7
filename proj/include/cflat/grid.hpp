#pragma once

#include "cflat/linalg.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace cflat {

/// Uniform rectangular grid over a box, flattened in row-major order (the
/// last axis varies fastest).
class GridGeometry {
public:
    GridGeometry(std::vector<double> lo, std::vector<double> hi, std::vector<int> steps);

    static GridGeometry cube(int dim, double lo, double hi, int steps);

    int dim() const { return static_cast<int>(steps_.size()); }
    std::size_t size() const { return size_; }
    int steps(int axis) const { return steps_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    /// Largest spacing over all axes.
    double max_spacing() const;

    std::size_t stride(int axis) const { return strides_[axis]; }
    std::vector<int> multi_index(std::size_t flat) const;
    std::size_t flat_index(const std::vector<int>& idx) const;
    int index_along(std::size_t flat, int axis) const;

    RVec point(std::size_t flat) const;
    double coordinate(int axis, int i) const { return lo_[axis] + i * spacing_[axis]; }

    /// True when every axis index lies strictly inside [0, steps-1].
    bool interior(std::size_t flat) const;
    std::vector<std::size_t> interior_points() const;

    /// Grid point closest to the coordinate origin (clamped to the box).
    std::size_t nearest_origin() const;
    /// Flat index of the grid point at x, or throws ArgumentError when x is
    /// further than 1e-9 h from every node.
    std::size_t locate(const RVec& x) const;

    bool operator==(const GridGeometry& other) const
    {
        return lo_ == other.lo_ && hi_ == other.hi_ && steps_ == other.steps_;
    }

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<int> steps_;
    std::vector<double> spacing_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

/// Second-order partial derivative of a sampled field along one axis: central
/// in the interior, one-sided (-3f0 + 4f1 - f2)/(2h) at the two faces.
template <typename T>
T partial(const std::vector<T>& field, const GridGeometry& g, std::size_t flat, int axis)
{
    const int i = g.index_along(flat, axis);
    const int last = g.steps(axis) - 1;
    const std::size_t s = g.stride(axis);
    const double h = g.spacing(axis);
    if (i > 0 && i < last) {
        return T((field[flat + s] - field[flat - s]) / (2.0 * h));
    }
    if (i == 0) {
        return T((-3.0 * field[flat] + 4.0 * field[flat + s] - field[flat + 2 * s]) / (2.0 * h));
    }
    return T((3.0 * field[flat] - 4.0 * field[flat - s] + field[flat - 2 * s]) / (2.0 * h));
}

/// Per-point failure record. An empty reason means the point is usable.
class PointMask {
public:
    PointMask() = default;
    explicit PointMask(std::size_t size) : reasons_(size) {}

    std::size_t size() const { return reasons_.size(); }
    bool masked(std::size_t i) const { return !reasons_[i].empty(); }
    const std::string& reason(std::size_t i) const { return reasons_[i]; }
    void mark(std::size_t i, std::string why)
    {
        if (reasons_[i].empty()) {
            reasons_[i] = why.empty() ? std::string("masked") : std::move(why);
        }
    }
    std::size_t count() const;
    /// Union: a point is masked if masked in either input.
    void merge(const PointMask& other);
    /// True when the point or any stencil neighbour along any axis is masked.
    bool stencil_masked(std::size_t i, const GridGeometry& g) const;

private:
    std::vector<std::string> reasons_;
};

} // namespace cflat
