#include "cflat/grid.hpp"

#include "cflat/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cflat {

GridGeometry::GridGeometry(std::vector<double> lo, std::vector<double> hi, std::vector<int> steps)
    : lo_(std::move(lo)), hi_(std::move(hi)), steps_(std::move(steps))
{
    if (steps_.empty() || lo_.size() != steps_.size() || hi_.size() != steps_.size()) {
        throw ArgumentError("GridGeometry: box and steps must have the same nonzero length");
    }
    const int d = dim();
    spacing_.resize(d);
    strides_.resize(d);
    for (int a = 0; a < d; ++a) {
        if (steps_[a] < 5) {
            throw ArgumentError("GridGeometry: axis " + std::to_string(a + 1) + " has " +
                                std::to_string(steps_[a]) + " points, need at least 5");
        }
        if (!(hi_[a] > lo_[a])) {
            throw ArgumentError("GridGeometry: empty interval on axis " + std::to_string(a + 1));
        }
        spacing_[a] = (hi_[a] - lo_[a]) / (steps_[a] - 1);
    }
    std::size_t s = 1;
    for (int a = d - 1; a >= 0; --a) {
        strides_[a] = s;
        s *= static_cast<std::size_t>(steps_[a]);
    }
    size_ = s;
}

GridGeometry GridGeometry::cube(int dim, double lo, double hi, int steps)
{
    if (dim < 1) {
        throw ArgumentError("GridGeometry::cube: dimension must be positive");
    }
    return GridGeometry(std::vector<double>(dim, lo), std::vector<double>(dim, hi), std::vector<int>(dim, steps));
}

double GridGeometry::max_spacing() const { return *std::max_element(spacing_.begin(), spacing_.end()); }

std::vector<int> GridGeometry::multi_index(std::size_t flat) const
{
    std::vector<int> idx(dim());
    for (int a = 0; a < dim(); ++a) {
        idx[a] = static_cast<int>((flat / strides_[a]) % steps_[a]);
    }
    return idx;
}

std::size_t GridGeometry::flat_index(const std::vector<int>& idx) const
{
    std::size_t flat = 0;
    for (int a = 0; a < dim(); ++a) {
        if (idx[a] < 0 || idx[a] >= steps_[a]) {
            throw ArgumentError("GridGeometry: index out of range on axis " + std::to_string(a + 1));
        }
        flat += strides_[a] * static_cast<std::size_t>(idx[a]);
    }
    return flat;
}

int GridGeometry::index_along(std::size_t flat, int axis) const
{
    return static_cast<int>((flat / strides_[axis]) % steps_[axis]);
}

RVec GridGeometry::point(std::size_t flat) const
{
    RVec x(dim());
    for (int a = 0; a < dim(); ++a) {
        x(a) = coordinate(a, index_along(flat, a));
    }
    return x;
}

bool GridGeometry::interior(std::size_t flat) const
{
    for (int a = 0; a < dim(); ++a) {
        const int i = index_along(flat, a);
        if (i == 0 || i == steps_[a] - 1) {
            return false;
        }
    }
    return true;
}

std::vector<std::size_t> GridGeometry::interior_points() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size_; ++k) {
        if (interior(k)) {
            out.push_back(k);
        }
    }
    return out;
}

std::size_t GridGeometry::nearest_origin() const
{
    std::vector<int> idx(dim());
    for (int a = 0; a < dim(); ++a) {
        const double t = std::round(-lo_[a] / spacing_[a]);
        idx[a] = static_cast<int>(std::clamp(t, 0.0, static_cast<double>(steps_[a] - 1)));
    }
    return flat_index(idx);
}

std::size_t GridGeometry::locate(const RVec& x) const
{
    if (x.size() != dim()) {
        throw ArgumentError("GridGeometry::locate: point has wrong dimension");
    }
    std::vector<int> idx(dim());
    for (int a = 0; a < dim(); ++a) {
        const double t = (x(a) - lo_[a]) / spacing_[a];
        const double r = std::round(t);
        if (std::abs(t - r) > 1e-9 || r < 0 || r > steps_[a] - 1) {
            throw ArgumentError("GridGeometry::locate: point is not a grid node");
        }
        idx[a] = static_cast<int>(r);
    }
    return flat_index(idx);
}

std::size_t PointMask::count() const
{
    return static_cast<std::size_t>(
        std::count_if(reasons_.begin(), reasons_.end(), [](const std::string& r) { return !r.empty(); }));
}

void PointMask::merge(const PointMask& other)
{
    if (other.size() != size()) {
        throw ArgumentError("PointMask::merge: size mismatch");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (other.masked(i)) {
            mark(i, other.reason(i));
        }
    }
}

bool PointMask::stencil_masked(std::size_t i, const GridGeometry& g) const
{
    if (masked(i)) {
        return true;
    }
    for (int a = 0; a < g.dim(); ++a) {
        const int k = g.index_along(i, a);
        const std::size_t s = g.stride(a);
        const int last = g.steps(a) - 1;
        // the one-sided boundary stencils reach two nodes inwards
        const int lo = k == last ? -2 : -1;
        const int hi = k == 0 ? 2 : 1;
        for (int off = lo; off <= hi; ++off) {
            const int j = k + off;
            if (off == 0 || j < 0 || j > last) {
                continue;
            }
            if (masked(off > 0 ? i + s * off : i - s * static_cast<std::size_t>(-off))) {
                return true;
            }
        }
    }
    return false;
}

} // namespace cflat
