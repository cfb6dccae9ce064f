#ifndef DISTCELL_GRID_HPP
#define DISTCELL_GRID_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace distcell {

// Axis order is (z,)y,x throughout. 2D grids are stored as a single
// z-slice, so per-axis parameters (sigma, shifts, extents) are always
// physical {z,y,x} arrays with the z component inert for 2D data.
class Shape {
public:
    Shape() = default;
    Shape(int ny, int nx) : ndim_(2), nz_(1), ny_(ny), nx_(nx) { validate(); }
    Shape(int nz, int ny, int nx) : ndim_(3), nz_(nz), ny_(ny), nx_(nx) { validate(); }

    int ndim() const { return ndim_; }
    int nz() const { return nz_; }
    int ny() const { return ny_; }
    int nx() const { return nx_; }

    // physical extent, axis 0=z, 1=y, 2=x
    int extent(int axis) const { return axis == 0 ? nz_ : (axis == 1 ? ny_ : nx_); }

    std::int64_t size() const {
        return static_cast<std::int64_t>(nz_) * ny_ * nx_;
    }

    std::int64_t index(int z, int y, int x) const {
        return (static_cast<std::int64_t>(z) * ny_ + y) * nx_ + x;
    }

    bool contains(int z, int y, int x) const {
        return z >= 0 && z < nz_ && y >= 0 && y < ny_ && x >= 0 && x < nx_;
    }

    bool operator==(const Shape& o) const {
        return ndim_ == o.ndim_ && nz_ == o.nz_ && ny_ == o.ny_ && nx_ == o.nx_;
    }
    bool operator!=(const Shape& o) const { return !(*this == o); }

private:
    void validate() const {
        if (nz_ < 1 || ny_ < 1 || nx_ < 1)
            throw std::invalid_argument("Shape: extents must be >= 1");
    }

    int ndim_ = 2;
    int nz_ = 1, ny_ = 0, nx_ = 0;
};

template <typename T>
class Grid {
public:
    Grid() = default;
    explicit Grid(const Shape& shape, T fill = T{})
        : shape_(shape), data_(static_cast<std::size_t>(shape.size()), fill) {}

    const Shape& shape() const { return shape_; }
    std::int64_t size() const { return shape_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    T& at(int z, int y, int x) { return data_[static_cast<std::size_t>(shape_.index(z, y, x))]; }
    const T& at(int z, int y, int x) const {
        return data_[static_cast<std::size_t>(shape_.index(z, y, x))];
    }
    T& at(int y, int x) { return at(0, y, x); }
    const T& at(int y, int x) const { return at(0, y, x); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    bool operator==(const Grid& o) const { return shape_ == o.shape_ && data_ == o.data_; }

private:
    Shape shape_{};
    std::vector<T> data_;
};

using Mask = Grid<std::uint8_t>;      // binary {0,1}
using DistanceMap = Grid<float>;      // values in [0,1]

// Instance-ID image. 0 is background; IDs need not be contiguous.
struct LabelImage {
    Grid<std::int32_t> grid;

    LabelImage() = default;
    explicit LabelImage(const Shape& shape) : grid(shape, 0) {}
    explicit LabelImage(Grid<std::int32_t> g) : grid(std::move(g)) {}

    const Shape& shape() const { return grid.shape(); }

    // distinct nonzero IDs, ascending
    std::vector<std::int32_t> labels() const;
};

struct ObjectStats {
    std::int32_t id = 0;
    std::int64_t size = 0;                      // pixel/voxel count
    std::array<double, 3> centroid{};           // (z,y,x)
    std::array<double, 3> median{};             // per-axis lower median
    std::array<int, 3> bbox_lo{};               // inclusive
    std::array<int, 3> bbox_hi{};               // inclusive
};

} // namespace distcell

#endif
