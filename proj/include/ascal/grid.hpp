#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace ascal {

inline constexpr int kMaxDims = 3;

// Uniform periodic grid on an n-dimensional box. Index 0 along axis `a` sits
// at coordinate -origin[a]; with the default origin = side/2 the box is
// [-L/2, L/2) and the coordinate origin lies on the grid point N/2, so the
// reflection x -> -x is exactly the index map m -> (N - m) mod N.
struct Grid {
    int n_dims = 2;
    std::array<std::size_t, kMaxDims> points{1, 1, 1};
    std::array<double, kMaxDims> side{0.0, 0.0, 0.0};
    std::array<double, kMaxDims> origin{0.0, 0.0, 0.0};

    std::size_t total_points() const {
        std::size_t n = 1;
        for (int a = 0; a < n_dims; ++a) n *= points[a];
        return n;
    }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < n_dims; ++a) v *= side[a];
        return v;
    }
    double cell_volume() const { return volume() / static_cast<double>(total_points()); }
    double spacing(int axis) const { return side[axis] / static_cast<double>(points[axis]); }
    double min_side() const;

    // Signed alias of the raw transform index: m for m <= N/2, else m - N.
    long signed_mode(int axis, std::size_t m) const {
        const long n = static_cast<long>(points[axis]);
        const long s = static_cast<long>(m);
        return s <= n / 2 ? s : s - n;
    }
    double wavenumber(int axis, std::size_t m) const;
    double coordinate(int axis, std::size_t m) const {
        return static_cast<double>(m) * spacing(axis) - origin[axis];
    }

    bool operator==(const Grid&) const = default;
};

// Validates and builds a grid. `points` and `side_length` may hold one entry
// (applied to every axis) or n_dims entries. Every axis size must be a power
// of two and at least 8. Empty `origin` selects the box center side/2.
Grid make_grid(int n_dims, const std::vector<std::size_t>& points,
               const std::vector<double>& side_length,
               const std::vector<double>& origin = {});

// Row-major flat index; i2 is ignored for 2-D grids.
inline std::size_t flat_index(const Grid& g, std::size_t i0, std::size_t i1, std::size_t i2 = 0) {
    if (g.n_dims == 2) return i0 * g.points[1] + i1;
    return (i0 * g.points[1] + i1) * g.points[2] + i2;
}

// Flat index of the point reflected through the coordinate origin,
// m -> (N - m) mod N on every axis.
std::size_t reflected_index(const Grid& g, std::size_t flat);

// Largest wavenumber magnitude present on the grid, restricted to the
// de-aliased band (|mode| <= N/3 per axis) when `dealiased` is set.
double max_wavenumber(const Grid& g, bool dealiased);

// Per-axis retained-band limit of the 2/3 rule: modes with |signed index|
// above 2/3 of the Nyquist index N/2 are discarded.
inline long dealias_limit(const Grid& g, int axis) {
    return static_cast<long>(g.points[axis] / 3);
}

}  // namespace ascal
