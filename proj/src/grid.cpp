#include "ascal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ascal/errors.hpp"

namespace ascal {

namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

template <typename T>
std::array<T, kMaxDims> broadcast(const std::vector<T>& in, int n_dims, const char* what) {
    if (in.size() != 1 && in.size() != static_cast<std::size_t>(n_dims))
        throw ValidationError(std::string(what) + ": expected 1 or " + std::to_string(n_dims) +
                              " entries, got " + std::to_string(in.size()));
    std::array<T, kMaxDims> out{};
    for (int a = 0; a < n_dims; ++a) out[a] = in.size() == 1 ? in[0] : in[a];
    return out;
}

}  // namespace

double Grid::min_side() const {
    double m = side[0];
    for (int a = 1; a < n_dims; ++a) m = std::min(m, side[a]);
    return m;
}

double Grid::wavenumber(int axis, std::size_t m) const {
    return 2.0 * std::numbers::pi * static_cast<double>(signed_mode(axis, m)) / side[axis];
}

Grid make_grid(int n_dims, const std::vector<std::size_t>& points,
               const std::vector<double>& side_length, const std::vector<double>& origin) {
    if (n_dims != 2 && n_dims != 3)
        throw ValidationError("n_dims must be 2 or 3, got " + std::to_string(n_dims));
    if (points.empty()) throw ValidationError("points must not be empty");
    if (side_length.empty()) throw ValidationError("side_length must not be empty");

    Grid g;
    g.n_dims = n_dims;
    g.points = broadcast(points, n_dims, "points");
    g.side = broadcast(side_length, n_dims, "side_length");
    for (int a = 0; a < n_dims; ++a) {
        if (!power_of_two(g.points[a]) || g.points[a] < 8)
            throw ValidationError("points[" + std::to_string(a) +
                                  "] must be a power of two >= 8, got " + std::to_string(g.points[a]));
        if (!(g.side[a] > 0.0) || !std::isfinite(g.side[a]))
            throw ValidationError("side_length[" + std::to_string(a) + "] must be positive, got " +
                                  std::to_string(g.side[a]));
    }
    if (origin.empty()) {
        for (int a = 0; a < n_dims; ++a) g.origin[a] = 0.5 * g.side[a];
    } else {
        g.origin = broadcast(origin, n_dims, "origin");
        for (int a = 0; a < n_dims; ++a)
            if (!std::isfinite(g.origin[a]))
                throw ValidationError("origin[" + std::to_string(a) + "] must be finite");
    }
    return g;
}

std::size_t reflected_index(const Grid& g, std::size_t flat) {
    std::array<std::size_t, kMaxDims> idx{0, 0, 0};
    if (g.n_dims == 2) {
        idx[1] = flat % g.points[1];
        idx[0] = flat / g.points[1];
    } else {
        idx[2] = flat % g.points[2];
        const std::size_t rest = flat / g.points[2];
        idx[1] = rest % g.points[1];
        idx[0] = rest / g.points[1];
    }
    for (int a = 0; a < g.n_dims; ++a) idx[a] = (g.points[a] - idx[a]) % g.points[a];
    return flat_index(g, idx[0], idx[1], idx[2]);
}

double max_wavenumber(const Grid& g, bool dealiased) {
    double sum_sq = 0.0;
    for (int a = 0; a < g.n_dims; ++a) {
        const long limit = dealiased ? dealias_limit(g, a) : static_cast<long>(g.points[a] / 2);
        const double k = 2.0 * std::numbers::pi * static_cast<double>(limit) / g.side[a];
        sum_sq += k * k;
    }
    return std::sqrt(sum_sq);
}

}  // namespace ascal
