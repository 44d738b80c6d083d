#ifndef SBL_GRID_HPP
#define SBL_GRID_HPP

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbl {

/// Uniform periodic lattice on the side-2*pi torus: n points per axis,
/// spacing h = 2*pi/n, vertices indexed lexicographically with axis 0
/// fastest. Every vertex has exactly 2m neighbors.
struct PeriodicGrid {
    int dimension = 0;
    int points_per_axis = 0;
    double spacing = 0.0;
    std::size_t vertex_count = 0;

    std::array<int, 4> coords(std::size_t index) const {
        std::array<int, 4> k{0, 0, 0, 0};
        for (int j = 0; j < dimension; ++j) {
            k[j] = static_cast<int>(index % points_per_axis);
            index /= points_per_axis;
        }
        return k;
    }

    std::size_t index_of(const std::array<int, 4>& k) const {
        std::size_t idx = 0;
        for (int j = dimension - 1; j >= 0; --j) {
            int c = k[j] % points_per_axis;
            if (c < 0) c += points_per_axis;
            idx = idx * points_per_axis + static_cast<std::size_t>(c);
        }
        return idx;
    }

    /// Neighbor one step along `axis`; direction +1 or -1, periodic wrap.
    std::size_t neighbor(std::size_t index, int axis, int direction) const {
        auto k = coords(index);
        k[axis] += direction;
        return index_of(k);
    }

    /// Coordinate of lattice position c on any axis, in [0, 2*pi).
    double coordinate(int c) const { return spacing * c; }
};

inline PeriodicGrid make_flat_torus_grid(int m, int n) {
    if (m < 2 || m > 4)
        throw std::invalid_argument("make_flat_torus_grid: dimension must be in [2, 4], got " +
                                    std::to_string(m));
    if (n < 8)
        throw std::invalid_argument("make_flat_torus_grid: points per axis must be >= 8, got " +
                                    std::to_string(n));
    std::size_t count = 1;
    for (int j = 0; j < m; ++j) count *= static_cast<std::size_t>(n);
    if (count > 2000000)
        throw std::invalid_argument("make_flat_torus_grid: n^m = " + std::to_string(count) +
                                    " exceeds the 2000000-vertex guard");
    PeriodicGrid grid;
    grid.dimension = m;
    grid.points_per_axis = n;
    grid.spacing = 2.0 * 3.141592653589793238462643383279502884 / n;
    grid.vertex_count = count;
    return grid;
}

}  // namespace sbl

#endif
