#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace solab {

constexpr int kMaxDim = 3;

/// Uniform periodic box [-L/2, L/2)^N with M samples per axis.
/// Wavenumbers are k_j = 2*pi*j/L for j in {-M/2, ..., M/2-1}.
struct Grid {
    int dim = 1;
    double extent = 1.0;  // L, same per axis
    int points = 8;       // M, power of two, >= 8

    Grid() = default;
    Grid(int dim_, double extent_, int points_) : dim(dim_), extent(extent_), points(points_) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Grid: dim must be in [1,3]");
        if (extent <= 0.0) throw std::invalid_argument("Grid: extent must be positive");
        if (points < 8 || (points & (points - 1)) != 0)
            throw std::invalid_argument("Grid: points must be a power of two >= 8");
    }

    double spacing() const { return extent / points; }

    std::size_t size() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(points);
        return n;
    }

    /// Coordinate of sample i along one axis: x_i = -L/2 + i*spacing.
    double coord(int i) const { return -0.5 * extent + i * spacing(); }

    /// Wavenumber of FFT bin j along one axis (bins ordered 0..M-1, negative half aliased up).
    double wavenumber(int j) const {
        const int signed_index = (j < points / 2) ? j : j - points;
        return 2.0 * 3.14159265358979323846 * signed_index / extent;
    }

    double max_wavenumber() const { return 2.0 * 3.14159265358979323846 * (points / 2) / extent; }

    /// Decompose a row-major linear index into per-axis indices.
    std::array<int, kMaxDim> unravel(std::size_t p) const {
        std::array<int, kMaxDim> idx{};
        for (int d = dim - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(p % points);
            p /= points;
        }
        return idx;
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && extent == o.extent && points == o.points;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace solab
