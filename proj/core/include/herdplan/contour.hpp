#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "herdplan/geometry.hpp"

namespace herdplan {

/// Boolean raster in world coordinates. Cell (i, j) has its center at
/// origin + resolution * (i + 0.5, j + 0.5); i indexes x, j indexes y.
struct OccupancyGrid {
    double resolution = 0.0;
    Point2 origin;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;  // row-major, j * width + i

    bool at(int i, int j) const {
        return i >= 0 && j >= 0 && i < width && j < height &&
               cells[static_cast<std::size_t>(j) * width + i] != 0;
    }
    Point2 cellCenter(int i, int j) const {
        return {origin.x + resolution * (i + 0.5), origin.y + resolution * (j + 0.5)};
    }
    std::size_t occupiedCount() const;
};

/// Counterclockwise contour samples z_k at uniformly spaced parameters tau_k = 2*pi*k/M.
struct ContourSamples {
    std::vector<Point2> points;

    std::size_t size() const { return points.size(); }
    double tau(std::size_t k) const;
};

/// Two-sided truncated complex Fourier series of a closed contour with period 2*pi.
class FourierDescriptor {
public:
    /// `coefficients` holds c_{-N} .. c_{N}; its size must be odd.
    explicit FourierDescriptor(std::vector<std::complex<double>> coefficients);

    int harmonics() const { return harmonics_; }
    std::complex<double> coefficient(int n) const;
    std::span<const std::complex<double>> coefficients() const { return coefficients_; }

private:
    int harmonics_;
    std::vector<std::complex<double>> coefficients_;
};

/// Defaults for the contour pipeline.
struct ContourParams {
    double dilation = 0.0;       // meters added to the particle radius; <= 0 means use particleRadius
    double resolution = 0.0;     // meters per cell; <= 0 means particleRadius / 4
    std::size_t traceSamples = 256;
    int harmonics = 5;
    std::size_t reconstructSamples = 64;
};

/// Marks every cell whose center lies within particleRadius + dilation of a particle center.
/// Throws std::invalid_argument on an empty particle list or a resolution coarser than radius / 2.
OccupancyGrid rasterize(std::span<const Point2> particles, double particleRadius, double dilation,
                        double resolution);

/// Outer boundary of the largest 4-connected occupied component, as a closed
/// counterclockwise polyline through cell-edge midpoints (marching squares).
ClosedPolyline traceBoundaryPolyline(const OccupancyGrid& grid);

/// Resamples a closed polyline to `count` points uniformly spaced in arc length,
/// starting at its first vertex.
ContourSamples resampleArcLength(const ClosedPolyline& poly, std::size_t count);

/// traceBoundaryPolyline followed by arc-length resampling.
ContourSamples traceBoundary(const OccupancyGrid& grid, std::size_t samples = 256);

/// c_n = (1/M) sum_k z_k exp(-i n tau_k) for n in [-N, N].
FourierDescriptor fitFourier(const ContourSamples& samples, int harmonics);

/// z(tau_k) = sum_n c_n exp(i n tau_k) at tau_k = 2*pi*k/M.
ContourSamples reconstruct(const FourierDescriptor& desc, std::size_t count);

}  // namespace herdplan
