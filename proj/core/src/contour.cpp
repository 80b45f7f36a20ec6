#include "herdplan/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace herdplan {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::size_t OccupancyGrid::occupiedCount() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](auto c) { return c != 0; }));
}

double ContourSamples::tau(std::size_t k) const {
    return kTwoPi * static_cast<double>(k) / static_cast<double>(points.size());
}

FourierDescriptor::FourierDescriptor(std::vector<std::complex<double>> coefficients)
    : harmonics_(static_cast<int>(coefficients.size() / 2)), coefficients_(std::move(coefficients)) {
    if (coefficients_.size() % 2 != 1) {
        throw std::invalid_argument("FourierDescriptor needs 2N+1 coefficients");
    }
}

std::complex<double> FourierDescriptor::coefficient(int n) const {
    if (n < -harmonics_ || n > harmonics_) {
        return {0.0, 0.0};
    }
    return coefficients_[static_cast<std::size_t>(n + harmonics_)];
}

OccupancyGrid rasterize(std::span<const Point2> particles, double particleRadius, double dilation,
                        double resolution) {
    if (particles.empty()) {
        throw std::invalid_argument("rasterize: no particles");
    }
    if (!(particleRadius > 0.0) || !(resolution > 0.0) || resolution > particleRadius / 2.0 + kGeomTol) {
        throw std::invalid_argument("rasterize: resolution must be positive and at most particleRadius / 2");
    }
    const double reach = particleRadius + std::max(0.0, dilation);
    double xMin = particles[0].x, xMax = particles[0].x;
    double yMin = particles[0].y, yMax = particles[0].y;
    for (const auto& p : particles) {
        xMin = std::min(xMin, p.x);
        xMax = std::max(xMax, p.x);
        yMin = std::min(yMin, p.y);
        yMax = std::max(yMax, p.y);
    }
    const double pad = reach + 2.0 * resolution;
    OccupancyGrid grid;
    grid.resolution = resolution;
    grid.origin = {xMin - pad, yMin - pad};
    grid.width = static_cast<int>(std::ceil((xMax - xMin + 2.0 * pad) / resolution));
    grid.height = static_cast<int>(std::ceil((yMax - yMin + 2.0 * pad) / resolution));
    grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);

    const double reach2 = reach * reach;
    for (const auto& p : particles) {
        const int i0 = std::max(0, static_cast<int>(std::floor((p.x - reach - grid.origin.x) / resolution)));
        const int i1 = std::min(grid.width - 1, static_cast<int>(std::ceil((p.x + reach - grid.origin.x) / resolution)));
        const int j0 = std::max(0, static_cast<int>(std::floor((p.y - reach - grid.origin.y) / resolution)));
        const int j1 = std::min(grid.height - 1, static_cast<int>(std::ceil((p.y + reach - grid.origin.y) / resolution)));
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const Point2 c = grid.cellCenter(i, j);
                const double dx = c.x - p.x;
                const double dy = c.y - p.y;
                if (dx * dx + dy * dy <= reach2) {
                    grid.cells[static_cast<std::size_t>(j) * grid.width + i] = 1;
                }
            }
        }
    }
    return grid;
}

namespace {

/// Labels 4-connected components and returns a mask holding only the largest one.
std::vector<std::uint8_t> largestComponentMask(const OccupancyGrid& grid) {
    const int w = grid.width;
    const int h = grid.height;
    std::vector<int> label(grid.cells.size(), -1);
    std::vector<std::size_t> sizes;
    std::vector<int> stack;
    for (int start = 0; start < w * h; ++start) {
        if (grid.cells[start] == 0 || label[start] >= 0) {
            continue;
        }
        const int id = static_cast<int>(sizes.size());
        std::size_t count = 0;
        stack.push_back(start);
        label[start] = id;
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            ++count;
            const int ci = cur % w;
            const int cj = cur / w;
            const std::array<std::array<int, 2>, 4> nbrs{{{ci - 1, cj}, {ci + 1, cj}, {ci, cj - 1}, {ci, cj + 1}}};
            for (const auto& [ni, nj] : nbrs) {
                if (ni < 0 || nj < 0 || ni >= w || nj >= h) continue;
                const int n = nj * w + ni;
                if (grid.cells[n] != 0 && label[n] < 0) {
                    label[n] = id;
                    stack.push_back(n);
                }
            }
        }
        sizes.push_back(count);
    }
    if (sizes.empty()) {
        throw std::invalid_argument("traceBoundary: grid has no occupied cells");
    }
    const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<std::uint8_t> mask(grid.cells.size(), 0);
    for (std::size_t k = 0; k < label.size(); ++k) {
        mask[k] = label[k] == best ? 1 : 0;
    }
    return mask;
}

}  // namespace

ClosedPolyline traceBoundaryPolyline(const OccupancyGrid& grid) {
    const auto mask = largestComponentMask(grid);
    const int w = grid.width;
    const int h = grid.height;
    auto inside = [&](int i, int j) {
        return i >= 0 && j >= 0 && i < w && j < h && mask[static_cast<std::size_t>(j) * w + i] != 0;
    };
    // Edge-midpoint key between lattice of cell centers; type 0 = horizontal edge (i,j)-(i+1,j),
    // type 1 = vertical edge (i,j)-(i,j+1). Indices shifted by one to cover the zero border.
    auto key = [&](int i, int j, int type) -> long long {
        return ((static_cast<long long>(i + 1) * (h + 2)) + (j + 1)) * 2 + type;
    };
    auto midpoint = [&](long long k) {
        const int type = static_cast<int>(k % 2);
        const long long cell = k / 2;
        const int i = static_cast<int>(cell / (h + 2)) - 1;
        const int j = static_cast<int>(cell % (h + 2)) - 1;
        const Point2 c = grid.cellCenter(i, j);
        const double half = 0.5 * grid.resolution;
        return type == 0 ? Point2{c.x + half, c.y} : Point2{c.x, c.y + half};
    };

    std::unordered_map<long long, long long> next;
    for (int j = -1; j < h; ++j) {
        for (int i = -1; i < w; ++i) {
            // Corners in counterclockwise order: bl, br, tr, tl.
            const std::array<bool, 4> in{inside(i, j), inside(i + 1, j), inside(i + 1, j + 1), inside(i, j + 1)};
            // Edge k joins corner k to corner k+1.
            const std::array<long long, 4> edge{key(i, j, 0), key(i + 1, j, 1), key(i, j + 1, 0), key(i, j, 1)};
            for (int k = 0; k < 4; ++k) {
                if (!in[k] || in[(k + 1) % 4]) {
                    continue;
                }
                // Exit edge k; walk back over the contiguous run of inside corners to find the entry edge.
                int m = (k + 3) % 4;
                while (in[m]) {
                    m = (m + 3) % 4;
                }
                next[edge[k]] = edge[m];
            }
        }
    }

    std::unordered_map<long long, bool> visited;
    std::vector<long long> starts;
    starts.reserve(next.size());
    for (const auto& kv : next) {
        starts.push_back(kv.first);
    }
    std::sort(starts.begin(), starts.end());

    std::vector<Point2> best;
    double bestArea = 0.0;
    for (long long s : starts) {
        if (visited[s]) {
            continue;
        }
        std::vector<Point2> loop;
        long long cur = s;
        while (!visited[cur]) {
            visited[cur] = true;
            loop.push_back(midpoint(cur));
            const auto it = next.find(cur);
            if (it == next.end()) {
                break;
            }
            cur = it->second;
        }
        const double area = polygonArea(loop);
        if (area > bestArea) {
            bestArea = area;
            best = std::move(loop);
        }
    }
    if (best.size() < 3) {
        throw std::invalid_argument("traceBoundary: no closed outer boundary");
    }
    return ClosedPolyline(std::move(best));
}

ContourSamples resampleArcLength(const ClosedPolyline& poly, std::size_t count) {
    const auto v = poly.vertices();
    const std::size_t n = v.size();
    std::vector<double> cumulative(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        cumulative[i + 1] = cumulative[i] + distance(v[i], v[(i + 1) % n]);
    }
    const double total = cumulative[n];
    ContourSamples out;
    out.points.reserve(count);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(count);
        while (seg + 1 < n && cumulative[seg + 1] <= s) {
            ++seg;
        }
        const double len = cumulative[seg + 1] - cumulative[seg];
        const double t = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
        out.points.push_back(v[seg] + (v[(seg + 1) % n] - v[seg]) * t);
    }
    return out;
}

ContourSamples traceBoundary(const OccupancyGrid& grid, std::size_t samples) {
    return resampleArcLength(traceBoundaryPolyline(grid), samples);
}

FourierDescriptor fitFourier(const ContourSamples& samples, int harmonics) {
    if (harmonics < 0) {
        throw std::invalid_argument("fitFourier: negative harmonic count");
    }
    const std::size_t m = samples.size();
    if (m < static_cast<std::size_t>(2 * harmonics + 1)) {
        throw std::invalid_argument("fitFourier: need at least 2N+1 samples");
    }
    std::vector<std::complex<double>> coeffs;
    coeffs.reserve(static_cast<std::size_t>(2 * harmonics + 1));
    for (int n = -harmonics; n <= harmonics; ++n) {
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t k = 0; k < m; ++k) {
            const std::complex<double> z{samples.points[k].x, samples.points[k].y};
            sum += z * std::polar(1.0, -static_cast<double>(n) * samples.tau(k));
        }
        coeffs.push_back(sum / static_cast<double>(m));
    }
    return FourierDescriptor(std::move(coeffs));
}

ContourSamples reconstruct(const FourierDescriptor& desc, std::size_t count) {
    ContourSamples out;
    out.points.reserve(count);
    const int big = desc.harmonics();
    for (std::size_t k = 0; k < count; ++k) {
        const double tau = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
        std::complex<double> z{0.0, 0.0};
        for (int n = -big; n <= big; ++n) {
            z += desc.coefficient(n) * std::polar(1.0, static_cast<double>(n) * tau);
        }
        out.points.push_back({z.real(), z.imag()});
    }
    return out;
}

}  // namespace herdplan
