#include "herdplan/cohesion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace herdplan {

double particleArea(std::size_t count, double particleRadius) {
    if (count == 0) {
        throw std::invalid_argument("particleArea: zero particles");
    }
    return static_cast<double>(count) * std::numbers::pi * particleRadius * particleRadius;
}

double groupArea(const ContourSamples& contour) {
    const double area = std::abs(polygonArea(contour.points));
    if (area < 1e-12) {
        throw std::invalid_argument("groupArea: degenerate contour");
    }
    return area;
}

double regularity(std::span<const Point2> contourPoints, double beta) {
    if (contourPoints.size() < 3) {
        throw std::invalid_argument("regularity: need at least 3 contour points");
    }
    if (!(beta > 0.0)) {
        throw std::invalid_argument("regularity: beta must be positive");
    }
    const double meanRadius = meanRadialDistance(contourPoints, vertexMean(contourPoints));
    if (meanRadius <= kGeomTol) {
        throw std::invalid_argument("regularity: zero mean radial distance");
    }
    return std::sqrt(beta / std::numbers::pi) / meanRadius;
}

CohesionReport cohesiveness(double alpha, double beta, std::span<const Point2> contourPoints) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("cohesiveness: alpha and beta must be positive");
    }
    CohesionReport r;
    r.alpha = alpha;
    r.beta = beta;
    r.density = alpha / beta;
    r.regularity = regularity(contourPoints, beta);
    r.zeta = r.regularity * r.density * 100.0;
    return r;
}

}  // namespace herdplan
