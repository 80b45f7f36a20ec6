#pragma once

#include <span>

#include "herdplan/contour.hpp"
#include "herdplan/geometry.hpp"

namespace herdplan {

/// Low/high cohesion split used by target selection, in percent.
inline constexpr double kDefaultZetaThreshold = 50.0;

struct CohesionReport {
    double alpha = 0.0;       // area covered by particles, m^2
    double beta = 0.0;        // area enclosed by the group contour, m^2
    double regularity = 0.0;  // equal-area circle radius over mean contour radius
    double density = 0.0;     // alpha / beta
    double zeta = 0.0;        // regularity * density * 100
};

/// count * pi * r^2. Throws std::invalid_argument when count is zero.
double particleArea(std::size_t count, double particleRadius);

/// |shoelace area| of a reconstructed contour. Throws std::invalid_argument below 1e-12 m^2.
double groupArea(const ContourSamples& contour);

/// sqrt(beta / pi) divided by the mean distance of the contour points from their vertex mean.
///
/// The numerator uses the group area rather than the particle area: a uniformly
/// sampled circle then scores exactly 1 regardless of how densely it is filled.
double regularity(std::span<const Point2> contourPoints, double beta);

CohesionReport cohesiveness(double alpha, double beta, std::span<const Point2> contourPoints);

}  // namespace herdplan
