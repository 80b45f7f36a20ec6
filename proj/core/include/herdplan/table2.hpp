#pragma once

#include <string>
#include <vector>

#include "herdplan/geometry.hpp"

namespace herdplan {

/// One column of the cohesion comparison table: measured values next to the printed ones.
struct Table2Row {
    std::string label;
    bool regularShape = true;  // false for the experimental columns, which are pure arithmetic
    double density = 0.0;
    double regularity = 0.0;
    double zeta = 0.0;
    double publishedDensity = 0.0;
    double publishedRegularity = 0.0;
    double publishedZeta = 0.0;
};

/// Corners and edge midpoints of an axis-aligned w x h rectangle centered at the origin.
std::vector<Point2> rectangleEightPoints(double width, double height);
/// Eight points evenly spaced on a circle of radius r about the origin.
std::vector<Point2> circleEightPoints(double r);

/// Circle r = 2/4/8, square 4x4/8x8 and rectangle 8x2 measured at density 0.5 with
/// eight-point contours, then the four experimental columns recomputed from their
/// printed density and regularity.
std::vector<Table2Row> computeTable2();

/// Fixed-width text table with measured, printed and delta columns.
std::string formatTable2(const std::vector<Table2Row>& rows);

}  // namespace herdplan
