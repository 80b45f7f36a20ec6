#include "herdplan/table2.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "herdplan/cohesion.hpp"

namespace herdplan {

std::vector<Point2> rectangleEightPoints(double width, double height) {
    const double a = width / 2.0;
    const double b = height / 2.0;
    return {{a, b}, {0, b}, {-a, b}, {-a, 0}, {-a, -b}, {0, -b}, {a, -b}, {a, 0}};
}

std::vector<Point2> circleEightPoints(double r) {
    std::vector<Point2> pts;
    for (int k = 0; k < 8; ++k) {
        const double t = 2.0 * std::numbers::pi * k / 8.0;
        pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return pts;
}

namespace {

constexpr double kShapeDensity = 0.5;

Table2Row measured(std::string label, double beta, const std::vector<Point2>& pts, double publishedRegularity,
                   double publishedZeta) {
    const auto c = cohesiveness(kShapeDensity * beta, beta, pts);
    return {std::move(label), true, c.density, c.regularity, c.zeta, kShapeDensity, publishedRegularity, publishedZeta};
}

Table2Row experiment(std::string label, double density, double regularity, double publishedZeta) {
    return {std::move(label), false, density, regularity, density * regularity * 100.0, density, regularity, publishedZeta};
}

}  // namespace

std::vector<Table2Row> computeTable2() {
    std::vector<Table2Row> rows;
    for (double r : {2.0, 4.0, 8.0}) {
        rows.push_back(measured(fmt::format("circle r={:g}", r), std::numbers::pi * r * r, circleEightPoints(r), 1.0, 50.0));
    }
    for (double s : {4.0, 8.0}) {
        rows.push_back(measured(fmt::format("square {:g}x{:g}", s, s), s * s, rectangleEightPoints(s, s), 0.934, 46.7));
    }
    rows.push_back(measured("rectangle 8x2", 16.0, rectangleEightPoints(8.0, 2.0), 0.682, 34.1));
    rows.push_back(experiment("ours", 0.846, 0.811, 68.5));
    rows.push_back(experiment("mpc", 0.917, 0.685, 62.4));
    rows.push_back(experiment("landmark", 0.698, 0.828, 57.8));
    rows.push_back(experiment("manual", 0.866, 0.809, 70.1));
    return rows;
}

std::string formatTable2(const std::vector<Table2Row>& rows) {
    std::string out;
    out += fmt::format("{:<14} {:>8} {:>10} {:>8} {:>9} {:>8} {:>7} {:>7}\n", "case", "density", "regularity", "ref",
                       "delta", "zeta%", "ref", "delta");
    for (const auto& r : rows) {
        out += fmt::format("{:<14} {:>8.3f} {:>10.4f} {:>8.3f} {:>+9.4f} {:>8.2f} {:>7.1f} {:>+7.2f}\n", r.label,
                           r.density, r.regularity, r.publishedRegularity, r.regularity - r.publishedRegularity, r.zeta,
                           r.publishedZeta, r.zeta - r.publishedZeta);
    }
    return out;
}

}  // namespace herdplan
