#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "herdplan/geometry.hpp"

using namespace herdplan;

namespace {

std::vector<Point2> regularPolygon(int n, double r, Point2 c = {}) {
    std::vector<Point2> pts;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        pts.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
    }
    return pts;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("polygon area of simple shapes") {
    const ClosedPolyline square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(polygonArea(square) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(polygonArea(square.reversed()) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(square.isCounterClockwise());
    CHECK_FALSE(square.reversed().isCounterClockwise());
    CHECK(polygonArea(regularPolygon(6, 1.0)) == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-12));
    CHECK(polygonArea(std::vector<Point2>{{0, 0}, {1, 1}}) == 0.0);
}

TEST_CASE("polyline construction rejects degenerate input") {
    CHECK_THROWS_AS(ClosedPolyline({{0, 0}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(ClosedPolyline({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), std::invalid_argument);
    CHECK(ClosedPolyline({{0, 0}, {3, 0}, {3, 4}}).perimeter() == doctest::Approx(12.0));
}

TEST_CASE("vertex mean") {
    CHECK(polygonCentroid(ClosedPolyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}})) == Point2{0.5, 0.5});
    const std::vector<Point2> tri{{0, 0}, {3, 0}, {0, 3}};
    const Point2 c = vertexMean(tri);
    CHECK(c.x == doctest::Approx(1.0));
    CHECK(c.y == doctest::Approx(1.0));
    std::vector<Point2> twice = tri;
    twice.insert(twice.end(), tri.begin(), tri.end());
    CHECK(distance(vertexMean(twice), c) < 1e-15);
    CHECK_THROWS_AS(vertexMean(std::vector<Point2>{}), std::invalid_argument);
}

TEST_CASE("point to segment distance") {
    const Segment x{{-1, 0}, {1, 0}};
    CHECK(pointSegmentDistance({0, 1}, x) == doctest::Approx(1.0));
    CHECK(pointSegmentDistance({3, 0}, x) == doctest::Approx(2.0));
    CHECK(pointSegmentDistance({2, 2}, Segment{{0, 0}, {4, 0}}) == doctest::Approx(2.0));
    CHECK(pointSegmentDistance({0.3, 0}, x) == doctest::Approx(0.0));
    const Segment degenerate{{1, 1}, {1, 1}};
    CHECK(pointSegmentDistance({4, 5}, degenerate) == doctest::Approx(5.0));
}

TEST_CASE("mean radial distance") {
    const std::vector<Point2> four{{2, 0}, {0, 2}, {-2, 0}, {0, -2}};
    CHECK(meanRadialDistance(four, {0, 0}) == doctest::Approx(2.0));
    const std::vector<Point2> eight{{2, 2}, {0, 2}, {-2, 2}, {-2, 0}, {-2, -2}, {0, -2}, {2, -2}, {2, 0}};
    CHECK(meanRadialDistance(eight, {0, 0}) == doctest::Approx((4 * 2 * std::sqrt(2.0) + 4 * 2) / 8).epsilon(1e-12));
    CHECK(meanRadialDistance(std::vector<Point2>{{1, 1}}, {1, 1}) == 0.0);
}

TEST_CASE("segment intersection, containment and angle wrap") {
    CHECK(segmentsIntersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
    CHECK_FALSE(segmentsIntersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    CHECK(segmentsIntersect({0, 0}, {1, 0}, {1, 0}, {1, 1}));
    const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(pointInPolygon({0.5, 0.5}, sq));
    CHECK_FALSE(pointInPolygon({1.5, 0.5}, sq));
    CHECK(wrapAngle(3 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrapAngle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(wrapAngle(0.25) == 0.25);
}

TEST_CASE("area laws over random polygons") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Point2> pts;
        for (int k = 0; k < 7; ++k) pts.push_back({u(rng), u(rng)});
        const double a = polygonArea(pts);
        const Point2 t{u(rng), u(rng)};
        const double s = 0.5 + std::abs(u(rng));
        std::vector<Point2> moved, scaled, reversed(pts.rbegin(), pts.rend());
        for (const auto& p : pts) {
            moved.push_back(p + t);
            scaled.push_back(p * s);
        }
        CHECK(polygonArea(moved) == doctest::Approx(a).epsilon(1e-9).scale(10));
        CHECK(polygonArea(scaled) == doctest::Approx(a * s * s).epsilon(1e-9).scale(10));
        CHECK(polygonArea(reversed) == doctest::Approx(-a).epsilon(1e-12).scale(10));
    }
}

TEST_CASE("distance to segment is zero exactly on the segment") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Segment s{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const double t = (u(rng) + 1.0) / 2.0;
        const Point2 on = s.a + (s.b - s.a) * t;
        CHECK(pointSegmentDistance(on, s) <= 1e-12);
        const Point2 p{u(rng), u(rng)};
        CHECK(pointSegmentDistance(p, s) >= 0.0);
    }
}

TEST_CASE("mean radius is rotation invariant") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Point2 c{u(rng), u(rng)};
        std::vector<Point2> pts, rotated;
        const double phi = 3.0 * u(rng);
        for (int k = 0; k < 9; ++k) {
            const Point2 d{u(rng), u(rng)};
            pts.push_back(c + d);
            rotated.push_back(c + Point2{d.x * std::cos(phi) - d.y * std::sin(phi), d.x * std::sin(phi) + d.y * std::cos(phi)});
        }
        CHECK(meanRadialDistance(rotated, c) == doctest::Approx(meanRadialDistance(pts, c)).epsilon(1e-12));
    }
}

}  // TEST_SUITE
