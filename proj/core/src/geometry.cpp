#include "herdplan/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace herdplan {

ClosedPolyline::ClosedPolyline(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
        throw std::invalid_argument("ClosedPolyline needs at least 3 vertices");
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point2& a = vertices_[i];
        const Point2& b = vertices_[(i + 1) % vertices_.size()];
        if (!isFinite(a)) {
            throw std::invalid_argument("ClosedPolyline vertex is not finite");
        }
        if (distance(a, b) <= kGeomTol) {
            throw std::invalid_argument("ClosedPolyline has repeated consecutive vertices");
        }
    }
}

bool ClosedPolyline::isCounterClockwise() const { return polygonArea(vertices_) > 0.0; }

ClosedPolyline ClosedPolyline::reversed() const {
    std::vector<Point2> r(vertices_.rbegin(), vertices_.rend());
    return ClosedPolyline(std::move(r));
}

double ClosedPolyline::perimeter() const {
    double len = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        len += distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
    }
    return len;
}

double polygonArea(std::span<const Point2> v) {
    if (v.size() < 3) {
        return 0.0;
    }
    // Shifted to the first vertex to limit cancellation for far-from-origin polygons.
    const Point2 o = v[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        twice += cross(v[i] - o, v[i + 1] - o);
    }
    return 0.5 * twice;
}

Point2 vertexMean(std::span<const Point2> points) {
    if (points.empty()) {
        throw std::invalid_argument("vertexMean of an empty point set");
    }
    Point2 sum;
    for (const auto& p : points) {
        sum += p;
    }
    return sum / static_cast<double>(points.size());
}

Point2 closestPointOnSegment(Point2 p, const Segment& s) {
    const Point2 d = s.b - s.a;
    const double len2 = dot(d, d);
    if (len2 <= kGeomTol * kGeomTol) {
        return s.a;
    }
    const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return s.a + d * t;
}

double pointSegmentDistance(Point2 p, const Segment& s) {
    return distance(p, closestPointOnSegment(p, s));
}

double meanRadialDistance(std::span<const Point2> points, Point2 center) {
    if (points.empty()) {
        throw std::invalid_argument("meanRadialDistance of an empty point set");
    }
    double sum = 0.0;
    for (const auto& p : points) {
        sum += distance(p, center);
    }
    return sum / static_cast<double>(points.size());
}

namespace {

int orientSign(Point2 a, Point2 b, Point2 c) {
    const double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool onSegment(Point2 a, Point2 b, Point2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segmentsIntersect(Point2 p0, Point2 p1, Point2 q0, Point2 q1) {
    const int d1 = orientSign(q0, q1, p0);
    const int d2 = orientSign(q0, q1, p1);
    const int d3 = orientSign(p0, p1, q0);
    const int d4 = orientSign(p0, p1, q1);
    if (d1 * d2 < 0 && d3 * d4 < 0) {
        return true;
    }
    if (d1 == 0 && onSegment(q0, q1, p0)) return true;
    if (d2 == 0 && onSegment(q0, q1, p1)) return true;
    if (d3 == 0 && onSegment(p0, p1, q0)) return true;
    if (d4 == 0 && onSegment(p0, p1, q1)) return true;
    return false;
}

bool pointInPolygon(Point2 p, std::span<const Point2> v) {
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double xCross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < xCross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

double wrapAngle(double a) {
    constexpr double kPi = std::numbers::pi;
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) {
        a += 2.0 * kPi;
    }
    return a;
}

}  // namespace herdplan
