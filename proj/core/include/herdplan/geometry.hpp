#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace herdplan {

/// Geometric degeneracy tolerance in meters.
inline constexpr double kGeomTol = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
    friend Point2 operator*(double s, Point2 a) { return {a.x * s, a.y * s}; }
    friend Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }
    Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
    Point2& operator-=(Point2 o) { x -= o.x; y -= o.y; return *this; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool isFinite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct Segment {
    Point2 a;
    Point2 b;
};

/// Axis-aligned rectangle, used for the arena and the container.
struct Rect {
    double xMin = 0.0;
    double yMin = 0.0;
    double xMax = 0.0;
    double yMax = 0.0;

    bool contains(Point2 p) const {
        return p.x >= xMin && p.x <= xMax && p.y >= yMin && p.y <= yMax;
    }
    double width() const { return xMax - xMin; }
    double height() const { return yMax - yMin; }
};

/// Closed polygonal chain; the last vertex connects back to the first.
/// Construction rejects fewer than 3 vertices and repeated consecutive vertices.
class ClosedPolyline {
public:
    explicit ClosedPolyline(std::vector<Point2> vertices);

    std::span<const Point2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Point2& operator[](std::size_t i) const { return vertices_[i]; }

    bool isCounterClockwise() const;
    ClosedPolyline reversed() const;
    double perimeter() const;

private:
    std::vector<Point2> vertices_;
};

/// Shoelace signed area; positive for counterclockwise winding, 0 for fewer than 3 points.
double polygonArea(std::span<const Point2> vertices);
inline double polygonArea(const ClosedPolyline& poly) { return polygonArea(poly.vertices()); }

/// Vertex mean. Throws std::invalid_argument on empty input.
Point2 vertexMean(std::span<const Point2> points);
inline Point2 polygonCentroid(const ClosedPolyline& poly) { return vertexMean(poly.vertices()); }

Point2 closestPointOnSegment(Point2 p, const Segment& s);
double pointSegmentDistance(Point2 p, const Segment& s);

/// Mean Euclidean distance from `center`. Throws std::invalid_argument on empty input.
double meanRadialDistance(std::span<const Point2> points, Point2 center);

/// True when open segments p0-p1 and q0-q1 intersect (touching counts).
bool segmentsIntersect(Point2 p0, Point2 p1, Point2 q0, Point2 q1);

/// Even-odd point-in-polygon test.
bool pointInPolygon(Point2 p, std::span<const Point2> vertices);

/// Wraps an angle to (-pi, pi].
double wrapAngle(double a);

}  // namespace herdplan
