#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "herdplan/geometry.hpp"

namespace herdplan {

/// Farthest points chosen for intervention, ordered by angle about the group
/// centroid in a frame whose x axis points from the gate to the centroid.
struct TargetSet {
    std::vector<Point2> points;
};

/// levels[0] holds the |P|-1 initial triangle centroids; each following level has one fewer.
struct CentroidLevels {
    std::vector<std::vector<Point2>> levels;
    Point2 gate;
};

struct PlanEdge {
    std::size_t to = 0;
    double weight = 0.0;
};

/// Directed graph rooted at the gate. Node 0 is the gate, nodes 1..|P| are the
/// targets, then centroid levels in order.
struct PlanGraph {
    std::vector<Point2> nodes;
    std::vector<std::vector<PlanEdge>> edges;
    std::size_t targetCount = 0;

    static constexpr std::size_t kGate = 0;
    std::size_t targetNode(std::size_t j) const { return 1 + j; }
};

struct Trajectory {
    std::vector<Point2> waypoints;   // target -> ... -> gate
    std::vector<std::size_t> nodes;  // matching PlanGraph node indices
    double length = 0.0;
};

struct TrajectorySet {
    std::vector<Trajectory> trajectories;  // one per target, same order as TargetSet
};

/// Ordering angle of p about `centroid`; the branch cut faces the gate.
double angleAboutCentroid(Point2 p, Point2 centroid, Point2 gate);

/// Ranks particles by distance from the centroid (zeta < zetaThreshold) or from
/// the gate (otherwise) and greedily keeps up to k of them such that angularly
/// consecutive picks are at most toolSegmentLength apart. Falls back to the two
/// top-ranked particles when the spacing rule admits only one.
/// Throws std::invalid_argument with fewer than 2 particles.
TargetSet selectTargets(std::span<const Point2> particles, Point2 centroid, Point2 gate, double zeta,
                        double zetaThreshold, std::size_t k, double toolSegmentLength);

/// Iterated triangle centroids: c_{0,j} = (P_j + P_{j+1} + gate) / 3 and
/// c_{i,j} = (c_{i-1,j} + c_{i-1,j+1} + gate) / 3 until a level has two points.
/// Returns no levels for two targets. Throws std::invalid_argument for fewer than two.
CentroidLevels buildLevels(const TargetSet& targets, Point2 gate);

PlanGraph buildGraph(const CentroidLevels& levels, const TargetSet& targets, Point2 gate);

/// Dijkstra from every target to the gate. Throws std::logic_error if the gate is unreachable.
TrajectorySet shortestPaths(const PlanGraph& graph);

/// buildLevels, buildGraph and shortestPaths in sequence.
TrajectorySet planTrajectories(const TargetSet& targets, Point2 gate);

}  // namespace herdplan
