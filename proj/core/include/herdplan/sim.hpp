#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "herdplan/cohesion.hpp"
#include "herdplan/contour.hpp"
#include "herdplan/geometry.hpp"
#include "herdplan/mpc.hpp"

namespace herdplan {

/// T-shaped tool: crossbar perpendicular to the stem, joined at the crossbar
/// midpoint (the tooltip). The stem trails behind the tooltip.
struct ToolGeometry {
    double crossbarLength = 0.12;
    double stemLength = 0.10;
};

struct WorldConfig {
    Rect arena{-0.5, -0.2, 0.5, 0.8};
    std::vector<Segment> walls;
    Point2 gate{0.0, 0.0};
    double gateWidth = 0.2;
    Rect container{-0.5, -0.2, 0.5, 0.0};
    double particleRadius = 0.01;
    ToolGeometry tool;
    std::uint64_t rngSeed = 0;
    double substep = 0.005;
    int relaxIterations = 8;        // minimum position-based passes per substep
    int maxRelaxIterations = 400;   // passes allowed before a contact jam is declared
    double overlapTolerance = 1e-6;
    double linkGap = 0.01;          // extra center distance beyond 2r that still links particles
    ToolState parkedPose{0.45, 0.75, 0.0};

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    /// Unit vector from the gate into the container.
    Point2 gateInward() const;
    /// Opening segment, perpendicular to gateInward(), centered on the gate.
    Segment gateOpening() const;
    /// Walls as the solver sees them: configured walls only (arena bounds are handled separately).
    std::span<const Segment> obstacles() const { return walls; }
};

struct Distribution {
    enum class Shape { Disc, Rect, Annulus, PointsFile };
    Shape shape = Shape::Disc;
    std::size_t count = 0;
    Point2 center;
    /// Disc: (radius, unused). Rect: (half width, half height). Annulus: (inner, outer radius).
    Point2 extent;
    std::string pointsFile;
};

struct WorldState {
    std::vector<Point2> particles;  // tabletop only
    std::size_t delivered = 0;
    std::size_t initialCount = 0;
    ToolState tool;
    bool toolEngaged = false;
    std::size_t stepIndex = 0;
};

struct StepMetrics {
    std::size_t remainingCount = 0;
    std::size_t deliveredCount = 0;
    std::size_t pushedThisAction = 0;
    double pushingEfficiency = 0.0;
    double centroidGateDistance = 0.0;
    double groupArea = 0.0;
    CohesionReport cohesion;
    std::size_t connectedComponents = 0;
};

/// A particle could not be separated from the tool, a wall, or its neighbours.
class SqueezeError : public std::runtime_error {
public:
    SqueezeError(std::size_t particle, double penetration);
    std::size_t particle() const { return particle_; }

private:
    std::size_t particle_;
};

/// Reads "x y" pairs, one per line; blank lines and lines starting with '#' are skipped.
std::vector<Point2> readPointsFile(const std::string& path);
void writePointsFile(const std::string& path, std::span<const Point2> points, const std::string& header = {});

/// Seeded rejection sampling (or verbatim load for PointsFile). Throws
/// std::invalid_argument for zero particles and std::runtime_error when packing
/// fails after 1e5 attempts or loaded particles overlap.
WorldState initWorld(const WorldConfig& config, const Distribution& distribution);

/// Crossbar and stem of the tool at `pose`.
std::vector<Segment> toolSegments(const ToolState& pose, const ToolGeometry& geometry);

/// Moves the tool to `target` in substeps no longer than config.substep (at any
/// tool point), resolving tool, particle and wall contacts after each substep
/// and removing particles that cross the gate opening into the container.
/// Throws SqueezeError when contacts cannot be resolved; the input state is untouched.
WorldState stepTool(const WorldState& state, const ToolState& target, const WorldConfig& config);

/// Lowers the tool at `pose` and pushes out any particle it lands on.
WorldState placeTool(const WorldState& state, const ToolState& pose, const WorldConfig& config);

/// Number of groups when particles within 2r + linkGap are linked.
std::size_t connectedComponents(std::span<const Point2> particles, double particleRadius, double linkGap);

/// Smallest pairwise center distance; +inf for fewer than two particles.
double minPairDistance(std::span<const Point2> particles);

/// Particles of the largest group whose dilated discs overlap (center distance
/// below 2 * (r + dilation)); ties go to the group holding the lowest index.
std::vector<Point2> mainGroup(std::span<const Point2> particles, double particleRadius, const ContourParams& params);

/// Reconstructed Fourier contour of mainGroup(); empty without particles.
std::vector<Point2> groupContour(std::span<const Point2> particles, double particleRadius,
                                 const ContourParams& params);

/// Contour, area and cohesion describe mainGroup(); alpha counts only its particles.
StepMetrics computeMetrics(const WorldState& state, const ContourParams& params, const WorldConfig& config);

struct ExecuteOptions {
    /// Follow every waypoint and overshoot through the gate instead of a single pair.
    bool terminalPush = false;
    /// Group contour at planning time; a herd stops where its leg passes the
    /// contour's vertex mean.
    std::vector<Point2> groupContour;
    /// How far past the gate a terminal push drives the tooltip, meters.
    double gateOvershoot = 0.03;
    /// Waypoints (other than the gate) are moved to at least dMin + waypointSlack from every wall.
    double waypointSlack = 0.01;
};

struct ExecuteResult {
    WorldState state;
    StepMetrics metrics;
    std::vector<ToolState> toolPath;  // executed tooltip poses
    std::string haltReason;          // empty when every leg completed
};

/// Approaches the first waypoint from behind (stem length back along the first
/// leg), then follows MPC-refined legs between waypoints. A herd drives only the
/// first leg; a terminal push drives them all and overshoots into the container.
/// Squeezes and infeasible legs stop the motion and are reported in haltReason.
ExecuteResult executeTrajectory(const WorldState& state, std::span<const Point2> waypoints, const MpcConfig& mpc,
                                const WorldConfig& config, const ContourParams& contour,
                                const ExecuteOptions& options);

}  // namespace herdplan
