#include "herdplan/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace herdplan {

void WorldConfig::validate() const {
    if (!(particleRadius > 0.0)) throw std::invalid_argument("world: particleRadius must be positive");
    if (!(gateWidth > 2.0 * particleRadius)) throw std::invalid_argument("world: gateWidth must exceed 2 * particleRadius");
    if (!(substep > 0.0) || substep > particleRadius / 2.0 + kGeomTol) {
        throw std::invalid_argument("world: substep must be in (0, particleRadius / 2]");
    }
    if (!(arena.width() > 0.0) || !(arena.height() > 0.0)) throw std::invalid_argument("world: arena is empty");
    if (!(container.width() > 0.0) || !(container.height() > 0.0)) throw std::invalid_argument("world: container is empty");
    if (!(tool.crossbarLength > 0.0) || !(tool.stemLength > 0.0)) throw std::invalid_argument("world: tool dimensions must be positive");
    if (relaxIterations < 1) throw std::invalid_argument("world: relaxIterations must be >= 1");
    if (maxRelaxIterations < relaxIterations) throw std::invalid_argument("world: maxRelaxIterations must be >= relaxIterations");
    if (!(overlapTolerance > 0.0)) throw std::invalid_argument("world: overlapTolerance must be positive");
    if (linkGap < 0.0) throw std::invalid_argument("world: linkGap must be >= 0");
    for (const auto& w : walls) {
        if (distance(w.a, w.b) <= kGeomTol) throw std::invalid_argument("world: degenerate wall segment");
    }
}

Point2 WorldConfig::gateInward() const {
    const Point2 c{0.5 * (container.xMin + container.xMax), 0.5 * (container.yMin + container.yMax)};
    Point2 d = c - gate;
    // Only the dominant axis matters for an axis-aligned container.
    if (std::abs(d.x) > std::abs(d.y)) {
        d = {d.x > 0.0 ? 1.0 : -1.0, 0.0};
    } else if (std::abs(d.y) > 0.0) {
        d = {0.0, d.y > 0.0 ? 1.0 : -1.0};
    } else {
        d = {0.0, -1.0};
    }
    return d;
}

Segment WorldConfig::gateOpening() const {
    const Point2 in = gateInward();
    const Point2 along{-in.y, in.x};
    return {gate - along * (0.5 * gateWidth), gate + along * (0.5 * gateWidth)};
}

SqueezeError::SqueezeError(std::size_t particle, double penetration)
    : std::runtime_error("particle " + std::to_string(particle) + " squeezed (" + std::to_string(penetration) +
                         " m unresolved)"),
      particle_(particle) {}

std::vector<Point2> readPointsFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open points file '" + path + "'");
    }
    std::vector<Point2> pts;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream ss(line);
        Point2 p;
        std::string extra;
        if (!(ss >> p.x >> p.y) || (ss >> extra) || !isFinite(p)) {
            throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": expected 'x y'");
        }
        pts.push_back(p);
    }
    return pts;
}

void writePointsFile(const std::string& path, std::span<const Point2> points, const std::string& header) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write points file '" + path + "'");
    }
    if (!header.empty()) {
        out << "# " << header << '\n';
    }
    out << std::setprecision(17);
    for (const auto& p : points) {
        out << p.x << ' ' << p.y << '\n';
    }
}

namespace {

double wallDistance(Point2 p, std::span<const Segment> walls) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& w : walls) {
        d = std::min(d, pointSegmentDistance(p, w));
    }
    return d;
}

bool insideArena(Point2 p, const Rect& arena, double margin) {
    return p.x >= arena.xMin + margin && p.x <= arena.xMax - margin && p.y >= arena.yMin + margin &&
           p.y <= arena.yMax - margin;
}

}  // namespace

WorldState initWorld(const WorldConfig& config, const Distribution& dist) {
    config.validate();
    const double r = config.particleRadius;
    WorldState state;
    state.tool = config.parkedPose;
    state.toolEngaged = false;

    if (dist.shape == Distribution::Shape::PointsFile) {
        state.particles = readPointsFile(dist.pointsFile);
        if (state.particles.empty()) {
            throw std::invalid_argument("initWorld: points file has no particles");
        }
        if (minPairDistance(state.particles) < 2.0 * r - config.overlapTolerance) {
            throw std::runtime_error("initWorld: particles in points file overlap");
        }
        for (const auto& p : state.particles) {
            if (!insideArena(p, config.arena, r - config.overlapTolerance) || config.container.contains(p)) {
                throw std::runtime_error("initWorld: points file particle outside the tabletop");
            }
        }
        state.initialCount = state.particles.size();
        return state;
    }

    if (dist.count == 0) {
        throw std::invalid_argument("initWorld: particle count must be positive");
    }
    std::mt19937_64 rng(config.rngSeed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr double kTwoPi = 6.283185307179586476925286766559;

    auto sample = [&]() -> Point2 {
        switch (dist.shape) {
            case Distribution::Shape::Disc: {
                const double rad = dist.extent.x * std::sqrt(unit(rng));
                const double ang = kTwoPi * unit(rng);
                return dist.center + Point2{rad * std::cos(ang), rad * std::sin(ang)};
            }
            case Distribution::Shape::Rect:
                return dist.center + Point2{(2.0 * unit(rng) - 1.0) * dist.extent.x, (2.0 * unit(rng) - 1.0) * dist.extent.y};
            case Distribution::Shape::Annulus: {
                const double r0 = dist.extent.x * dist.extent.x;
                const double r1 = dist.extent.y * dist.extent.y;
                const double rad = std::sqrt(r0 + (r1 - r0) * unit(rng));
                const double ang = kTwoPi * unit(rng);
                return dist.center + Point2{rad * std::cos(ang), rad * std::sin(ang)};
            }
            case Distribution::Shape::PointsFile:
                break;
        }
        return dist.center;
    };

    constexpr int kMaxAttempts = 100000;
    int attempts = 0;
    const double minGap2 = 4.0 * r * r;
    while (state.particles.size() < dist.count) {
        if (++attempts > kMaxAttempts) {
            throw std::runtime_error("initWorld: could not place " + std::to_string(dist.count) +
                                     " particles without overlap after 1e5 attempts");
        }
        const Point2 p = sample();
        if (!insideArena(p, config.arena, r) || config.container.contains(p) || wallDistance(p, config.walls) < r) {
            continue;
        }
        const bool clash = std::any_of(state.particles.begin(), state.particles.end(), [&](Point2 q) {
            const Point2 d = p - q;
            return dot(d, d) < minGap2;
        });
        if (!clash) {
            state.particles.push_back(p);
        }
    }
    state.initialCount = state.particles.size();
    return state;
}

std::vector<Segment> toolSegments(const ToolState& pose, const ToolGeometry& geometry) {
    const Point2 tip = pose.position();
    const Point2 heading{std::cos(pose.theta), std::sin(pose.theta)};
    const Point2 side{-heading.y, heading.x};
    const double half = 0.5 * geometry.crossbarLength;
    return {Segment{tip - side * half, tip + side * half}, Segment{tip, tip - heading * geometry.stemLength}};
}

namespace {

/// Position-based contact resolution for one tool pose.
class ContactSolver {
public:
    ContactSolver(const WorldConfig& config, std::vector<Point2>& particles)
        : cfg_(config), p_(particles), r_(config.particleRadius), margin_(config.particleRadius) {}

    void resolve(std::span<const Segment> tool, Point2 motion) {
        buildPairs();
        for (int it = 0; it < cfg_.maxRelaxIterations; ++it) {
            double moved = 0.0;
            moved = std::max(moved, toolPass(tool, motion));
            moved = std::max(moved, pairPass());
            moved = std::max(moved, wallPass());
            if (it + 1 >= cfg_.relaxIterations && moved <= 0.25 * cfg_.overlapTolerance) {
                break;
            }
            if (driftedBeyondMargin()) {
                buildPairs();
            }
        }
        verify(tool);
    }

private:
    void buildPairs() {
        pairs_.clear();
        anchor_ = p_;
        const double cell = 2.0 * r_ + margin_;
        std::unordered_map<long long, std::vector<std::size_t>> grid;
        auto cellKey = [&](long long cx, long long cy) { return (cx << 32) ^ (cy & 0xffffffffLL); };
        for (std::size_t i = 0; i < p_.size(); ++i) {
            const auto cx = static_cast<long long>(std::floor(p_[i].x / cell));
            const auto cy = static_cast<long long>(std::floor(p_[i].y / cell));
            grid[cellKey(cx, cy)].push_back(i);
        }
        const double reach2 = cell * cell;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            const auto cx = static_cast<long long>(std::floor(p_[i].x / cell));
            const auto cy = static_cast<long long>(std::floor(p_[i].y / cell));
            for (long long dx = -1; dx <= 1; ++dx) {
                for (long long dy = -1; dy <= 1; ++dy) {
                    const auto it = grid.find(cellKey(cx + dx, cy + dy));
                    if (it == grid.end()) continue;
                    for (std::size_t j : it->second) {
                        if (j <= i) continue;
                        const Point2 d = p_[i] - p_[j];
                        if (dot(d, d) <= reach2) {
                            pairs_.emplace_back(i, j);
                        }
                    }
                }
            }
        }
        std::sort(pairs_.begin(), pairs_.end());
    }

    bool driftedBeyondMargin() const {
        const double limit = 0.25 * margin_;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            if (distance(p_[i], anchor_[i]) > limit) return true;
        }
        return false;
    }

    double toolPass(std::span<const Segment> tool, Point2 motion) {
        double moved = 0.0;
        for (auto& p : p_) {
            for (const auto& s : tool) {
                const Point2 q = closestPointOnSegment(p, s);
                const double d = distance(p, q);
                if (d >= r_) continue;
                Point2 n;
                if (d > kGeomTol) {
                    n = (p - q) / d;
                } else {
                    const Point2 along = s.b - s.a;
                    n = Point2{-along.y, along.x} / std::max(norm(along), kGeomTol);
                    if (dot(n, motion) < 0.0) n = n * -1.0;
                }
                p = q + n * r_;
                moved = std::max(moved, r_ - d);
            }
        }
        return moved;
    }

    double pairPass() {
        double moved = 0.0;
        const double minD = 2.0 * r_;
        for (const auto& [i, j] : pairs_) {
            const Point2 d = p_[j] - p_[i];
            const double len = norm(d);
            if (len >= minD) continue;
            const Point2 n = len > kGeomTol ? d / len : Point2{1.0, 0.0};
            const double half = 0.5 * (minD - len);
            p_[i] -= n * half;
            p_[j] += n * half;
            moved = std::max(moved, half);
        }
        return moved;
    }

    double wallPass() {
        double moved = 0.0;
        const Rect& a = cfg_.arena;
        for (auto& p : p_) {
            for (const auto& w : cfg_.walls) {
                const Point2 q = closestPointOnSegment(p, w);
                const double d = distance(p, q);
                if (d >= r_) continue;
                if (d > kGeomTol) {
                    p = q + (p - q) * (r_ / d);
                    moved = std::max(moved, r_ - d);
                }
            }
            const Point2 before = p;
            p.x = std::clamp(p.x, a.xMin + r_, a.xMax - r_);
            p.y = std::clamp(p.y, a.yMin + r_, a.yMax - r_);
            moved = std::max(moved, distance(before, p));
        }
        return moved;
    }

    void verify(std::span<const Segment> tool) const {
        const double tol = cfg_.overlapTolerance;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            for (const auto& s : tool) {
                const double d = pointSegmentDistance(p_[i], s);
                if (d < r_ - tol) throw SqueezeError(i, r_ - d);
            }
            for (const auto& w : cfg_.walls) {
                const double d = pointSegmentDistance(p_[i], w);
                if (d < r_ - tol) throw SqueezeError(i, r_ - d);
            }
        }
        for (const auto& [i, j] : pairs_) {
            const double d = distance(p_[i], p_[j]);
            if (d < 2.0 * r_ - tol) throw SqueezeError(i, 2.0 * r_ - d);
        }
    }

    const WorldConfig& cfg_;
    std::vector<Point2>& p_;
    double r_;
    double margin_;
    std::vector<Point2> anchor_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

void deliverCrossings(WorldState& s, const std::vector<Point2>& before, const WorldConfig& config) {
    const Segment gate = config.gateOpening();
    std::vector<Point2> kept;
    kept.reserve(s.particles.size());
    for (std::size_t i = 0; i < s.particles.size(); ++i) {
        const Point2 now = s.particles[i];
        if (config.container.contains(now) && !config.container.contains(before[i]) &&
            segmentsIntersect(before[i], now, gate.a, gate.b)) {
            ++s.delivered;
        } else {
            kept.push_back(now);
        }
    }
    s.particles.swap(kept);
}

}  // namespace

WorldState stepTool(const WorldState& state, const ToolState& target, const WorldConfig& config) {
    WorldState s = state;
    const ToolState start = state.tool;
    const double dTheta = wrapAngle(target.theta - start.theta);
    const double arm = std::max(0.5 * config.tool.crossbarLength, config.tool.stemLength);
    const double travel = distance(start.position(), target.position()) + std::abs(dTheta) * arm;
    const int n = std::max(1, static_cast<int>(std::ceil(travel / config.substep)));
    for (int k = 1; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        const ToolState pose{start.x + (target.x - start.x) * t, start.y + (target.y - start.y) * t,
                             wrapAngle(start.theta + dTheta * t)};
        const Point2 motion = pose.position() - s.tool.position();
        s.tool = pose;
        if (!s.toolEngaged || s.particles.empty()) {
            continue;
        }
        const auto before = s.particles;
        const auto segments = toolSegments(pose, config.tool);
        ContactSolver(config, s.particles).resolve(segments, motion);
        deliverCrossings(s, before, config);
    }
    s.tool = target;
    return s;
}

WorldState placeTool(const WorldState& state, const ToolState& pose, const WorldConfig& config) {
    WorldState s = state;
    s.tool = pose;
    s.toolEngaged = true;
    if (!s.particles.empty()) {
        const auto before = s.particles;
        const auto segments = toolSegments(pose, config.tool);
        ContactSolver(config, s.particles).resolve(segments, {std::cos(pose.theta), std::sin(pose.theta)});
        deliverCrossings(s, before, config);
    }
    return s;
}

std::size_t connectedComponents(std::span<const Point2> particles, double particleRadius, double linkGap) {
    const std::size_t n = particles.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    const double link = 2.0 * particleRadius + linkGap;
    std::size_t groups = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (distance(particles[i], particles[j]) <= link) {
                const auto a = find(i);
                const auto b = find(j);
                if (a != b) {
                    parent[std::max(a, b)] = std::min(a, b);
                    --groups;
                }
            }
        }
    }
    return groups;
}

double minPairDistance(std::span<const Point2> particles) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < particles.size(); ++i) {
        for (std::size_t j = i + 1; j < particles.size(); ++j) {
            best = std::min(best, distance(particles[i], particles[j]));
        }
    }
    return best;
}

namespace {

double effectiveDilation(double particleRadius, const ContourParams& params) {
    return params.dilation > 0.0 ? params.dilation : particleRadius;
}

std::vector<Point2> contourOf(std::span<const Point2> group, double particleRadius, const ContourParams& params) {
    const double resolution = params.resolution > 0.0 ? params.resolution : particleRadius / 4.0;
    const auto grid = rasterize(group, particleRadius, effectiveDilation(particleRadius, params), resolution);
    const auto samples = traceBoundary(grid, params.traceSamples);
    const auto desc = fitFourier(samples, params.harmonics);
    return reconstruct(desc, params.reconstructSamples).points;
}

}  // namespace

std::vector<Point2> mainGroup(std::span<const Point2> particles, double particleRadius, const ContourParams& params) {
    const std::size_t n = particles.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    const double link = 2.0 * (particleRadius + effectiveDilation(particleRadius, params));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (distance(particles[i], particles[j]) < link) {
                const auto a = find(i);
                const auto b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::vector<std::size_t> size(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++size[find(i)];
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (size[i] > size[best]) best = i;
    }
    std::vector<Point2> group;
    group.reserve(size.empty() ? 0 : size[best]);
    for (std::size_t i = 0; i < n; ++i) {
        if (find(i) == best) group.push_back(particles[i]);
    }
    return group;
}

std::vector<Point2> groupContour(std::span<const Point2> particles, double particleRadius,
                                 const ContourParams& params) {
    if (particles.empty()) {
        return {};
    }
    return contourOf(mainGroup(particles, particleRadius, params), particleRadius, params);
}

StepMetrics computeMetrics(const WorldState& state, const ContourParams& params, const WorldConfig& config) {
    StepMetrics m;
    m.remainingCount = state.particles.size();
    m.deliveredCount = state.delivered;
    if (state.particles.empty()) {
        return m;
    }
    m.centroidGateDistance = distance(vertexMean(state.particles), config.gate);
    const auto group = mainGroup(state.particles, config.particleRadius, params);
    const auto contour = contourOf(group, config.particleRadius, params);
    m.groupArea = groupArea(ContourSamples{contour});
    m.cohesion = cohesiveness(particleArea(group.size(), config.particleRadius), m.groupArea, contour);
    m.connectedComponents = connectedComponents(state.particles, config.particleRadius, config.linkGap);
    return m;
}

namespace {

/// Moves p away from walls until its clearance reaches `need`, and inside the arena by `inset`.
Point2 feasibleWaypoint(Point2 p, const WorldConfig& config, double need, double inset) {
    for (int pass = 0; pass < 8; ++pass) {
        bool changed = false;
        for (const auto& w : config.walls) {
            const Point2 q = closestPointOnSegment(p, w);
            const double d = distance(p, q);
            if (d >= need) continue;
            Point2 n;
            if (d > kGeomTol) {
                n = (p - q) / d;
            } else {
                const Point2 along = w.b - w.a;
                n = Point2{-along.y, along.x} / norm(along);
                if (dot(n, config.gate - q) < 0.0) n = n * -1.0;
            }
            p = q + n * need;
            changed = true;
        }
        p.x = std::clamp(p.x, config.arena.xMin + inset, config.arena.xMax - inset);
        p.y = std::clamp(p.y, config.arena.yMin + inset, config.arena.yMax - inset);
        if (!changed) break;
    }
    return p;
}

double headingOf(Point2 from, Point2 to, double fallback) {
    const Point2 d = to - from;
    return norm(d) > kGeomTol ? std::atan2(d.y, d.x) : fallback;
}

}  // namespace

ExecuteResult executeTrajectory(const WorldState& state, std::span<const Point2> waypoints, const MpcConfig& mpc,
                                const WorldConfig& config, const ContourParams& contour,
                                const ExecuteOptions& options) {
    ExecuteResult result;
    result.state = state;
    const std::size_t deliveredBefore = state.delivered;
    auto finish = [&]() {
        result.state.toolEngaged = false;
        result.metrics = computeMetrics(result.state, contour, config);
        result.metrics.pushedThisAction = result.state.delivered - deliveredBefore;
        result.metrics.pushingEfficiency = static_cast<double>(result.metrics.pushedThisAction);
        return result;
    };
    if (state.particles.empty()) {
        return finish();
    }
    if (waypoints.size() < 2) {
        throw std::invalid_argument("executeTrajectory: need at least 2 waypoints");
    }

    const double need = mpc.dMin + options.waypointSlack;
    const double inset = 0.5 * config.tool.crossbarLength;
    std::vector<Point2> visit;
    const std::size_t last = options.terminalPush ? waypoints.size() - 1 : 1;
    for (std::size_t i = 0; i <= last; ++i) {
        // The gate is reachable by construction; everything else is kept clear of walls.
        const bool isGate = distance(waypoints[i], config.gate) <= kGeomTol;
        visit.push_back(isGate ? waypoints[i] : feasibleWaypoint(waypoints[i], config, need, inset));
    }
    if (!options.terminalPush && options.groupContour.size() >= 3) {
        // A herd stops where its leg passes the group's centroid.
        const Point2 a = visit[0];
        const Point2 leg = visit[1] - a;
        const double len2 = dot(leg, leg);
        if (len2 > kGeomTol * kGeomTol) {
            const double t = dot(vertexMean(options.groupContour) - a, leg) / len2;
            if (t > 0.0 && t < 1.0) visit[1] = a + leg * t;
        }
    }
    if (options.terminalPush && distance(waypoints.back(), config.gate) <= kGeomTol) {
        visit.push_back(config.gate + config.gateInward() * options.gateOvershoot);
    }

    const double heading0 = headingOf(visit[0], visit.size() > 1 ? visit[1] : config.gate, state.tool.theta);
    const Point2 back{std::cos(heading0), std::sin(heading0)};
    const Point2 approach = feasibleWaypoint(visit[0] - back * config.tool.stemLength, config, need, inset);
    try {
        result.state = placeTool(result.state, {approach.x, approach.y, heading0}, config);
    } catch (const SqueezeError& e) {
        result.haltReason = std::string("placement: ") + e.what();
        return finish();
    }
    result.toolPath.push_back(result.state.tool);

    for (std::size_t i = 0; i < visit.size(); ++i) {
        const Point2 prev = i == 0 ? approach : visit[i - 1];
        const double heading = i + 1 < visit.size() ? headingOf(visit[i], visit[i + 1], result.state.tool.theta)
                                                    : headingOf(prev, visit[i], result.state.tool.theta);
        const ToolState ref{visit[i].x, visit[i].y, heading};
        RefinedTrajectory refined;
        try {
            refined = refine(result.state.tool, ref, config.obstacles(), mpc);
        } catch (const InfeasibleTrajectory& e) {
            result.haltReason = e.what();
            return finish();
        }
        for (std::size_t k = 1; k < refined.states.size(); ++k) {
            try {
                result.state = stepTool(result.state, refined.states[k], config);
            } catch (const SqueezeError& e) {
                result.haltReason = e.what();
                return finish();
            }
            result.toolPath.push_back(result.state.tool);
        }
    }
    return finish();
}

}  // namespace herdplan
