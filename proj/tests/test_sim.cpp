#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "herdplan/action_tree.hpp"
#include "herdplan/sim.hpp"

using namespace herdplan;

namespace {

WorldConfig table() {
    WorldConfig c;
    c.walls = {{{-0.5, 0.0}, {-0.1, 0.0}}, {{0.1, 0.0}, {0.5, 0.0}}};
    return c;
}

WorldState withParticles(std::vector<Point2> pts, ToolState tool) {
    WorldState s;
    s.particles = std::move(pts);
    s.initialCount = s.particles.size();
    s.tool = tool;
    s.toolEngaged = true;
    return s;
}

Distribution disc(std::size_t n, Point2 c, double radius) {
    Distribution d;
    d.shape = Distribution::Shape::Disc;
    d.count = n;
    d.center = c;
    d.extent = {radius, 0};
    return d;
}

// Tool points densely sampled along its two segments.
std::vector<Point2> toolPoints(const ToolState& pose, const ToolGeometry& g) {
    std::vector<Point2> pts;
    for (const auto& s : toolSegments(pose, g))
        for (int k = 0; k <= 40; ++k) pts.push_back(s.a + (s.b - s.a) * (k / 40.0));
    return pts;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("seeded placement") {
    const auto cfg = table();
    const auto a = initWorld(cfg, disc(74, {0, 0.42}, 0.13));
    CHECK(a.particles.size() == 74);
    CHECK(a.initialCount == 74);
    CHECK(minPairDistance(a.particles) >= 2 * cfg.particleRadius);
    const auto b = initWorld(cfg, disc(74, {0, 0.42}, 0.13));
    CHECK(a.particles == b.particles);
    auto other = cfg;
    other.rngSeed = 1;
    CHECK(initWorld(other, disc(74, {0, 0.42}, 0.13)).particles != a.particles);
    CHECK_THROWS_AS(initWorld(cfg, disc(0, {0, 0.42}, 0.13)), std::invalid_argument);
    CHECK_THROWS_AS(initWorld(cfg, disc(500, {0, 0.42}, 0.05)), std::runtime_error);
}

TEST_CASE("rectangle and annulus placement stay inside their regions") {
    const auto cfg = table();
    Distribution r;
    r.shape = Distribution::Shape::Rect;
    r.count = 60;
    r.center = {0.05, 0.4};
    r.extent = {0.2, 0.09};
    for (const auto& p : initWorld(cfg, r).particles) {
        CHECK(std::abs(p.x - 0.05) <= 0.2);
        CHECK(std::abs(p.y - 0.4) <= 0.09);
    }
    Distribution a;
    a.shape = Distribution::Shape::Annulus;
    a.count = 60;
    a.center = {0, 0.45};
    a.extent = {0.08, 0.18};
    for (const auto& p : initWorld(cfg, a).particles) {
        const double d = distance(p, a.center);
        CHECK(d >= 0.08 - 1e-12);
        CHECK(d <= 0.18 + 1e-12);
    }
}

TEST_CASE("points files round trip and are validated") {
    const auto dir = std::filesystem::temp_directory_path() / "herdplan_sim_test";
    std::filesystem::create_directories(dir);
    const std::vector<Point2> pts{{0.0, 0.4}, {0.1 / 3, 0.4}, {0.2, 0.5}};
    writePointsFile((dir / "ok.points").string(), pts, "three");
    CHECK(readPointsFile((dir / "ok.points").string()) == pts);
    Distribution d;
    d.shape = Distribution::Shape::PointsFile;
    d.pointsFile = (dir / "ok.points").string();
    CHECK(initWorld(table(), d).particles == pts);
    writePointsFile((dir / "overlap.points").string(), std::vector<Point2>{{0, 0.4}, {0.005, 0.4}});
    d.pointsFile = (dir / "overlap.points").string();
    CHECK_THROWS_AS(initWorld(table(), d), std::runtime_error);
    d.pointsFile = (dir / "missing.points").string();
    CHECK_THROWS_AS(initWorld(table(), d), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("gate geometry") {
    const auto cfg = table();
    CHECK(cfg.gateInward() == Point2{0, -1});
    const auto g = cfg.gateOpening();
    CHECK(distance(g.a, g.b) == doctest::Approx(0.2));
    CHECK(vertexMean(std::vector<Point2>{g.a, g.b}) == Point2{0, 0});
}

TEST_CASE("config validation") {
    auto cfg = table();
    CHECK_NOTHROW(cfg.validate());
    cfg.particleRadius = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = table();
    cfg.gateWidth = 0.015;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = table();
    cfg.substep = 0.02;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("tool shape") {
    const auto segs = toolSegments({0, 0.3, 0}, ToolGeometry{});
    REQUIRE(segs.size() == 2);
    CHECK(distance(segs[0].a, segs[0].b) == doctest::Approx(0.12));
    CHECK(segs[0].a.x == doctest::Approx(0.0));
    CHECK(segs[1].b.x == doctest::Approx(-0.10));
}

TEST_CASE("single particle pushed by the crossbar") {
    const auto cfg = table();
    const auto s = withParticles({{0.01, 0.4}}, {0, 0.4, 0});
    const auto out = stepTool(s, {0.05, 0.4, 0}, cfg);
    CHECK(out.particles[0].x - 0.01 >= 0.05 - cfg.overlapTolerance);
    CHECK(std::abs(out.particles[0].y - 0.4) < 1e-9);
    CHECK(out.tool == ToolState{0.05, 0.4, 0});
}

TEST_CASE("free motion leaves particles alone") {
    const auto cfg = table();
    const auto s = withParticles({{0.3, 0.6}, {-0.3, 0.6}}, {0, 0.3, 0});
    const auto out = stepTool(s, {0.1, 0.3, 0.3}, cfg);
    CHECK(out.particles == s.particles);
}

TEST_CASE("two touching particles advance together") {
    const auto cfg = table();
    const auto s = withParticles({{0.01, 0.4}, {0.03, 0.4}}, {0, 0.4, 0});
    const auto out = stepTool(s, {0.05, 0.4, 0}, cfg);
    CHECK(out.particles[0].x > 0.05);
    CHECK(out.particles[1].x > 0.07);
    CHECK(distance(out.particles[0], out.particles[1]) >= 2 * cfg.particleRadius - 1e-6);
}

TEST_CASE("a particle driven through the gate is delivered") {
    const auto cfg = table();
    auto s = withParticles({{0.0, 0.02}}, {0, 0.04, -std::numbers::pi / 2});
    const auto out = stepTool(s, {0, -0.05, -std::numbers::pi / 2}, cfg);
    CHECK(out.particles.empty());
    CHECK(out.delivered == 1);
}

TEST_CASE("walls stop particles instead of delivering them") {
    const auto cfg = table();
    // Pushing straight down onto the wall right of the gate.
    const auto s = withParticles({{0.3, 0.03}}, {0.3, 0.06, -std::numbers::pi / 2});
    try {
        const auto out = stepTool(s, {0.3, 0.03, -std::numbers::pi / 2}, cfg);
        CHECK(out.delivered == 0);
        CHECK(out.particles.size() == 1);
        CHECK(out.particles[0].y >= 0.0);
        CHECK(pointSegmentDistance(out.particles[0], cfg.walls[1]) >= cfg.particleRadius - 1e-6);
    } catch (const SqueezeError&) {
        // Pinned between tool and wall is also a valid outcome; the input is untouched.
        CHECK(s.particles[0] == Point2{0.3, 0.03});
    }
}

TEST_CASE("placing the tool on a particle moves it out") {
    const auto cfg = table();
    const auto s = withParticles({{0.0, 0.4}}, cfg.parkedPose);
    const auto out = placeTool(s, {0, 0.4, 0}, cfg);
    for (const auto& seg : toolSegments(out.tool, cfg.tool)) {
        CHECK(pointSegmentDistance(out.particles[0], seg) >= cfg.particleRadius - 1e-6);
    }
}

TEST_CASE("invariants hold under random tool motion") {
    auto cfg = table();
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        cfg.rngSeed = static_cast<std::uint64_t>(trial);
        auto s = initWorld(cfg, disc(60, {0, 0.3}, 0.12));
        s.tool = {0.3 * u(rng), 0.3 + 0.2 * u(rng), 3 * u(rng)};
        s = placeTool(s, s.tool, cfg);
        for (int step = 0; step < 10; ++step) {
            const ToolState target{s.tool.x + 0.06 * u(rng), std::max(0.1, s.tool.y + 0.06 * u(rng)),
                                   wrapAngle(s.tool.theta + 0.4 * u(rng))};
            try {
                s = stepTool(s, target, cfg);
            } catch (const SqueezeError&) {
                continue;
            }
            CHECK(s.particles.size() + s.delivered == s.initialCount);
            CHECK(minPairDistance(s.particles) >= 2 * cfg.particleRadius - 1e-6);
            for (const auto& p : s.particles)
                for (const auto& w : cfg.walls) CHECK(pointSegmentDistance(p, w) >= cfg.particleRadius - 1e-6);
        }
    }
}

TEST_CASE("isolated particles away from the sweep never move") {
    const auto cfg = table();
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double reach = cfg.tool.crossbarLength + cfg.tool.stemLength + 2 * cfg.substep +
                         cfg.relaxIterations * cfg.particleRadius;
    for (int trial = 0; trial < 30; ++trial) {
        const ToolState from{0.15 * u(rng), 0.4 + 0.1 * u(rng), 3 * u(rng)};
        const ToolState to{from.x + 0.05 * u(rng), from.y + 0.05 * u(rng), wrapAngle(from.theta + 0.3 * u(rng))};
        // A cluster touching the tool plus scattered singles.
        std::vector<Point2> pts;
        const auto near = toolPoints(from, cfg.tool);
        const Point2 heading{std::cos(from.theta), std::sin(from.theta)};
        pts.push_back(from.position() + heading * (cfg.particleRadius + 0.001));
        for (int k = 0; k < 40; ++k) {
            const Point2 p{0.45 * u(rng), 0.35 + 0.4 * u(rng)};
            bool ok = p.y > 0.02;
            for (const auto& q : pts) ok = ok && distance(p, q) >= 2 * cfg.particleRadius + 0.01;
            if (ok) pts.push_back(p);
        }
        auto sweep = near;
        const auto after = toolPoints(to, cfg.tool);
        sweep.insert(sweep.end(), after.begin(), after.end());
        const auto s = withParticles(pts, from);
        WorldState out;
        try {
            out = stepTool(s, to, cfg);
        } catch (const SqueezeError&) {
            continue;
        }
        REQUIRE(out.particles.size() == pts.size());
        for (std::size_t i = 1; i < pts.size(); ++i) {
            double gap = std::numeric_limits<double>::infinity();
            for (const auto& q : sweep) gap = std::min(gap, distance(q, pts[i]));
            if (gap > reach) CHECK(out.particles[i] == pts[i]);
        }
    }
}

TEST_CASE("component counting and main group") {
    const auto cfg = table();
    std::vector<Point2> tight;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) tight.push_back({0.021 * i, 0.4 + 0.021 * j});
    CHECK(connectedComponents(tight, 0.01, 0.01) == 1);
    auto two = tight;
    for (const auto& p : tight) two.push_back(p + Point2{0.063 + 0.1, 0});
    CHECK(connectedComponents(two, 0.01, 0.01) == 2);
    CHECK(connectedComponents(std::vector<Point2>{}, 0.01, 0.01) == 0);
    auto lopsided = two;
    lopsided.push_back({0.3, 0.4});
    ContourParams params;
    CHECK(mainGroup(lopsided, 0.01, params).size() == 16);
    CHECK(mainGroup(two, 0.01, params).front() == tight.front());
    CHECK(std::isinf(minPairDistance(std::vector<Point2>{{0, 0}})));
}

TEST_CASE("metrics of a compact group") {
    const auto cfg = table();
    auto s = initWorld(cfg, disc(40, {0, 0.4}, 0.08));
    s.delivered = 3;
    s.initialCount = 43;
    const auto m = computeMetrics(s, ContourParams{}, cfg);
    CHECK(m.remainingCount == 40);
    CHECK(m.deliveredCount == 3);
    CHECK(m.centroidGateDistance == doctest::Approx(norm(vertexMean(s.particles))));
    CHECK(m.groupArea > 0.0);
    CHECK(m.cohesion.density > 0.0);
    CHECK(m.cohesion.density <= 1.0);
    CHECK(m.cohesion.zeta == doctest::Approx(100 * m.cohesion.density * m.cohesion.regularity));
    WorldState empty;
    const auto e = computeMetrics(empty, ContourParams{}, cfg);
    CHECK(e.remainingCount == 0);
    CHECK(e.connectedComponents == 0);
}

TEST_CASE("terminal push delivers particles ahead of it") {
    const auto cfg = table();
    MpcConfig mpc;
    mpc.dMin = 0.06;
    auto s = withParticles({{0.0, 0.06}, {-0.02, 0.09}, {0.02, 0.09}}, cfg.parkedPose);
    s.toolEngaged = false;
    ExecuteOptions opt;
    opt.terminalPush = true;
    const std::vector<Point2> wp{{0.0, 0.15}, {0.0, 0.0}};
    const auto r = executeTrajectory(s, wp, mpc, cfg, ContourParams{}, opt);
    CHECK(r.metrics.pushedThisAction >= 1);
    CHECK(r.metrics.pushingEfficiency == static_cast<double>(r.metrics.pushedThisAction));
    CHECK(r.state.particles.size() + r.state.delivered == 3);
    CHECK_FALSE(r.toolPath.empty());
}

TEST_CASE("herding leg brings the group closer to the gate") {
    const auto cfg = table();
    MpcConfig mpc;
    mpc.dMin = 0.06;
    auto s = initWorld(cfg, disc(74, {0, 0.42}, 0.13));
    const ContourParams params;
    const auto before = computeMetrics(s, params, cfg);
    const Point2 c = vertexMean(s.particles);
    const auto targets = selectTargets(s.particles, c, cfg.gate, before.cohesion.zeta, 0.0, 5, 0.12);
    const auto set = planTrajectories(targets, cfg.gate);
    ExecuteOptions opt;
    opt.groupContour = groupContour(s.particles, cfg.particleRadius, params);
    const auto r = executeTrajectory(s, set.trajectories[targets.points.size() / 2].waypoints, mpc, cfg, params, opt);
    CHECK(r.haltReason.empty());
    CHECK(r.metrics.centroidGateDistance < before.centroidGateDistance);
    CHECK(minPairDistance(r.state.particles) >= 2 * cfg.particleRadius - 1e-6);
}

TEST_CASE("empty tabletop executes nothing") {
    const auto cfg = table();
    WorldState s;
    s.tool = cfg.parkedPose;
    const std::vector<Point2> wp{{0.0, 0.3}, {0.0, 0.0}};
    const auto r = executeTrajectory(s, wp, MpcConfig{}, cfg, ContourParams{}, ExecuteOptions{});
    CHECK(r.metrics.remainingCount == 0);
    CHECK(r.toolPath.empty());
    CHECK(r.state.tool == cfg.parkedPose);
}

}  // TEST_SUITE
