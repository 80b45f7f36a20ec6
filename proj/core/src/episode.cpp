#include "herdplan/episode.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace herdplan {

namespace {

std::size_t checkInvariants(const WorldState& s, const WorldConfig& config, double& minPair) {
    std::size_t violations = 0;
    if (s.particles.size() + s.delivered != s.initialCount) {
        spdlog::error("conservation violated: {} on table + {} delivered != {}", s.particles.size(), s.delivered,
                      s.initialCount);
        ++violations;
    }
    const double r = config.particleRadius;
    const double tol = config.overlapTolerance;
    const double d = minPairDistance(s.particles);
    minPair = std::min(minPair, d);
    if (d < 2.0 * r - tol) {
        spdlog::error("non-penetration violated: min pair distance {}", d);
        ++violations;
    }
    for (const auto& p : s.particles) {
        for (const auto& w : config.walls) {
            if (pointSegmentDistance(p, w) < r - tol) {
                spdlog::error("particle ({}, {}) intersects a wall", p.x, p.y);
                ++violations;
            }
        }
        if (p.x < config.arena.xMin || p.x > config.arena.xMax || p.y < config.arena.yMin || p.y > config.arena.yMax) {
            spdlog::error("particle ({}, {}) left the arena", p.x, p.y);
            ++violations;
        }
    }
    return violations;
}

}  // namespace

TrajectorySet planCandidates(const WorldState& state, const StepMetrics& metrics, const Scenario& scenario) {
    const auto& particles = state.particles;
    const Point2 gate = scenario.world.gate;
    TrajectorySet set;
    if (particles.empty()) {
        return set;
    }
    if (particles.size() == 1) {
        set.trajectories.push_back({{particles[0], gate}, {1, 0}, distance(particles[0], gate)});
        return set;
    }
    const Point2 centroid = vertexMean(particles);
    std::vector<Point2> pool(particles.begin(), particles.end());
    if (scenario.policy == Policy::Herding && metrics.cohesion.zeta < scenario.planner.zetaThreshold) {
        // Gathering herds start behind the group; a gate-bound path from the near
        // side would draw its particle away from the others.
        std::vector<Point2> behind;
        for (const auto& p : particles) {
            if (dot(p - centroid, gate - centroid) <= 0.0) behind.push_back(p);
        }
        if (behind.size() >= 2) pool = std::move(behind);
    }
    const auto targets =
        selectTargets(pool, centroid, gate, metrics.cohesion.zeta, scenario.planner.zetaThreshold,
                      scenario.planner.targetCount, scenario.world.tool.crossbarLength);
    if (scenario.policy == Policy::Direct) {
        for (std::size_t j = 0; j < targets.points.size(); ++j) {
            const Point2 p = targets.points[j];
            set.trajectories.push_back({{p, gate}, {1 + j, 0}, distance(p, gate)});
        }
        return set;
    }
    return planTrajectories(targets, gate);
}

std::unique_ptr<Verifier> makeVerifier(const Scenario& scenario, const std::string& snapshotDir) {
    if (scenario.verifierCommand.empty()) return nullptr;
    return std::make_unique<ExternalProcessVerifier>(scenario.verifierCommand, snapshotDir);
}

EpisodeResult runEpisode(const Scenario& scenario, Verifier* verifier, const EpisodeOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    const WorldConfig& world = scenario.world;
    GroundTruthVerifier groundTruth;
    Verifier& check = verifier ? *verifier : groundTruth;

    EpisodeResult result;
    result.scenario = scenario.name;
    result.seed = world.rngSeed;
    result.policy = scenario.policy;
    result.minPairDistance = std::numeric_limits<double>::infinity();

    WorldState state = initWorld(world, scenario.distribution);
    result.initialCount = state.initialCount;
    StepMetrics metrics = computeMetrics(state, scenario.contour, world);
    TaskState task;
    std::vector<Point2> jammed;

    auto addRow = [&](ActionKind kind, const StepMetrics& m, std::string note, int frame) {
        LogRow row;
        row.stepIndex = state.stepIndex;
        row.action = kind;
        row.metrics = m;
        row.note = std::move(note);
        row.frame = frame;
        result.log.rows.push_back(std::move(row));
        result.maxComponents = std::max(result.maxComponents, m.connectedComponents);
        if (kind == ActionKind::Grasp || (kind == ActionKind::Herd && m.deliveredCount == 0)) {
            result.finalStageZeta = m.cohesion.zeta;
            result.finalStageComponents = m.connectedComponents;
        }
        if (kind == ActionKind::Herd) {
            result.herdEndComponents = m.connectedComponents;
        }
        if (m.remainingCount > 0) {
            result.endComponents = m.connectedComponents;
        }
        ++state.stepIndex;
    };

    result.invariantViolations += checkInvariants(state, world, result.minPairDistance);
    while (task.phase() != Phase::Done && result.log.rows.size() < scenario.planner.maxActions) {
        const ActionKind act = nextAction(task, metrics, scenario.planner, scenario.policy);
        task.record(act);
        StepMetrics idle = metrics;
        idle.pushedThisAction = 0;
        idle.pushingEfficiency = 0.0;
        switch (act) {
            case ActionKind::Grasp:
                state.tool = world.parkedPose;
                state.toolEngaged = false;
                addRow(act, idle, "", -1);
                break;
            case ActionKind::Release:
                state.tool = world.parkedPose;
                state.toolEngaged = false;
                addRow(act, idle, "", -1);
                break;
            case ActionKind::Check: {
                const auto candidates = planCandidates(state, metrics, scenario);
                std::vector<Point2> starts;
                for (const auto& t : candidates.trajectories) starts.push_back(t.waypoints.front());
                const auto decision = verifyRemaining(state, world, check, starts);
                task.setVerification(decision);
                addRow(act, idle, decision.remainingParticles ? "remaining" : "done", -1);
                break;
            }
            case ActionKind::Herd:
            case ActionKind::Push: {
                if (state.particles.empty()) {
                    addRow(act, idle, "empty tabletop", -1);
                    break;
                }
                const auto candidates = planCandidates(state, metrics, scenario);
                const auto& verdict = task.lastVerification();
                const Point2 start = verdict && verdict->suggestedStartPoint
                                         ? *verdict->suggestedStartPoint
                                         : farthestFromGate(state.particles, world.gate);
                // Skip starts that just jammed without changing anything; the
                // simulation is deterministic, so retrying them would loop.
                TrajectorySet usable;
                for (const auto& t : candidates.trajectories) {
                    const bool blocked = std::any_of(jammed.begin(), jammed.end(), [&](Point2 j) {
                        return distance(j, t.waypoints.front()) <= kGeomTol;
                    });
                    if (!blocked) usable.trajectories.push_back(t);
                }
                if (usable.trajectories.empty()) {
                    usable = candidates;
                    jammed.clear();
                }
                const std::size_t pick = selectTrajectory(usable, start);
                const auto waypoints = usable.trajectories[pick].waypoints;

                ExecuteOptions exec;
                exec.terminalPush = act == ActionKind::Push;
                exec.gateOvershoot = scenario.gateOvershoot;
                exec.groupContour = groupContour(state.particles, world.particleRadius, scenario.contour);

                Frame frame;
                if (options.recordFrames) {
                    frame.particles = state.particles;
                    frame.contour = exec.groupContour;
                    for (const auto& t : candidates.trajectories) frame.candidates.push_back(t.waypoints);
                    frame.waypoints = waypoints;
                }
                exec.waypointSlack = scenario.waypointSlack;
                auto executed = executeTrajectory(state, waypoints, scenario.mpc, world, scenario.contour, exec);
                const bool unchanged = executed.state.particles == state.particles && executed.state.delivered == state.delivered;
                if (unchanged && !executed.haltReason.empty()) {
                    jammed.push_back(waypoints.front());
                } else if (!unchanged) {
                    jammed.clear();
                }
                state = std::move(executed.state);
                metrics = executed.metrics;
                if (!executed.haltReason.empty()) {
                    spdlog::debug("{} halted: {}", toString(act), executed.haltReason);
                }
                int frameIndex = -1;
                if (options.recordFrames) {
                    frame.toolPath = std::move(executed.toolPath);
                    frameIndex = static_cast<int>(result.log.frames.size());
                    result.log.frames.push_back(std::move(frame));
                }
                result.invariantViolations += checkInvariants(state, world, result.minPairDistance);
                addRow(act, metrics, executed.haltReason, frameIndex);
                break;
            }
        }
        spdlog::debug("{} #{}: remaining {} delivered {} zeta {:.2f}", toString(act), state.stepIndex - 1,
                      state.particles.size(), state.delivered, metrics.cohesion.zeta);
    }

    result.delivered = state.delivered;
    if (task.phase() != Phase::Done) {
        result.failure = "action limit of " + std::to_string(scenario.planner.maxActions) + " reached";
    } else if (!state.particles.empty()) {
        result.failure = std::to_string(state.particles.size()) + " particles left on the table at release";
    } else if (result.invariantViolations > 0) {
        result.failure = std::to_string(result.invariantViolations) + " simulator invariant violations";
    }
    result.success = result.failure.empty();
    result.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace herdplan
