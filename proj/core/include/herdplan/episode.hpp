#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "herdplan/planner.hpp"
#include "herdplan/scenario.hpp"

namespace herdplan {

/// What a Herd or Push looked like, for figures.
struct Frame {
    std::vector<Point2> particles;  // before the motion
    std::vector<Point2> contour;
    std::vector<std::vector<Point2>> candidates;
    std::vector<Point2> waypoints;   // the executed candidate
    std::vector<ToolState> toolPath;
};

struct LogRow {
    std::size_t stepIndex = 0;
    ActionKind action = ActionKind::Grasp;
    StepMetrics metrics;
    std::string note;  // halt reason or verifier outcome
    int frame = -1;    // index into RunLog::frames
};

struct RunLog {
    std::vector<LogRow> rows;
    std::vector<Frame> frames;
};

struct EpisodeResult {
    std::string scenario;
    std::uint64_t seed = 0;
    Policy policy = Policy::Herding;
    RunLog log;
    bool success = false;
    std::string failure;
    std::size_t initialCount = 0;
    std::size_t delivered = 0;
    /// The herded group as it reaches the gate: metrics after the last Herd that
    /// delivered nothing yet (the Grasp row when there is none).
    double finalStageZeta = 0.0;
    std::size_t finalStageComponents = 0;
    /// Components after the last Herd action (0 when there was none).
    std::size_t herdEndComponents = 0;
    /// Components in the last row that still had particles on the table.
    std::size_t endComponents = 0;
    std::size_t maxComponents = 0;
    std::size_t invariantViolations = 0;
    double minPairDistance = 0.0;  // smallest seen over the whole run
    double wallSeconds = 0.0;      // excluded from anything that must be byte-stable

    double deliveredFraction() const {
        return initialCount == 0 ? 1.0 : static_cast<double>(delivered) / static_cast<double>(initialCount);
    }
};

struct EpisodeOptions {
    bool recordFrames = true;
};

/// Runs the planner loop over the simulator until Release or maxActions. Uses the
/// ground-truth verifier unless `verifier` is given. Failures of the episode are
/// reported in the result; configuration errors throw.
EpisodeResult runEpisode(const Scenario& scenario, Verifier* verifier = nullptr, const EpisodeOptions& options = {});

/// The scenario's external verifier, writing snapshots under `snapshotDir`, or
/// nullptr when the scenario uses ground truth.
std::unique_ptr<Verifier> makeVerifier(const Scenario& scenario, const std::string& snapshotDir);

/// Candidate trajectories for the next motion action on `state`.
TrajectorySet planCandidates(const WorldState& state, const StepMetrics& metrics, const Scenario& scenario);

}  // namespace herdplan
