#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "herdplan/action_tree.hpp"
#include "herdplan/sim.hpp"

namespace herdplan {

enum class ActionKind { Grasp, Herd, Push, Check, Release };
enum class Phase { Idle, ToolHeld, Herding, Pushing, Verifying, Done };
enum class Policy { Herding, Direct };

std::string_view toString(ActionKind kind);
std::string_view toString(Phase phase);
std::string_view toString(Policy policy);
/// Accepts "herding", "direct" and "direct-push".
Policy parsePolicy(std::string_view text);

struct VerifierDecision {
    bool remainingParticles = false;
    std::optional<Point2> suggestedStartPoint;
};

struct PlannerThresholds {
    std::size_t pushThresholdCount = 10;
    double pushThresholdDistance = 0.30;  // three tool lengths (stem)
    std::size_t maxActions = 200;
    std::size_t targetCount = 5;
    double zetaThreshold = kDefaultZetaThreshold;

    void validate() const;
};

class TaskState {
public:
    Phase phase() const { return phase_; }
    std::optional<ActionKind> lastAction() const {
        return log_.empty() ? std::nullopt : std::optional<ActionKind>(log_.back());
    }
    const std::vector<ActionKind>& actionLog() const { return log_; }
    const std::optional<VerifierDecision>& lastVerification() const { return verification_; }
    /// Set once the rule policy has switched to pushing; herding does not resume.
    bool pushing() const { return pushing_; }

    /// Appends `kind` and advances the phase. Throws std::logic_error on an
    /// illegal transition (Grasp outside Idle, Release not after Check, anything after Done).
    void record(ActionKind kind);
    void setVerification(VerifierDecision decision) { verification_ = std::move(decision); }

private:
    Phase phase_ = Phase::Idle;
    std::vector<ActionKind> log_;
    std::optional<VerifierDecision> verification_;
    bool pushing_ = false;
};

/// Rule policy. Throws std::logic_error when the task is Done.
ActionKind nextAction(const TaskState& task, const StepMetrics& metrics, const PlannerThresholds& thresholds,
                      Policy policy = Policy::Herding);

class Verifier {
public:
    virtual ~Verifier() = default;
    /// `candidateStarts` are the first waypoints of the trajectories the next action may take.
    virtual VerifierDecision verify(const WorldState& state, const WorldConfig& config,
                                    std::span<const Point2> candidateStarts) = 0;
};

/// Reports the tabletop as it is; suggests the remaining particle farthest from the gate.
class GroundTruthVerifier final : public Verifier {
public:
    VerifierDecision verify(const WorldState& state, const WorldConfig& config,
                            std::span<const Point2> candidateStarts) override;
};

/// Talks to a long-lived child process over its stdin/stdout, one request line per check:
///   CHECK <snapshotPath> <k> <x1> <y1> ... <xk> <yk>
/// answered by "DONE" or "START <index>". Any failure (timeout, malformed reply,
/// dead process) falls back to ground truth and logs a warning.
class ExternalProcessVerifier final : public Verifier {
public:
    ExternalProcessVerifier(std::vector<std::string> command, std::string snapshotDir,
                            std::chrono::milliseconds timeout = std::chrono::seconds(5));
    ~ExternalProcessVerifier() override;
    ExternalProcessVerifier(const ExternalProcessVerifier&) = delete;
    ExternalProcessVerifier& operator=(const ExternalProcessVerifier&) = delete;

    VerifierDecision verify(const WorldState& state, const WorldConfig& config,
                            std::span<const Point2> candidateStarts) override;
    std::size_t fallbackCount() const { return fallbacks_; }

private:
    void start();
    void stop();
    std::optional<std::string> exchange(const std::string& request);

    std::vector<std::string> command_;
    std::string snapshotDir_;
    std::chrono::milliseconds timeout_;
    int pid_ = -1;
    int toChild_ = -1;
    int fromChild_ = -1;
    std::string pending_;
    std::size_t requests_ = 0;
    std::size_t fallbacks_ = 0;
    GroundTruthVerifier fallback_;
};

VerifierDecision verifyRemaining(const WorldState& state, const WorldConfig& config, Verifier& verifier,
                                 std::span<const Point2> candidateStarts);

/// Index of the candidate whose first waypoint is nearest `startPoint`; ties go
/// to the lowest index. Throws std::invalid_argument for no candidates.
std::size_t selectTrajectory(const TrajectorySet& candidates, Point2 startPoint);

/// Ground-truth stand-in for the verifier's suggestion: the remaining particle
/// farthest from the gate (lowest index on ties). Throws on an empty tabletop.
Point2 farthestFromGate(std::span<const Point2> particles, Point2 gate);

}  // namespace herdplan
