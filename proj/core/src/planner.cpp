#include "herdplan/planner.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace herdplan {

std::string_view toString(ActionKind kind) {
    switch (kind) {
        case ActionKind::Grasp: return "Grasp";
        case ActionKind::Herd: return "Herd";
        case ActionKind::Push: return "Push";
        case ActionKind::Check: return "Check";
        case ActionKind::Release: return "Release";
    }
    return "?";
}

std::string_view toString(Phase phase) {
    switch (phase) {
        case Phase::Idle: return "Idle";
        case Phase::ToolHeld: return "ToolHeld";
        case Phase::Herding: return "Herding";
        case Phase::Pushing: return "Pushing";
        case Phase::Verifying: return "Verifying";
        case Phase::Done: return "Done";
    }
    return "?";
}

std::string_view toString(Policy policy) { return policy == Policy::Herding ? "herding" : "direct"; }

Policy parsePolicy(std::string_view text) {
    if (text == "herding") return Policy::Herding;
    if (text == "direct" || text == "direct-push") return Policy::Direct;
    throw std::invalid_argument("unknown policy '" + std::string(text) + "' (expected herding or direct)");
}

void PlannerThresholds::validate() const {
    if (!(pushThresholdDistance >= 0.0)) throw std::invalid_argument("planner: pushThresholdDistance must be >= 0");
    if (maxActions < 3) throw std::invalid_argument("planner: maxActions must be >= 3");
    if (targetCount < 2) throw std::invalid_argument("planner: targetCount must be >= 2");
    if (!(zetaThreshold >= 0.0)) throw std::invalid_argument("planner: zetaThreshold must be >= 0");
}

void TaskState::record(ActionKind kind) {
    auto illegal = [&]() {
        throw std::logic_error(std::string("task: ") + std::string(toString(kind)) + " not allowed in phase " +
                               std::string(toString(phase_)));
    };
    switch (kind) {
        case ActionKind::Grasp:
            if (phase_ != Phase::Idle) illegal();
            phase_ = Phase::ToolHeld;
            break;
        case ActionKind::Herd:
        case ActionKind::Push:
            if (phase_ != Phase::ToolHeld && phase_ != Phase::Verifying) illegal();
            phase_ = kind == ActionKind::Herd ? Phase::Herding : Phase::Pushing;
            if (kind == ActionKind::Push) pushing_ = true;
            break;
        case ActionKind::Check:
            if (phase_ != Phase::Herding && phase_ != Phase::Pushing) illegal();
            phase_ = Phase::Verifying;
            break;
        case ActionKind::Release:
            if (phase_ != Phase::Verifying) illegal();
            phase_ = Phase::Done;
            break;
    }
    log_.push_back(kind);
}

ActionKind nextAction(const TaskState& task, const StepMetrics& metrics, const PlannerThresholds& thresholds,
                      Policy policy) {
    switch (task.phase()) {
        case Phase::Done:
            throw std::logic_error("nextAction: task is done");
        case Phase::Idle:
            return ActionKind::Grasp;
        case Phase::Herding:
        case Phase::Pushing:
            return ActionKind::Check;
        case Phase::Verifying: {
            const bool remains = task.lastVerification() ? task.lastVerification()->remainingParticles
                                                         : metrics.remainingCount > 0;
            if (!remains) return ActionKind::Release;
            break;
        }
        case Phase::ToolHeld:
            break;
    }
    if (policy == Policy::Direct || task.pushing()) {
        return ActionKind::Push;
    }
    const bool large = metrics.remainingCount > thresholds.pushThresholdCount;
    const bool far = metrics.centroidGateDistance > thresholds.pushThresholdDistance;
    return large || far ? ActionKind::Herd : ActionKind::Push;
}

Point2 farthestFromGate(std::span<const Point2> particles, Point2 gate) {
    if (particles.empty()) {
        throw std::invalid_argument("farthestFromGate: no particles");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < particles.size(); ++i) {
        if (distance(particles[i], gate) > distance(particles[best], gate)) best = i;
    }
    return particles[best];
}

VerifierDecision GroundTruthVerifier::verify(const WorldState& state, const WorldConfig& config,
                                             std::span<const Point2>) {
    VerifierDecision d;
    d.remainingParticles = !state.particles.empty();
    if (d.remainingParticles) {
        d.suggestedStartPoint = farthestFromGate(state.particles, config.gate);
    }
    return d;
}

ExternalProcessVerifier::ExternalProcessVerifier(std::vector<std::string> command, std::string snapshotDir,
                                                 std::chrono::milliseconds timeout)
    : command_(std::move(command)), snapshotDir_(std::move(snapshotDir)), timeout_(timeout) {
    if (command_.empty()) {
        throw std::invalid_argument("external verifier: empty command");
    }
}

ExternalProcessVerifier::~ExternalProcessVerifier() { stop(); }

void ExternalProcessVerifier::start() {
    int sv[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
        throw std::runtime_error(std::string("external verifier: socketpair: ") + std::strerror(errno));
    }
    std::vector<char*> argv;
    for (auto& a : command_) argv.push_back(a.data());
    argv.push_back(nullptr);
    const pid_t pid = fork();
    if (pid < 0) {
        close(sv[0]);
        close(sv[1]);
        throw std::runtime_error(std::string("external verifier: fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        dup2(sv[1], STDIN_FILENO);
        dup2(sv[1], STDOUT_FILENO);
        execvp(argv[0], argv.data());
        _exit(127);
    }
    close(sv[1]);
    pid_ = pid;
    toChild_ = fromChild_ = sv[0];
    pending_.clear();
}

void ExternalProcessVerifier::stop() {
    if (pid_ > 0) {
        close(toChild_);
        kill(pid_, SIGTERM);
        waitpid(pid_, nullptr, 0);
    }
    pid_ = -1;
    toChild_ = fromChild_ = -1;
    pending_.clear();
}

std::optional<std::string> ExternalProcessVerifier::exchange(const std::string& request) {
    if (pid_ <= 0) start();
    std::size_t sent = 0;
    while (sent < request.size()) {
        const ssize_t n = send(toChild_, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            return std::nullopt;
        }
        sent += static_cast<std::size_t>(n);
    }
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        const auto nl = pending_.find('\n');
        if (nl != std::string::npos) {
            std::string line = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        pollfd pfd{fromChild_, POLLIN, 0};
        const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0 && errno == EINTR) continue;
        if (ready <= 0) return std::nullopt;
        char buf[512];
        const ssize_t n = read(fromChild_, buf, sizeof buf);
        if (n <= 0) return std::nullopt;
        pending_.append(buf, static_cast<std::size_t>(n));
    }
}

VerifierDecision ExternalProcessVerifier::verify(const WorldState& state, const WorldConfig& config,
                                                 std::span<const Point2> candidateStarts) {
    const auto path = (std::filesystem::path(snapshotDir_) / ("snapshot_" + std::to_string(requests_++) + ".txt"));
    std::ostringstream req;
    req.precision(17);
    try {
        std::filesystem::create_directories(snapshotDir_);
        std::ostringstream header;
        header.precision(17);
        header << "gate " << config.gate.x << ' ' << config.gate.y;
        writePointsFile(path.string(), state.particles, header.str());
        req << "CHECK " << path.string() << ' ' << candidateStarts.size();
        for (const auto& p : candidateStarts) req << ' ' << p.x << ' ' << p.y;
        req << '\n';
    } catch (const std::exception& e) {
        spdlog::warn("external verifier: {}; using ground truth", e.what());
        ++fallbacks_;
        return fallback_.verify(state, config, candidateStarts);
    }

    std::optional<std::string> reply;
    try {
        reply = exchange(req.str());
    } catch (const std::exception& e) {
        spdlog::warn("external verifier: {}", e.what());
    }
    if (reply) {
        std::istringstream in(*reply);
        std::string word;
        in >> word;
        std::string rest;
        if (word == "DONE" && !(in >> rest)) {
            return VerifierDecision{false, std::nullopt};
        }
        std::size_t index = 0;
        if (word == "START" && (in >> index) && !(in >> rest) && index < candidateStarts.size()) {
            return VerifierDecision{true, candidateStarts[index]};
        }
        spdlog::warn("external verifier: malformed reply '{}'; using ground truth", *reply);
    } else {
        spdlog::warn("external verifier: no reply within {} ms; using ground truth", timeout_.count());
        stop();
    }
    ++fallbacks_;
    return fallback_.verify(state, config, candidateStarts);
}

VerifierDecision verifyRemaining(const WorldState& state, const WorldConfig& config, Verifier& verifier,
                                 std::span<const Point2> candidateStarts) {
    auto d = verifier.verify(state, config, candidateStarts);
    if (!d.remainingParticles) d.suggestedStartPoint.reset();
    return d;
}

std::size_t selectTrajectory(const TrajectorySet& candidates, Point2 startPoint) {
    if (candidates.trajectories.empty()) {
        throw std::invalid_argument("selectTrajectory: no candidates");
    }
    std::size_t best = 0;
    double bestDist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.trajectories.size(); ++i) {
        const auto& wp = candidates.trajectories[i].waypoints;
        if (wp.empty()) continue;
        const double d = distance(wp.front(), startPoint);
        if (d < bestDist) {
            bestDist = d;
            best = i;
        }
    }
    return best;
}

}  // namespace herdplan
