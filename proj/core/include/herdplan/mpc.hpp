#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "herdplan/geometry.hpp"

namespace herdplan {

/// Tooltip pose; theta is kept in (-pi, pi].
struct ToolState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Point2 position() const { return {x, y}; }
    friend bool operator==(const ToolState&, const ToolState&) = default;
};

struct ControlInput {
    double v = 0.0;      // m/s
    double omega = 0.0;  // rad/s
    friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct MpcConfig {
    int horizon = 50;
    double dt = 0.1;
    Eigen::Matrix3d Q = Eigen::Vector3d(100.0, 100.0, 1.0).asDiagonal();
    Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
    double dMin = 0.06;
    double vMax = 0.25;
    double omegaMax = 2.0;
    double penaltyWeight = 1e3;  // initial; escalated tenfold per round while infeasible
    int maxIterations = 400;
    double stepSize = 1e-2;
    double convergenceTol = 1e-7;
    int penaltyRounds = 3;
    double clearanceMargin = 0.002;  // added to dMin inside refine's descent only

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

struct RefinedTrajectory {
    std::vector<ToolState> states;      // horizon + 1
    std::vector<ControlInput> controls;  // horizon
    double cost = 0.0;
    std::vector<double> costHistory;  // accepted iterates of the final penalty round
    double penaltyWeight = 0.0;       // weight in effect for the final round
    int iterations = 0;
};

/// Raised when the converged trajectory still violates the clearance constraint.
class InfeasibleTrajectory : public std::runtime_error {
public:
    InfeasibleTrajectory(std::size_t step, double clearance);
    std::size_t step() const { return step_; }
    double clearance() const { return clearance_; }

private:
    std::size_t step_;
    double clearance_;
};

/// Explicit Euler unicycle step.
ToolState dynamicsStep(const ToolState& chi, const ControlInput& u, double dt);

/// Distance to the nearest obstacle minus dMin; +inf without obstacles.
double clearance(const ToolState& chi, std::span<const Segment> obstacles, double dMin);

std::vector<ToolState> rollout(const ToolState& chi0, std::span<const ControlInput> controls, double dt);

/// Penalized form of the tracking cost:
///   sum_{i<H} |chi_i - ref|_Q^2 + |u_i|_R^2  +  penaltyWeight * sum_{i<=H} max(0, -g(chi_i))^2
/// with the heading error wrapped. Throws std::invalid_argument if controls.size() != horizon.
double rolloutCost(const ToolState& chi0, std::span<const ControlInput> controls, const ToolState& chiRef,
                   std::span<const Segment> obstacles, const MpcConfig& config);

/// Gradient of rolloutCost, interleaved as (dv_0, domega_0, dv_1, ...), by adjoint
/// accumulation backwards through the rollout.
std::vector<double> costGradient(const ToolState& chi0, std::span<const ControlInput> controls,
                                 const ToolState& chiRef, std::span<const Segment> obstacles,
                                 const MpcConfig& config);

/// Projected gradient descent with backtracking from zero controls. Escalates the
/// penalty weight tenfold up to config.penaltyRounds times while clearance is
/// violated, warm-starting each round from the previous one; throws
/// InfeasibleTrajectory if it still is.
RefinedTrajectory refine(const ToolState& chi0, const ToolState& chiRef, std::span<const Segment> obstacles,
                         const MpcConfig& config);

}  // namespace herdplan
