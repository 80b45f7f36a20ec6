#include "herdplan/mpc.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace herdplan {

void MpcConfig::validate() const {
    if (horizon < 1) throw std::invalid_argument("mpc: horizon must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("mpc: dt must be positive");
    if (!(dMin > 0.0)) throw std::invalid_argument("mpc: dMin must be positive");
    if (!(vMax > 0.0) || !(omegaMax > 0.0)) throw std::invalid_argument("mpc: actuation bounds must be positive");
    if (!Q.isApprox(Q.transpose()) || Q.llt().info() != Eigen::Success) {
        throw std::invalid_argument("mpc: Q must be symmetric positive definite");
    }
    if (!R.isApprox(R.transpose()) || R.llt().info() != Eigen::Success) {
        throw std::invalid_argument("mpc: R must be symmetric positive definite");
    }
    if (!(penaltyWeight > 0.0)) throw std::invalid_argument("mpc: penaltyWeight must be positive");
    if (maxIterations < 1) throw std::invalid_argument("mpc: maxIterations must be >= 1");
    if (!(stepSize > 0.0)) throw std::invalid_argument("mpc: stepSize must be positive");
    if (convergenceTol < 0.0) throw std::invalid_argument("mpc: convergenceTol must be >= 0");
    if (clearanceMargin < 0.0) throw std::invalid_argument("mpc: clearanceMargin must be >= 0");
}

InfeasibleTrajectory::InfeasibleTrajectory(std::size_t step, double clearance)
    : std::runtime_error("mpc: clearance violated at step " + std::to_string(step) + " (" +
                         std::to_string(clearance) + " m)"),
      step_(step),
      clearance_(clearance) {}

ToolState dynamicsStep(const ToolState& chi, const ControlInput& u, double dt) {
    return {chi.x + u.v * dt * std::cos(chi.theta), chi.y + u.v * dt * std::sin(chi.theta),
            wrapAngle(chi.theta + u.omega * dt)};
}

namespace {

struct Nearest {
    double distance = std::numeric_limits<double>::infinity();
    Point2 closest;
};

Nearest nearestObstacle(Point2 p, std::span<const Segment> obstacles) {
    Nearest best;
    for (const auto& s : obstacles) {
        const Point2 q = closestPointOnSegment(p, s);
        const double d = distance(p, q);
        if (d < best.distance) {
            best.distance = d;
            best.closest = q;
        }
    }
    return best;
}

Eigen::Vector3d stateError(const ToolState& chi, const ToolState& ref) {
    return {chi.x - ref.x, chi.y - ref.y, wrapAngle(chi.theta - ref.theta)};
}

void checkHorizon(std::span<const ControlInput> controls, const MpcConfig& config) {
    if (controls.size() != static_cast<std::size_t>(config.horizon)) {
        throw std::invalid_argument("mpc: expected " + std::to_string(config.horizon) + " controls, got " +
                                    std::to_string(controls.size()));
    }
}

}  // namespace

double clearance(const ToolState& chi, std::span<const Segment> obstacles, double dMin) {
    return nearestObstacle(chi.position(), obstacles).distance - dMin;
}

std::vector<ToolState> rollout(const ToolState& chi0, std::span<const ControlInput> controls, double dt) {
    std::vector<ToolState> states;
    states.reserve(controls.size() + 1);
    states.push_back(chi0);
    for (const auto& u : controls) {
        states.push_back(dynamicsStep(states.back(), u, dt));
    }
    return states;
}

double rolloutCost(const ToolState& chi0, std::span<const ControlInput> controls, const ToolState& chiRef,
                   std::span<const Segment> obstacles, const MpcConfig& config) {
    checkHorizon(controls, config);
    const auto states = rollout(chi0, controls, config.dt);
    double tracking = 0.0;
    double penalty = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i < controls.size()) {
            const Eigen::Vector3d e = stateError(states[i], chiRef);
            const Eigen::Vector2d u(controls[i].v, controls[i].omega);
            tracking += e.dot(config.Q * e) + u.dot(config.R * u);
        }
        const double g = clearance(states[i], obstacles, config.dMin);
        if (g < 0.0) {
            penalty += g * g;
        }
    }
    return tracking + config.penaltyWeight * penalty;
}

std::vector<double> costGradient(const ToolState& chi0, std::span<const ControlInput> controls,
                                 const ToolState& chiRef, std::span<const Segment> obstacles,
                                 const MpcConfig& config) {
    checkHorizon(controls, config);
    const auto states = rollout(chi0, controls, config.dt);
    const std::size_t h = controls.size();
    const double dt = config.dt;
    const Eigen::Matrix3d qSym = config.Q + config.Q.transpose();
    const Eigen::Matrix2d rSym = config.R + config.R.transpose();

    auto penaltyGradient = [&](const ToolState& s) -> Eigen::Vector3d {
        const Nearest n = nearestObstacle(s.position(), obstacles);
        const double g = n.distance - config.dMin;
        if (!(g < 0.0) || n.distance <= 0.0) {
            return Eigen::Vector3d::Zero();
        }
        const Point2 dir = (s.position() - n.closest) / n.distance;
        return {2.0 * config.penaltyWeight * g * dir.x, 2.0 * config.penaltyWeight * g * dir.y, 0.0};
    };

    std::vector<double> grad(2 * h, 0.0);
    Eigen::Vector3d lambda = penaltyGradient(states[h]);
    for (std::size_t k = h; k-- > 0;) {
        const ToolState& s = states[k];
        const ControlInput& u = controls[k];
        const double c = std::cos(s.theta);
        const double sn = std::sin(s.theta);
        const Eigen::Vector2d uVec(u.v, u.omega);
        const Eigen::Vector2d du = rSym * uVec;
        grad[2 * k] = du[0] + dt * (c * lambda[0] + sn * lambda[1]);
        grad[2 * k + 1] = du[1] + dt * lambda[2];

        Eigen::Vector3d next = qSym * stateError(s, chiRef) + penaltyGradient(s);
        next[0] += lambda[0];
        next[1] += lambda[1];
        next[2] += lambda[2] + dt * u.v * (-sn * lambda[0] + c * lambda[1]);
        lambda = next;
    }
    return grad;
}

RefinedTrajectory refine(const ToolState& chi0, const ToolState& chiRef, std::span<const Segment> obstacles,
                         const MpcConfig& config) {
    config.validate();
    const std::size_t h = static_cast<std::size_t>(config.horizon);
    // The quadratic penalty always leaves a residual violation of order
    // gradient / weight, so descent runs against a slightly inflated clearance.
    MpcConfig cfg = config;
    cfg.dMin = config.dMin + config.clearanceMargin;
    std::vector<ControlInput> u(h);
    RefinedTrajectory out;

    auto project = [&](std::vector<ControlInput>& c) {
        for (auto& ci : c) {
            ci.v = std::clamp(ci.v, -cfg.vMax, cfg.vMax);
            ci.omega = std::clamp(ci.omega, -cfg.omegaMax, cfg.omegaMax);
        }
    };

    for (int round = 0; round <= cfg.penaltyRounds; ++round) {
        double cost = rolloutCost(chi0, u, chiRef, obstacles, cfg);
        out.costHistory.assign(1, cost);
        out.penaltyWeight = cfg.penaltyWeight;
        double step = cfg.stepSize;
        std::vector<ControlInput> trial(h);
        for (int it = 0; it < cfg.maxIterations; ++it) {
            const auto g = costGradient(chi0, u, chiRef, obstacles, cfg);
            bool accepted = false;
            double trialCost = cost;
            // Backtracking on the projected step; a success lets the next step grow again.
            for (int attempt = 0; attempt < 60; ++attempt) {
                for (std::size_t k = 0; k < h; ++k) {
                    trial[k] = {u[k].v - step * g[2 * k], u[k].omega - step * g[2 * k + 1]};
                }
                project(trial);
                trialCost = rolloutCost(chi0, trial, chiRef, obstacles, cfg);
                if (trialCost < cost) {
                    accepted = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            ++out.iterations;
            if (!accepted) {
                break;
            }
            const double relative = (cost - trialCost) / std::max(cost, 1e-300);
            u.swap(trial);
            cost = trialCost;
            out.costHistory.push_back(cost);
            if (relative < cfg.convergenceTol) {
                break;
            }
        }

        const auto states = rollout(chi0, u, cfg.dt);
        std::size_t worst = 0;
        double worstClearance = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double g = clearance(states[i], obstacles, config.dMin);
            if (g < worstClearance) {
                worstClearance = g;
                worst = i;
            }
        }
        if (worstClearance >= 0.0) {
            out.states = states;
            out.controls = u;
            out.cost = cost;
            return out;
        }
        if (round == cfg.penaltyRounds) {
            throw InfeasibleTrajectory(worst, worstClearance);
        }
        cfg.penaltyWeight *= 10.0;
    }
    throw std::logic_error("refine: unreachable");
}

}  // namespace herdplan
