#include "herdplan/action_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace herdplan {

double angleAboutCentroid(Point2 p, Point2 centroid, Point2 gate) {
    Point2 axis = centroid - gate;
    const double len = norm(axis);
    axis = len > kGeomTol ? axis / len : Point2{0.0, 1.0};
    const Point2 d = p - centroid;
    return std::atan2(cross(axis, d), dot(axis, d));
}

namespace {

std::vector<Point2> sortedByAngle(std::vector<Point2> pts, Point2 centroid, Point2 gate) {
    std::stable_sort(pts.begin(), pts.end(), [&](Point2 a, Point2 b) {
        return angleAboutCentroid(a, centroid, gate) < angleAboutCentroid(b, centroid, gate);
    });
    return pts;
}

bool spacingHolds(const std::vector<Point2>& ordered, double maxGap) {
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        if (distance(ordered[i], ordered[i + 1]) > maxGap) {
            return false;
        }
    }
    return true;
}

}  // namespace

TargetSet selectTargets(std::span<const Point2> particles, Point2 centroid, Point2 gate, double zeta,
                        double zetaThreshold, std::size_t k, double toolSegmentLength) {
    if (particles.size() < 2) {
        throw std::invalid_argument("selectTargets: need at least 2 particles");
    }
    k = std::max<std::size_t>(k, 2);
    const Point2 anchor = zeta < zetaThreshold ? centroid : gate;
    std::vector<std::size_t> order(particles.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return distance(particles[a], anchor) > distance(particles[b], anchor);
    });

    std::vector<Point2> chosen;
    for (std::size_t idx : order) {
        if (chosen.size() == k) {
            break;
        }
        std::vector<Point2> trial = chosen;
        trial.push_back(particles[idx]);
        trial = sortedByAngle(std::move(trial), centroid, gate);
        if (spacingHolds(trial, toolSegmentLength)) {
            chosen = std::move(trial);
        }
    }
    if (chosen.size() < 2) {
        chosen = sortedByAngle({particles[order[0]], particles[order[1]]}, centroid, gate);
    }
    return TargetSet{std::move(chosen)};
}

CentroidLevels buildLevels(const TargetSet& targets, Point2 gate) {
    if (targets.points.size() < 2) {
        throw std::invalid_argument("buildLevels: need at least 2 targets");
    }
    CentroidLevels out;
    out.gate = gate;
    if (targets.points.size() == 2) {
        return out;
    }
    std::vector<Point2> prev = targets.points;
    do {
        std::vector<Point2> level;
        level.reserve(prev.size() - 1);
        for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
            level.push_back((prev[j] + prev[j + 1] + gate) / 3.0);
        }
        out.levels.push_back(level);
        prev = std::move(level);
    } while (prev.size() > 2);
    return out;
}

PlanGraph buildGraph(const CentroidLevels& levels, const TargetSet& targets, Point2 gate) {
    PlanGraph g;
    g.targetCount = targets.points.size();
    g.nodes.push_back(gate);
    for (const auto& p : targets.points) {
        g.nodes.push_back(p);
    }
    std::vector<std::size_t> levelStart;
    for (const auto& level : levels.levels) {
        levelStart.push_back(g.nodes.size());
        g.nodes.insert(g.nodes.end(), level.begin(), level.end());
    }
    g.edges.assign(g.nodes.size(), {});
    auto link = [&](std::size_t from, std::size_t to) {
        g.edges[from].push_back({to, distance(g.nodes[from], g.nodes[to])});
    };

    if (levels.levels.empty()) {
        for (std::size_t j = 0; j < g.targetCount; ++j) {
            link(g.targetNode(j), PlanGraph::kGate);
        }
        return g;
    }
    for (std::size_t j = 0; j < levels.levels[0].size(); ++j) {
        link(g.targetNode(j), levelStart[0] + j);
        link(g.targetNode(j + 1), levelStart[0] + j);
    }
    for (std::size_t i = 1; i < levels.levels.size(); ++i) {
        for (std::size_t j = 0; j < levels.levels[i].size(); ++j) {
            link(levelStart[i - 1] + j, levelStart[i] + j);
            link(levelStart[i - 1] + j + 1, levelStart[i] + j);
        }
    }
    const std::size_t last = levels.levels.size() - 1;
    for (std::size_t j = 0; j < levels.levels[last].size(); ++j) {
        link(levelStart[last] + j, PlanGraph::kGate);
    }
    return g;
}

TrajectorySet shortestPaths(const PlanGraph& graph) {
    const std::size_t n = graph.nodes.size();
    TrajectorySet out;
    for (std::size_t j = 0; j < graph.targetCount; ++j) {
        const std::size_t src = graph.targetNode(j);
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        std::vector<std::size_t> pred(n, n);
        using Item = std::tuple<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        dist[src] = 0.0;
        queue.emplace(0.0, src);
        while (!queue.empty()) {
            const auto [d, u] = queue.top();
            queue.pop();
            if (d > dist[u]) {
                continue;
            }
            for (const auto& e : graph.edges[u]) {
                const double nd = d + e.weight;
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    pred[e.to] = u;
                    queue.emplace(nd, e.to);
                }
            }
        }
        if (!std::isfinite(dist[PlanGraph::kGate])) {
            throw std::logic_error("shortestPaths: gate unreachable from a target");
        }
        Trajectory t;
        t.length = dist[PlanGraph::kGate];
        for (std::size_t v = PlanGraph::kGate; v != n; v = pred[v]) {
            t.nodes.push_back(v);
            if (v == src) {
                break;
            }
        }
        std::reverse(t.nodes.begin(), t.nodes.end());
        for (std::size_t v : t.nodes) {
            t.waypoints.push_back(graph.nodes[v]);
        }
        out.trajectories.push_back(std::move(t));
    }
    return out;
}

TrajectorySet planTrajectories(const TargetSet& targets, Point2 gate) {
    const auto levels = buildLevels(targets, gate);
    return shortestPaths(buildGraph(levels, targets, gate));
}

}  // namespace herdplan
