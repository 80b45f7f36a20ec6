#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "herdplan/mpc.hpp"
#include "mpc_cases.hpp"

using namespace herdplan;

TEST_SUITE("mpc") {

TEST_CASE("unicycle steps") {
    const auto a = dynamicsStep({0, 0, 0}, {1, 0}, 0.1);
    CHECK(a.x == doctest::Approx(0.1));
    CHECK(a.y == 0.0);
    const auto b = dynamicsStep({0, 0, std::numbers::pi / 2}, {1, 0}, 0.1);
    CHECK(std::abs(b.x) < 1e-15);
    CHECK(b.y == doctest::Approx(0.1));
    CHECK(b.theta == doctest::Approx(std::numbers::pi / 2));
    CHECK(dynamicsStep({0, 0, 0}, {0, 1}, 0.1) == ToolState{0, 0, 0.1});
    CHECK(dynamicsStep({0, 0, 3.1}, {0, 1}, 0.1).theta == doctest::Approx(3.2 - 2 * std::numbers::pi));
}

TEST_CASE("clearance") {
    const std::vector<Segment> wall{{{-1, 0}, {1, 0}}};
    CHECK(clearance({0, 0.10, 0}, wall, 0.04) == doctest::Approx(0.06));
    CHECK(clearance({0.5, 0, 0}, wall, 0.04) == doctest::Approx(-0.04));
    const std::vector<Segment> two{{{-1, 0}, {1, 0}}, {{-1, 0.15}, {1, 0.15}}};
    CHECK(clearance({0, 0.10, 0}, two, 0.04) == doctest::Approx(0.01));
    CHECK(std::isinf(clearance({0, 0, 0}, std::vector<Segment>{}, 0.04)));
}

TEST_CASE("rollout cost hand values") {
    MpcConfig cfg;
    cfg.horizon = 1;
    cfg.Q = Eigen::Matrix3d::Identity();
    cfg.R = Eigen::Matrix2d::Identity();
    const std::vector<ControlInput> zero(1);
    CHECK(rolloutCost({1, 0, 0}, zero, {0, 0, 0}, {}, cfg) == doctest::Approx(1.0));
    cfg.horizon = 6;
    const std::vector<ControlInput> zeros(6);
    CHECK(rolloutCost({0.2, 0.3, 0.4}, zeros, {0.2, 0.3, 0.4}, {}, cfg) == 0.0);
    CHECK_THROWS_AS(rolloutCost({0, 0, 0}, zero, {0, 0, 0}, {}, cfg), std::invalid_argument);
}

TEST_CASE("heading error is wrapped") {
    MpcConfig cfg;
    cfg.horizon = 1;
    cfg.Q = Eigen::Vector3d(0, 0, 1).asDiagonal();
    cfg.R = Eigen::Matrix2d::Identity();
    const std::vector<ControlInput> zero(1);
    const double j = rolloutCost({0, 0, 3.1}, zero, {0, 0, -3.1}, {}, cfg);
    CHECK(j == doctest::Approx(std::pow(2 * std::numbers::pi - 6.2, 2)));
}

TEST_CASE("inactive penalty leaves cost and gradient alone") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = testcases::randomInstance(rng, 8, false);
        const std::vector<Segment> far{{{10, 10}, {11, 10}}};
        MpcConfig doubled = inst.config;
        doubled.penaltyWeight *= 2;
        const double a = rolloutCost(inst.chi0, inst.controls, inst.ref, far, inst.config);
        CHECK(rolloutCost(inst.chi0, inst.controls, inst.ref, far, doubled) == a);
        CHECK(rolloutCost(inst.chi0, inst.controls, inst.ref, {}, inst.config) == a);
        CHECK(costGradient(inst.chi0, inst.controls, inst.ref, far, inst.config) ==
              costGradient(inst.chi0, inst.controls, inst.ref, {}, inst.config));
    }
}

TEST_CASE("gradient vanishes at the minimum") {
    MpcConfig cfg;
    cfg.horizon = 7;
    const std::vector<ControlInput> zeros(7);
    for (double g : costGradient({0.1, 0.2, 0.3}, zeros, {0.1, 0.2, 0.3}, {}, cfg)) CHECK(g == 0.0);
}

TEST_CASE("gradient against central differences") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 100; ++trial) {
        const int h = 1 + trial % 10;
        const auto inst = testcases::randomInstance(rng, h, true);
        CHECK(testcases::worstGradientError(inst) <= 1e-4);
    }
}

TEST_CASE("free-space refine reaches the reference") {
    MpcConfig cfg;
    const auto r = refine({0, 0, 0}, {0.5, 0, 0}, {}, cfg);
    CHECK(distance(r.states.back().position(), {0.5, 0}) <= 0.02);
    for (std::size_t i = 1; i < r.costHistory.size(); ++i) CHECK(r.costHistory[i] < r.costHistory[i - 1]);
    CHECK(r.states.size() == 51);
    CHECK(r.controls.size() == 50);
}

TEST_CASE("refine from the reference returns zero controls") {
    MpcConfig cfg;
    const auto r = refine({0.1, 0.1, 0.5}, {0.1, 0.1, 0.5}, {}, cfg);
    CHECK(r.cost == 0.0);
    for (const auto& u : r.controls) CHECK(u == ControlInput{});
}

TEST_CASE("refine bends around a wall end") {
    const auto c = testcases::wallCase();
    MpcConfig cfg;
    cfg.dMin = c.dMin;
    const auto r = refine(c.chi0, c.ref, c.walls, cfg);
    double minClearance = std::numeric_limits<double>::infinity();
    double maxLift = 0;
    for (const auto& s : r.states) {
        minClearance = std::min(minClearance, clearance(s, c.walls, cfg.dMin));
        maxLift = std::max(maxLift, s.y);
    }
    CHECK(minClearance >= 0.0);
    CHECK(maxLift > 0.02);
    CHECK(distance(r.states.back().position(), c.ref.position()) <= 0.02);

    SUBCASE("returned trajectory replays and respects bounds") {
        const auto replay = rollout(c.chi0, r.controls, cfg.dt);
        CHECK(replay == r.states);
        for (const auto& u : r.controls) {
            CHECK(std::abs(u.v) <= cfg.vMax);
            CHECK(std::abs(u.omega) <= cfg.omegaMax);
        }
        for (std::size_t i = 1; i < r.costHistory.size(); ++i) CHECK(r.costHistory[i] <= r.costHistory[i - 1]);
    }
}

TEST_CASE("impossible clearance throws") {
    MpcConfig cfg;
    cfg.horizon = 10;
    cfg.maxIterations = 50;
    // Start inside the clearance band of a wall that surrounds the tool.
    const std::vector<Segment> box{{{-0.01, -0.01}, {0.01, -0.01}}, {{0.01, -0.01}, {0.01, 0.01}},
                                   {{0.01, 0.01}, {-0.01, 0.01}}, {{-0.01, 0.01}, {-0.01, -0.01}}};
    CHECK_THROWS_AS(refine({0, 0, 0}, {0.3, 0, 0}, box, cfg), InfeasibleTrajectory);
}

TEST_CASE("config validation") {
    MpcConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.horizon = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.Q(0, 0) = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

}  // TEST_SUITE
