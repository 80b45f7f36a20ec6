#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "herdplan/contour.hpp"
#include "herdplan/mpc.hpp"
#include "herdplan/planner.hpp"
#include "herdplan/sim.hpp"

namespace herdplan {

/// Everything an episode needs. Every tunable constant lives here.
struct Scenario {
    std::string name;
    WorldConfig world;
    Distribution distribution;
    PlannerThresholds planner;
    MpcConfig mpc;
    ContourParams contour;
    Policy policy = Policy::Herding;
    double gateOvershoot = 0.03;
    double waypointSlack = 0.01;
    std::string outputDir;
    /// Optional external verifier command line; ground truth when empty.
    std::vector<std::string> verifierCommand;
};

/// Malformed or invalid scenario; what() is "<file>:<line>:<column>: <message>" when a position is known.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a YAML scenario. Unknown keys, wrong types and out-of-range values
/// raise ScenarioError. Relative points-file paths resolve against the scenario's directory.
Scenario loadScenario(const std::string& path);
Scenario parseScenario(const std::string& text, const std::string& sourceName = "<scenario>",
                       const std::string& baseDir = ".");

}  // namespace herdplan
