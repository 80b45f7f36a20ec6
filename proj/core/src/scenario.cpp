#include "herdplan/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

namespace herdplan {

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        const auto mark = node.Mark();
        if (mark.is_null()) {
            throw ScenarioError(source_ + ": " + message);
        }
        throw ScenarioError(source_ + ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1) +
                            ": " + message);
    }

    [[noreturn]] void fail(const std::string& message) const { throw ScenarioError(source_ + ": " + message); }

    void expectMap(const YAML::Node& node, const std::string& what) const {
        if (!node.IsMap()) fail(node, what + " must be a mapping");
    }

    void allowKeys(const YAML::Node& map, const std::string& section, std::initializer_list<std::string_view> keys) const {
        expectMap(map, section.empty() ? std::string("scenario") : "'" + section + "'");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
                fail(kv.first, "unknown key '" + (section.empty() ? key : section + "." + key) + "'");
            }
        }
    }

    double number(const YAML::Node& n, const std::string& what) const {
        if (!n.IsScalar()) fail(n, what + " must be a number");
        try {
            const double v = n.as<double>();
            if (!std::isfinite(v)) fail(n, what + " must be finite");
            return v;
        } catch (const YAML::BadConversion&) {
            fail(n, what + " must be a number, got '" + n.Scalar() + "'");
        }
    }

    std::uint64_t unsignedInt(const YAML::Node& n, const std::string& what) const {
        if (!n.IsScalar() || n.Scalar().empty() || n.Scalar().front() == '-') {
            fail(n, what + " must be a non-negative integer");
        }
        try {
            return n.as<std::uint64_t>();
        } catch (const YAML::BadConversion&) {
            fail(n, what + " must be a non-negative integer, got '" + n.Scalar() + "'");
        }
    }

    int integer(const YAML::Node& n, const std::string& what) const {
        const auto v = unsignedInt(n, what);
        if (v > 1000000000ULL) fail(n, what + " is too large");
        return static_cast<int>(v);
    }

    std::string text(const YAML::Node& n, const std::string& what) const {
        if (!n.IsScalar()) fail(n, what + " must be a string");
        return n.Scalar();
    }

    std::vector<double> numbers(const YAML::Node& n, std::size_t count, const std::string& what) const {
        if (!n.IsSequence() || n.size() != count) {
            fail(n, what + " must be a list of " + std::to_string(count) + " numbers");
        }
        std::vector<double> out;
        for (const auto& item : n) out.push_back(number(item, what));
        return out;
    }

    Point2 point(const YAML::Node& n, const std::string& what) const {
        const auto v = numbers(n, 2, what);
        return {v[0], v[1]};
    }

    Rect rect(const YAML::Node& n, const std::string& what) const {
        const auto v = numbers(n, 4, what + " [xmin, ymin, xmax, ymax]");
        if (!(v[0] < v[2]) || !(v[1] < v[3])) fail(n, what + " must have xmin < xmax and ymin < ymax");
        return {v[0], v[1], v[2], v[3]};
    }

private:
    std::string source_;
};

void readWorld(const Reader& rd, const YAML::Node& n, WorldConfig& w) {
    rd.allowKeys(n, "world", {"arena", "walls", "gate", "gate_width", "container", "particle_radius", "tool",
                              "substep", "relax_iterations", "max_relax_iterations", "overlap_tolerance", "link_gap",
                              "parked_pose"});
    if (n["arena"]) w.arena = rd.rect(n["arena"], "world.arena");
    if (n["container"]) w.container = rd.rect(n["container"], "world.container");
    if (n["gate"]) w.gate = rd.point(n["gate"], "world.gate");
    if (n["gate_width"]) w.gateWidth = rd.number(n["gate_width"], "world.gate_width");
    if (n["particle_radius"]) w.particleRadius = rd.number(n["particle_radius"], "world.particle_radius");
    if (n["substep"]) w.substep = rd.number(n["substep"], "world.substep");
    if (n["relax_iterations"]) w.relaxIterations = rd.integer(n["relax_iterations"], "world.relax_iterations");
    if (n["max_relax_iterations"]) {
        w.maxRelaxIterations = rd.integer(n["max_relax_iterations"], "world.max_relax_iterations");
    }
    if (n["overlap_tolerance"]) w.overlapTolerance = rd.number(n["overlap_tolerance"], "world.overlap_tolerance");
    if (n["link_gap"]) w.linkGap = rd.number(n["link_gap"], "world.link_gap");
    if (n["parked_pose"]) {
        const auto v = rd.numbers(n["parked_pose"], 3, "world.parked_pose [x, y, theta]");
        w.parkedPose = {v[0], v[1], wrapAngle(v[2])};
    }
    if (const auto t = n["tool"]) {
        rd.allowKeys(t, "world.tool", {"crossbar", "stem"});
        if (t["crossbar"]) w.tool.crossbarLength = rd.number(t["crossbar"], "world.tool.crossbar");
        if (t["stem"]) w.tool.stemLength = rd.number(t["stem"], "world.tool.stem");
    }
    if (const auto walls = n["walls"]) {
        if (!walls.IsSequence()) rd.fail(walls, "world.walls must be a list of [x1, y1, x2, y2]");
        w.walls.clear();
        for (const auto& s : walls) {
            const auto v = rd.numbers(s, 4, "wall [x1, y1, x2, y2]");
            if (std::hypot(v[2] - v[0], v[3] - v[1]) <= kGeomTol) rd.fail(s, "wall endpoints coincide");
            w.walls.push_back({{v[0], v[1]}, {v[2], v[3]}});
        }
    }
}

void readDistribution(const Reader& rd, const YAML::Node& n, Distribution& d, const std::string& baseDir) {
    rd.allowKeys(n, "distribution",
                 {"shape", "count", "center", "radius", "half_extent", "inner_radius", "outer_radius", "file"});
    if (!n["shape"]) rd.fail(n, "distribution.shape is required");
    const auto shape = rd.text(n["shape"], "distribution.shape");
    auto need = [&](const char* key) {
        if (!n[key]) rd.fail(n, std::string("distribution.") + key + " is required for shape '" + shape + "'");
        return n[key];
    };
    auto positive = [&](const char* key) {
        const double v = rd.number(need(key), std::string("distribution.") + key);
        if (!(v > 0.0)) rd.fail(n[key], std::string("distribution.") + key + " must be positive");
        return v;
    };
    if (shape == "points") {
        d.shape = Distribution::Shape::PointsFile;
        const auto file = rd.text(need("file"), "distribution.file");
        const std::filesystem::path p(file);
        d.pointsFile = p.is_absolute() ? file : (std::filesystem::path(baseDir) / p).lexically_normal().string();
        return;
    }
    d.count = rd.unsignedInt(need("count"), "distribution.count");
    if (d.count == 0) rd.fail(n["count"], "distribution.count must be positive");
    d.center = rd.point(need("center"), "distribution.center");
    if (shape == "disc") {
        d.shape = Distribution::Shape::Disc;
        d.extent = {positive("radius"), 0.0};
    } else if (shape == "rect") {
        d.shape = Distribution::Shape::Rect;
        d.extent = rd.point(need("half_extent"), "distribution.half_extent");
        if (!(d.extent.x > 0.0) || !(d.extent.y > 0.0)) rd.fail(n["half_extent"], "half_extent must be positive");
    } else if (shape == "annulus") {
        d.shape = Distribution::Shape::Annulus;
        d.extent = {rd.number(need("inner_radius"), "distribution.inner_radius"), positive("outer_radius")};
        if (!(d.extent.x >= 0.0) || !(d.extent.x < d.extent.y)) {
            rd.fail(n["inner_radius"], "inner_radius must be in [0, outer_radius)");
        }
    } else {
        rd.fail(n["shape"], "distribution.shape must be disc, rect, annulus or points, got '" + shape + "'");
    }
}

void readPlanner(const Reader& rd, const YAML::Node& n, PlannerThresholds& p) {
    rd.allowKeys(n, "planner",
                 {"push_threshold_count", "push_threshold_distance", "max_actions", "targets", "zeta_threshold"});
    if (n["push_threshold_count"]) p.pushThresholdCount = rd.unsignedInt(n["push_threshold_count"], "planner.push_threshold_count");
    if (n["push_threshold_distance"]) {
        p.pushThresholdDistance = rd.number(n["push_threshold_distance"], "planner.push_threshold_distance");
    }
    if (n["max_actions"]) p.maxActions = rd.unsignedInt(n["max_actions"], "planner.max_actions");
    if (n["targets"]) p.targetCount = rd.unsignedInt(n["targets"], "planner.targets");
    if (n["zeta_threshold"]) p.zetaThreshold = rd.number(n["zeta_threshold"], "planner.zeta_threshold");
}

void readMpc(const Reader& rd, const YAML::Node& n, MpcConfig& m) {
    rd.allowKeys(n, "mpc", {"horizon", "dt", "q", "r", "d_min", "v_max", "omega_max", "penalty_weight",
                            "max_iterations", "step_size", "convergence_tol", "penalty_rounds", "clearance_margin"});
    if (n["horizon"]) m.horizon = rd.integer(n["horizon"], "mpc.horizon");
    if (n["dt"]) m.dt = rd.number(n["dt"], "mpc.dt");
    if (n["q"]) {
        const auto v = rd.numbers(n["q"], 3, "mpc.q (diagonal)");
        m.Q = Eigen::Vector3d(v[0], v[1], v[2]).asDiagonal();
    }
    if (n["r"]) {
        const auto v = rd.numbers(n["r"], 2, "mpc.r (diagonal)");
        m.R = Eigen::Vector2d(v[0], v[1]).asDiagonal();
    }
    if (n["d_min"]) m.dMin = rd.number(n["d_min"], "mpc.d_min");
    if (n["v_max"]) m.vMax = rd.number(n["v_max"], "mpc.v_max");
    if (n["omega_max"]) m.omegaMax = rd.number(n["omega_max"], "mpc.omega_max");
    if (n["penalty_weight"]) m.penaltyWeight = rd.number(n["penalty_weight"], "mpc.penalty_weight");
    if (n["max_iterations"]) m.maxIterations = rd.integer(n["max_iterations"], "mpc.max_iterations");
    if (n["step_size"]) m.stepSize = rd.number(n["step_size"], "mpc.step_size");
    if (n["convergence_tol"]) m.convergenceTol = rd.number(n["convergence_tol"], "mpc.convergence_tol");
    if (n["penalty_rounds"]) m.penaltyRounds = rd.integer(n["penalty_rounds"], "mpc.penalty_rounds");
    if (n["clearance_margin"]) m.clearanceMargin = rd.number(n["clearance_margin"], "mpc.clearance_margin");
}

void readContour(const Reader& rd, const YAML::Node& n, ContourParams& c) {
    rd.allowKeys(n, "contour", {"harmonics", "trace_samples", "reconstruct_samples", "resolution", "dilation"});
    if (n["harmonics"]) c.harmonics = rd.integer(n["harmonics"], "contour.harmonics");
    if (n["trace_samples"]) c.traceSamples = rd.unsignedInt(n["trace_samples"], "contour.trace_samples");
    if (n["reconstruct_samples"]) {
        c.reconstructSamples = rd.unsignedInt(n["reconstruct_samples"], "contour.reconstruct_samples");
    }
    if (n["resolution"]) c.resolution = rd.number(n["resolution"], "contour.resolution");
    if (n["dilation"]) c.dilation = rd.number(n["dilation"], "contour.dilation");
    if (c.traceSamples < static_cast<std::size_t>(2 * c.harmonics + 1)) {
        rd.fail(n, "contour.trace_samples must be at least 2 * harmonics + 1");
    }
    if (c.reconstructSamples < 32) rd.fail(n, "contour.reconstruct_samples must be >= 32");
}

}  // namespace

Scenario parseScenario(const std::string& textIn, const std::string& sourceName, const std::string& baseDir) {
    const Reader rd(sourceName);
    YAML::Node root;
    try {
        root = YAML::Load(textIn);
    } catch (const YAML::ParserException& e) {
        throw ScenarioError(sourceName + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                            ": " + e.msg);
    }
    if (!root.IsMap()) rd.fail("scenario must be a YAML mapping");
    rd.allowKeys(root, "", {"name", "seed", "policy", "output_dir", "gate_overshoot", "waypoint_slack", "world", "distribution",
                            "planner", "mpc", "contour", "verifier"});

    Scenario s;
    s.world.walls = {{{-0.5, 0.0}, {-0.1, 0.0}}, {{0.1, 0.0}, {0.5, 0.0}}};
    if (root["name"]) s.name = rd.text(root["name"], "name");
    if (root["world"]) readWorld(rd, root["world"], s.world);
    if (root["seed"]) s.world.rngSeed = rd.unsignedInt(root["seed"], "seed");
    if (root["policy"]) {
        try {
            s.policy = parsePolicy(rd.text(root["policy"], "policy"));
        } catch (const std::invalid_argument& e) {
            rd.fail(root["policy"], e.what());
        }
    }
    if (root["output_dir"]) s.outputDir = rd.text(root["output_dir"], "output_dir");
    if (root["gate_overshoot"]) s.gateOvershoot = rd.number(root["gate_overshoot"], "gate_overshoot");
    if (root["waypoint_slack"]) s.waypointSlack = rd.number(root["waypoint_slack"], "waypoint_slack");
    if (!root["distribution"]) rd.fail(root, "'distribution' section is required");
    readDistribution(rd, root["distribution"], s.distribution, baseDir);
    if (root["planner"]) readPlanner(rd, root["planner"], s.planner);
    s.mpc.dMin = 0.5 * s.world.tool.crossbarLength;
    if (root["mpc"]) readMpc(rd, root["mpc"], s.mpc);
    if (root["contour"]) readContour(rd, root["contour"], s.contour);
    if (const auto v = root["verifier"]) {
        if (!v.IsSequence() || v.size() == 0) rd.fail(v, "verifier must be a non-empty list: [program, args...]");
        for (const auto& arg : v) s.verifierCommand.push_back(rd.text(arg, "verifier argument"));
    }

    try {
        s.world.validate();
        s.mpc.validate();
        s.planner.validate();
    } catch (const std::invalid_argument& e) {
        rd.fail(e.what());
    }
    if (s.gateOvershoot < 0.0) rd.fail(root["gate_overshoot"], "gate_overshoot must be >= 0");
    if (s.waypointSlack < 0.0) rd.fail(root["waypoint_slack"], "waypoint_slack must be >= 0");
    if (s.name.empty()) s.name = "scenario";
    return s;
}

Scenario loadScenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError(path + ": cannot open scenario file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    auto s = parseScenario(buf.str(), path, dir.empty() ? "." : dir.string());
    if (s.name == "scenario") s.name = std::filesystem::path(path).stem().string();
    return s;
}

}  // namespace herdplan
