#include "herdplan/report.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace herdplan {

std::string metricsCsvHeader() {
    return "stepIndex,action,remaining,delivered,pushedThisAction,efficiency,centroidGateDist,groupArea,density,"
           "regularity,zeta,components";
}

std::string metricsCsvRow(const LogRow& row) {
    const auto& m = row.metrics;
    return fmt::format("{},{},{},{},{},{:.3f},{:.6f},{:.8f},{:.6f},{:.6f},{:.4f},{}", row.stepIndex,
                       toString(row.action), m.remainingCount, m.deliveredCount, m.pushedThisAction,
                       m.pushingEfficiency, m.centroidGateDistance, m.groupArea, m.cohesion.density,
                       m.cohesion.regularity, m.cohesion.zeta, m.connectedComponents);
}

void writeMetricsCsv(std::ostream& out, const RunLog& log) {
    out << metricsCsvHeader() << '\n';
    for (const auto& row : log.rows) {
        out << metricsCsvRow(row) << '\n';
    }
}

void writeActionsLog(std::ostream& out, const RunLog& log) {
    for (const auto& row : log.rows) {
        out << fmt::format("{:4} {}", row.stepIndex, toString(row.action));
        if (row.action == ActionKind::Herd || row.action == ActionKind::Push) {
            out << fmt::format(" pushed={} remaining={}", row.metrics.pushedThisAction, row.metrics.remainingCount);
        }
        if (!row.note.empty()) out << " : " << row.note;
        out << '\n';
    }
}

namespace {

constexpr double kPixelsPerMeter = 800.0;

struct Canvas {
    Rect view;
    double sx(double x) const { return (x - view.xMin) * kPixelsPerMeter; }
    double sy(double y) const { return (view.yMax - y) * kPixelsPerMeter; }
    std::string pt(Point2 p) const { return fmt::format("{:.2f},{:.2f}", sx(p.x), sy(p.y)); }
};

std::string polyline(const Canvas& c, const std::vector<Point2>& pts, const char* style, bool closed) {
    std::string s = fmt::format("<{} points=\"", closed ? "polygon" : "polyline");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) s += ' ';
        s += c.pt(pts[i]);
    }
    s += fmt::format("\" {}/>\n", style);
    return s;
}

}  // namespace

std::string frameSvg(const Frame& frame, const WorldConfig& world) {
    const Canvas c{world.arena};
    std::ostringstream svg;
    svg << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
        world.arena.width() * kPixelsPerMeter, world.arena.height() * kPixelsPerMeter,
        world.arena.width() * kPixelsPerMeter, world.arena.height() * kPixelsPerMeter);
    svg << fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"white\" stroke=\"black\"/>\n",
                       world.arena.width() * kPixelsPerMeter, world.arena.height() * kPixelsPerMeter);
    const auto& box = world.container;
    svg << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#cccccc\"/>\n",
                       c.sx(box.xMin), c.sy(box.yMax), box.width() * kPixelsPerMeter, box.height() * kPixelsPerMeter);
    for (const auto& w : world.walls) {
        svg << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#555555\" stroke-width=\"4\"/>\n",
                           c.sx(w.a.x), c.sy(w.a.y), c.sx(w.b.x), c.sy(w.b.y));
    }
    const auto gate = world.gateOpening();
    svg << fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#8b4513\" stroke-width=\"4\"/>\n",
                       c.sx(gate.a.x), c.sy(gate.a.y), c.sx(gate.b.x), c.sy(gate.b.y));
    const double pr = world.particleRadius * kPixelsPerMeter;
    for (const auto& p : frame.particles) {
        svg << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"#999999\"/>\n", c.sx(p.x), c.sy(p.y), pr);
    }
    if (frame.contour.size() >= 3) {
        svg << polyline(c, frame.contour, "fill=\"none\" stroke=\"blue\" stroke-width=\"2\"", true);
    }
    for (const auto& cand : frame.candidates) {
        svg << polyline(c, cand, "fill=\"none\" stroke=\"#f5e79e\" stroke-width=\"2\"", false);
    }
    if (!frame.waypoints.empty()) {
        svg << polyline(c, frame.waypoints, "fill=\"none\" stroke=\"#e6c200\" stroke-width=\"3\"", false);
        for (const auto& w : frame.waypoints) {
            svg << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"black\"/>\n", c.sx(w.x), c.sy(w.y));
        }
    }
    if (frame.toolPath.size() >= 2) {
        std::vector<Point2> path;
        for (const auto& t : frame.toolPath) path.push_back(t.position());
        svg << polyline(c, path, "fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"", false);
    }
    svg << "</svg>\n";
    return svg.str();
}

void writeSummary(std::ostream& out, const EpisodeResult& r, bool withTiming) {
    out << "scenario: " << r.scenario << '\n';
    out << "seed: " << r.seed << '\n';
    out << "policy: " << toString(r.policy) << '\n';
    out << "success: " << (r.success ? "true" : "false") << '\n';
    if (!r.failure.empty()) out << "failure: " << r.failure << '\n';
    out << fmt::format("delivered: {}/{}\n", r.delivered, r.initialCount);
    out << fmt::format("delivered_fraction: {:.4f}\n", r.deliveredFraction());
    out << "actions: " << r.log.rows.size() << '\n';
    out << fmt::format("final_stage_zeta: {:.4f}\n", r.finalStageZeta);
    out << "final_stage_components: " << r.finalStageComponents << '\n';
    out << "herd_end_components: " << r.herdEndComponents << '\n';
    out << "end_components: " << r.endComponents << '\n';
    out << "max_components: " << r.maxComponents << '\n';
    out << "invariant_violations: " << r.invariantViolations << '\n';
    out << fmt::format("min_pair_distance: {:.9f}\n", r.minPairDistance);
    if (withTiming) out << fmt::format("wall_clock_s: {:.3f}\n", r.wallSeconds);
}

void writeEpisodeOutputs(const std::string& dir, const EpisodeResult& result, const Scenario& scenario,
                         bool withTiming) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root / "frames");
    auto open = [](const fs::path& p) {
        std::ofstream f(p);
        if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
        return f;
    };
    {
        auto f = open(root / "metrics.csv");
        writeMetricsCsv(f, result.log);
    }
    {
        auto f = open(root / "actions.log");
        writeActionsLog(f, result.log);
    }
    {
        auto f = open(root / "summary.txt");
        writeSummary(f, result, withTiming);
    }
    for (const auto& row : result.log.rows) {
        if (row.frame < 0) continue;
        auto f = open(root / "frames" / fmt::format("frame_{:03}.svg", row.stepIndex));
        f << frameSvg(result.log.frames[static_cast<std::size_t>(row.frame)], scenario.world);
    }
}

}  // namespace herdplan
