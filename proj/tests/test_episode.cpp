#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "herdplan/batch.hpp"
#include "herdplan/report.hpp"

using namespace herdplan;

namespace {

Scenario bundled(const std::string& name) {
    return loadScenario(std::string(HERDPLAN_SCENARIO_DIR) + "/" + name + ".yaml");
}

std::string metricsOf(const EpisodeResult& r) {
    std::ostringstream out;
    writeMetricsCsv(out, r.log);
    return out.str();
}

std::string actionString(const EpisodeResult& r) {
    std::string s;
    for (const auto& row : r.log.rows) s += std::string(toString(row.action)) + ' ';
    return s;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("episode") {

TEST_CASE("metrics header and row format") {
    CHECK(metricsCsvHeader() ==
          "stepIndex,action,remaining,delivered,pushedThisAction,efficiency,centroidGateDist,groupArea,density,"
          "regularity,zeta,components");
    LogRow row;
    row.stepIndex = 4;
    row.action = ActionKind::Push;
    row.metrics.remainingCount = 12;
    row.metrics.deliveredCount = 62;
    row.metrics.pushedThisAction = 3;
    row.metrics.pushingEfficiency = 3;
    row.metrics.centroidGateDistance = 0.1234567;
    row.metrics.groupArea = 0.0123456789;
    row.metrics.cohesion.density = 0.5;
    row.metrics.cohesion.regularity = 0.9348;
    row.metrics.cohesion.zeta = 46.74;
    row.metrics.connectedComponents = 1;
    CHECK(metricsCsvRow(row) == "4,Push,12,62,3,3.000,0.123457,0.01234568,0.500000,0.934800,46.7400,1");
}

TEST_CASE("a bundled episode succeeds with a well-formed action log") {
    const auto s = bundled("disc74");
    const auto r = runEpisode(s);
    CHECK(r.success);
    CHECK(r.deliveredFraction() == 1.0);
    CHECK(r.invariantViolations == 0);
    CHECK(std::regex_match(actionString(r), std::regex("Grasp (Herd Check )*(Push Check )+Release ")));
    for (std::size_t i = 0; i < r.log.rows.size(); ++i) CHECK(r.log.rows[i].stepIndex == i);
    CHECK(r.log.rows.back().metrics.remainingCount == 0);

    SUBCASE("outputs") {
        const auto dir = std::filesystem::temp_directory_path() / "herdplan_episode_out";
        std::filesystem::remove_all(dir);
        writeEpisodeOutputs(dir.string(), r, s, false);
        const auto csv = slurp(dir / "metrics.csv");
        CHECK(csv == metricsOf(r));
        CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.log.rows.size() + 1));
        CHECK(slurp(dir / "summary.txt").find("success: true") != std::string::npos);
        CHECK(slurp(dir / "summary.txt").find("wall_clock") == std::string::npos);
        CHECK(slurp(dir / "actions.log").find("Release") != std::string::npos);
        std::size_t frames = 0;
        for (const auto& e : std::filesystem::directory_iterator(dir / "frames")) {
            ++frames;
            const auto svg = slurp(e.path());
            CHECK(svg.rfind("<svg ", 0) == 0);
            CHECK(svg.find("</svg>") != std::string::npos);
            CHECK(svg.find("stroke=\"blue\"") != std::string::npos);
            CHECK(svg.find("#8b4513") != std::string::npos);
        }
        CHECK(frames == r.log.frames.size());
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("episodes are deterministic") {
    const auto s = bundled("rect95");
    const auto a = runEpisode(s);
    const auto b = runEpisode(s);
    CHECK(metricsOf(a) == metricsOf(b));
    const auto frameA = frameSvg(a.log.frames.at(3), s.world);
    CHECK(frameA == frameSvg(b.log.frames.at(3), s.world));
    EpisodeOptions quiet;
    quiet.recordFrames = false;
    const auto c = runEpisode(s, nullptr, quiet);
    CHECK(metricsOf(c) == metricsOf(a));
    CHECK(c.log.frames.empty());
}

TEST_CASE("echoing external verifier reproduces the ground-truth run") {
    auto s = bundled("disc74");
    s.world.rngSeed = 2;
    const auto truth = runEpisode(s);
    ExternalProcessVerifier ext({HERDPLAN_VERIFIER_ECHO},
                                (std::filesystem::temp_directory_path() / "herdplan_episode_echo").string());
    const auto echoed = runEpisode(s, &ext);
    CHECK(ext.fallbackCount() == 0);
    CHECK(metricsOf(echoed) == metricsOf(truth));
    CHECK(actionString(echoed) == actionString(truth));
    std::filesystem::remove_all(std::filesystem::temp_directory_path() / "herdplan_episode_echo");
}

TEST_CASE("scenario verifier command is used") {
    auto s = bundled("disc74");
    CHECK(makeVerifier(s, "unused") == nullptr);
    s.verifierCommand = {HERDPLAN_VERIFIER_ECHO};
    CHECK(makeVerifier(s, "unused") != nullptr);
}

TEST_CASE("action limit fails the episode") {
    auto s = bundled("disc74");
    s.planner.maxActions = 6;
    const auto r = runEpisode(s, nullptr, EpisodeOptions{false});
    CHECK_FALSE(r.success);
    CHECK(r.log.rows.size() == 6);
    CHECK(r.failure.find("action limit") != std::string::npos);
}

TEST_CASE("direct pushing splits the group") {
    auto s = bundled("disc74");
    s.policy = Policy::Direct;
    const auto r = runEpisode(s, nullptr, EpisodeOptions{false});
    CHECK(r.maxComponents > 1);
    CHECK(std::regex_match(actionString(r), std::regex("Grasp (Push Check )+Release ")));
}

TEST_CASE("candidate planning edge cases") {
    const auto s = bundled("disc74");
    WorldState w;
    CHECK(planCandidates(w, StepMetrics{}, s).trajectories.empty());
    w.particles = {{0.1, 0.3}};
    const auto one = planCandidates(w, StepMetrics{}, s);
    REQUIRE(one.trajectories.size() == 1);
    CHECK(one.trajectories[0].waypoints == std::vector<Point2>{{0.1, 0.3}, s.world.gate});
}

TEST_CASE("batch rows are ordered and reproducible") {
    const auto dir = std::filesystem::temp_directory_path() / "herdplan_batch_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const char* small = R"(seed: 1
distribution: {shape: disc, count: 12, center: [0.0, 0.3], radius: 0.06}
)";
    std::ofstream(dir / "b.yaml") << small;
    std::ofstream(dir / "a.yaml") << small;
    BatchOptions opt;
    opt.seeds = {5, 1, 3};
    opt.jobs = 3;
    const auto rows = runBatch(dir, opt);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].scenario == "a");
    CHECK(rows[0].seed == 5);
    CHECK(rows[2].seed == 3);
    CHECK(rows[3].scenario == "b");
    opt.jobs = 1;
    CHECK(batchCsv(runBatch(dir, opt)) == batchCsv(rows));
    CHECK(batchCsv(rows).rfind(batchCsvHeader() + "\n", 0) == 0);
    opt.seeds.clear();
    CHECK_THROWS_AS(runBatch(dir, opt), std::invalid_argument);
    CHECK_THROWS(listScenarioFiles(dir / "nothing"));
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
