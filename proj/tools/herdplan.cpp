#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "herdplan/batch.hpp"
#include "herdplan/report.hpp"
#include "herdplan/table2.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEpisodeFailed = 2;
constexpr int kExitUsage = 64;

void configureLogging() {
    auto logger = spdlog::stderr_color_mt("herdplan");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("HERDPLAN_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string_view(env) != "off") {
            spdlog::warn("HERDPLAN_LOG='{}' is not a level (trace, debug, info, warn, error, critical, off)", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

int runCommand(const std::string& path, std::optional<std::uint64_t> seed, const std::string& policy,
               const std::string& out) {
    herdplan::Scenario scenario;
    try {
        scenario = herdplan::loadScenario(path);
        if (seed) scenario.world.rngSeed = *seed;
        if (!policy.empty()) scenario.policy = herdplan::parsePolicy(policy);
        herdplan::initWorld(scenario.world, scenario.distribution);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    std::string dir = out;
    if (dir.empty()) dir = scenario.outputDir;
    if (dir.empty()) dir = fmt::format("runs/{}_seed{}", scenario.name, scenario.world.rngSeed);
    try {
        auto verifier = herdplan::makeVerifier(scenario, (std::filesystem::path(dir) / "verifier").string());
        const auto result = herdplan::runEpisode(scenario, verifier.get());
        herdplan::writeEpisodeOutputs(dir, result, scenario, true);
        herdplan::writeSummary(std::cout, result, true);
        std::cout << "output: " << dir << '\n';
        return result.success ? kExitOk : kExitEpisodeFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitEpisodeFailed;
    }
}

int table2Command() {
    std::cout << herdplan::formatTable2(herdplan::computeTable2());
    return kExitOk;
}

std::vector<std::uint64_t> parseSeeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        std::uint64_t value = 0;
        const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
            throw std::invalid_argument("--seeds: '" + item + "' is not a seed");
        }
        seeds.push_back(value);
        pos = comma + 1;
    }
    if (seeds.empty()) throw std::invalid_argument("--seeds needs at least one seed");
    return seeds;
}

int batchCommand(const std::string& dir, const std::string& seeds, unsigned jobs, const std::string& policy,
                 const std::string& out) {
    herdplan::BatchOptions options;
    options.jobs = jobs;
    std::vector<herdplan::BatchRow> rows;
    try {
        options.seeds = parseSeeds(seeds);
        if (!policy.empty()) options.policy = herdplan::parsePolicy(policy);
        if (!out.empty()) options.outputDir = out;
        rows = herdplan::runBatch(dir, options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const std::string csv = herdplan::batchCsv(rows);
    std::cout << csv;
    if (!out.empty()) {
        std::ofstream f(std::filesystem::path(out) / "summary.csv");
        f << csv;
        if (!f) {
            std::cerr << "error: cannot write " << out << "/summary.csv\n";
            return kExitEpisodeFailed;
        }
    }
    for (const auto& r : rows) {
        if (!r.success) return kExitEpisodeFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    configureLogging();
    CLI::App app{"Particle herding planner and simulator"};
    app.require_subcommand(1);

    std::string scenarioPath, policy, out;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run one episode and write metrics.csv, actions.log, summary.txt and frames");
    run->add_option("scenario", scenarioPath, "Scenario file")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--policy", policy, "herding or direct")->check(CLI::IsMember({"herding", "direct", "direct-push"}));
    run->add_option("--out", out, "Output directory");

    app.add_subcommand("table2", "Recompute the cohesion comparison table");

    std::string batchDir;
    std::string seeds;
    unsigned jobs = 0;
    auto* batch = app.add_subcommand("batch", "Run every scenario in a directory for each seed; CSV on stdout");
    batch->add_option("dir", batchDir, "Directory of scenario files")->required();
    batch->add_option("--seeds", seeds, "Comma-separated seeds, e.g. 1,2,3")->required();
    batch->add_option("--jobs,-j", jobs, "Worker threads (default: hardware threads)");
    batch->add_option("--policy", policy, "Override every scenario's policy")
        ->check(CLI::IsMember({"herding", "direct", "direct-push"}));
    batch->add_option("--out", out, "Write per-episode outputs and summary.csv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (run->parsed()) return runCommand(scenarioPath, seed, policy, out);
    if (batch->parsed()) return batchCommand(batchDir, seeds, jobs, policy, out);
    return table2Command();
}
