#include "herdplan/batch.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "herdplan/report.hpp"

namespace herdplan {

namespace {

std::string csvField(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

BatchRow summarize(const EpisodeResult& r) {
    BatchRow row;
    row.scenario = r.scenario;
    row.seed = r.seed;
    row.policy = r.policy;
    row.success = r.success;
    row.failure = r.failure;
    row.initialCount = r.initialCount;
    row.delivered = r.delivered;
    row.actions = r.log.rows.size();
    row.finalStageZeta = r.finalStageZeta;
    row.finalStageComponents = r.finalStageComponents;
    row.herdEndComponents = r.herdEndComponents;
    row.endComponents = r.endComponents;
    row.maxComponents = r.maxComponents;
    row.invariantViolations = r.invariantViolations;
    row.minPairDistance = r.minPairDistance;
    return row;
}

std::vector<std::filesystem::path> listScenarioFiles(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw std::runtime_error("'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(entry.path());
    }
    if (files.empty()) throw std::runtime_error("no scenario files in '" + dir.string() + "'");
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<BatchRow> runBatch(const std::filesystem::path& scenarioDir, const BatchOptions& options) {
    if (options.seeds.empty()) throw std::invalid_argument("batch: empty seed list");
    std::vector<Scenario> jobs;
    for (const auto& file : listScenarioFiles(scenarioDir)) {
        const Scenario base = loadScenario(file.string());
        for (const auto seed : options.seeds) {
            Scenario s = base;
            s.world.rngSeed = seed;
            if (options.policy) s.policy = *options.policy;
            jobs.push_back(std::move(s));
        }
    }

    std::vector<BatchRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Scenario& s = jobs[i];
            const std::string tag = fmt::format("{}_seed{}", s.name, s.world.rngSeed);
            try {
                const std::string dir = options.outputDir ? (std::filesystem::path(*options.outputDir) / tag).string() : "";
                auto verifier = makeVerifier(s, dir.empty() ? (std::filesystem::temp_directory_path() / tag).string() : dir);
                EpisodeOptions eo;
                eo.recordFrames = options.outputDir.has_value();
                const auto result = runEpisode(s, verifier.get(), eo);
                if (!dir.empty()) writeEpisodeOutputs(dir, result, s, false);
                rows[i] = summarize(result);
            } catch (const std::exception& e) {
                spdlog::error("{}: {}", tag, e.what());
                rows[i].scenario = s.name;
                rows[i].seed = s.world.rngSeed;
                rows[i].policy = s.policy;
                rows[i].failure = e.what();
            }
            spdlog::info("{}: {}", tag, rows[i].success ? "ok" : rows[i].failure);
        }
    };
    unsigned n = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, jobs.size()));
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    pool.clear();
    return rows;
}

std::string batchCsvHeader() {
    return "scenario,seed,policy,success,delivered,initial,deliveredFraction,actions,finalStageZeta,"
           "finalStageComponents,herdEndComponents,endComponents,maxComponents,invariantViolations,minPairDistance,"
           "failure";
}

std::string batchCsvRow(const BatchRow& r) {
    const double fraction = r.initialCount ? static_cast<double>(r.delivered) / static_cast<double>(r.initialCount) : 0.0;
    return fmt::format("{},{},{},{},{},{},{:.4f},{},{:.4f},{},{},{},{},{},{:.9f},{}", csvField(r.scenario), r.seed,
                       toString(r.policy), r.success ? 1 : 0, r.delivered, r.initialCount, fraction, r.actions,
                       r.finalStageZeta, r.finalStageComponents, r.herdEndComponents, r.endComponents,
                       r.maxComponents, r.invariantViolations, r.minPairDistance, csvField(r.failure));
}

std::string batchCsv(const std::vector<BatchRow>& rows) {
    std::string out = batchCsvHeader() + '\n';
    for (const auto& r : rows) out += batchCsvRow(r) + '\n';
    return out;
}

}  // namespace herdplan
