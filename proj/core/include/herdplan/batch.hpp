#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "herdplan/episode.hpp"

namespace herdplan {

struct BatchOptions {
    std::vector<std::uint64_t> seeds;
    unsigned jobs = 0;                     // 0: one worker per hardware thread
    std::optional<Policy> policy;          // overrides every scenario's policy
    std::optional<std::string> outputDir;  // per-episode outputs under <dir>/<scenario>_seed<N>
};

struct BatchRow {
    std::string scenario;
    std::uint64_t seed = 0;
    Policy policy = Policy::Herding;
    bool success = false;
    std::string failure;
    std::size_t initialCount = 0;
    std::size_t delivered = 0;
    std::size_t actions = 0;
    double finalStageZeta = 0.0;
    std::size_t finalStageComponents = 0;
    std::size_t herdEndComponents = 0;
    std::size_t endComponents = 0;
    std::size_t maxComponents = 0;
    std::size_t invariantViolations = 0;
    double minPairDistance = 0.0;
};

BatchRow summarize(const EpisodeResult& result);

/// Sorted *.yaml / *.yml files directly inside `dir`. Throws std::runtime_error when there are none.
std::vector<std::filesystem::path> listScenarioFiles(const std::filesystem::path& dir);

/// Every scenario x seed episode, fanned out over a worker pool. Rows come back in
/// scenario-file order, then seed order, whatever order the workers finish in.
/// Scenario errors are raised before any episode starts; an exception inside one
/// episode becomes a failed row.
std::vector<BatchRow> runBatch(const std::filesystem::path& scenarioDir, const BatchOptions& options);

std::string batchCsvHeader();
std::string batchCsvRow(const BatchRow& row);
std::string batchCsv(const std::vector<BatchRow>& rows);

}  // namespace herdplan
