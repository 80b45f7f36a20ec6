#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "herdplan/contour.hpp"
#include "herdplan/episode.hpp"
#include "herdplan/mpc.hpp"
#include "herdplan/scenario.hpp"
#include "herdplan/sim.hpp"

using namespace herdplan;

namespace {

Scenario disc74() {
    auto s = loadScenario(HERDPLAN_SCENARIO_DIR "/disc74.yaml");
    s.world.rngSeed = 7;
    return s;
}

ContourSamples ellipse(std::size_t m) {
    ContourSamples z;
    for (std::size_t k = 0; k < m; ++k) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        z.points.push_back({0.12 * std::cos(t), 0.05 * std::sin(t)});
    }
    return z;
}

void BM_FitFourier(benchmark::State& st) {
    const auto z = ellipse(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fitFourier(z, 5));
}
BENCHMARK(BM_FitFourier)->Arg(64)->Arg(256)->Arg(1024);

void BM_RasterizeTrace(benchmark::State& st) {
    const auto s = disc74();
    const auto world = initWorld(s.world, s.distribution);
    const double r = s.world.particleRadius;
    for (auto _ : st) {
        const auto grid = rasterize(world.particles, r, r, r / 4);
        benchmark::DoNotOptimize(traceBoundary(grid, 256));
    }
}
BENCHMARK(BM_RasterizeTrace)->Unit(benchmark::kMicrosecond);

void BM_Refine(benchmark::State& st) {
    MpcConfig cfg;
    cfg.horizon = static_cast<int>(st.range(0));
    const std::vector<Segment> walls{{{0.25, -0.4}, {0.25, -0.02}}};
    for (auto _ : st) benchmark::DoNotOptimize(refine({0, 0, 0}, {0.5, 0, 0}, walls, cfg));
}
BENCHMARK(BM_Refine)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_StepTool(benchmark::State& st) {
    const auto s = disc74();
    const auto start = initWorld(s.world, s.distribution);
    const auto placed = placeTool(start, {0.0, 0.62, -std::numbers::pi / 2}, s.world);
    for (auto _ : st) benchmark::DoNotOptimize(stepTool(placed, {0.0, 0.30, -std::numbers::pi / 2}, s.world));
}
BENCHMARK(BM_StepTool)->Unit(benchmark::kMillisecond);

void BM_Episode(benchmark::State& st) {
    const auto s = disc74();
    EpisodeOptions opts;
    opts.recordFrames = false;
    for (auto _ : st) benchmark::DoNotOptimize(runEpisode(s, nullptr, opts));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
