// Microbenchmarks for the hot paths: speckle synthesis, the windowed texture
// operators (the per-frame cost of the monitoring loop), and classifier
// prediction.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "lsi/classify.hpp"
#include "lsi/features.hpp"
#include "lsi/image.hpp"
#include "lsi/speckle.hpp"
#include "lsi/texture.hpp"

namespace {

lsi::GrayImage speckle_window(int side, std::uint64_t seed) {
    lsi::PhasorFieldConfig cfg;
    cfg.width = side;
    cfg.height = side;
    cfg.n_phasors = 100;
    cfg.seed = seed;
    return lsi::simulate_speckle(cfg);
}

void BM_SimulateField(benchmark::State& state) {
    lsi::PhasorFieldConfig cfg;
    cfg.width = static_cast<int>(state.range(0));
    cfg.height = static_cast<int>(state.range(0));
    cfg.n_phasors = 100;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        cfg.seed = seed++;
        benchmark::DoNotOptimize(lsi::simulate_speckle_field(cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_SimulateField)->Arg(64)->Arg(128);

void BM_MeasureWindow(benchmark::State& state) {
    const lsi::GrayImage window = speckle_window(static_cast<int>(state.range(0)), 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lsi::measure_window(window));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_MeasureWindow)->Arg(50)->Arg(80);

void BM_SingleOperator(benchmark::State& state) {
    const lsi::GrayImage window = speckle_window(50, 42);
    const lsi::KernelSize kernel(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lsi::levine(window, kernel));
    }
}
BENCHMARK(BM_SingleOperator)->Arg(3)->Arg(5);

void BM_SuggestRois(benchmark::State& state) {
    const lsi::GrayImage img = speckle_window(256, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lsi::suggest_rois(img, 4, 16));
    }
}
BENCHMARK(BM_SuggestRois);

void BM_PredictKnn(benchmark::State& state) {
    const lsi::Dataset ds = lsi::sample_dataset();
    const lsi::KnnModel model = lsi::knn_train(ds, 1, true);
    const lsi::FeatureVector query = ds.row(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lsi::knn_predict(model, query));
    }
}
BENCHMARK(BM_PredictKnn);

void BM_PredictNb(benchmark::State& state) {
    const lsi::Dataset ds = lsi::sample_dataset();
    const lsi::NaiveBayesModel model = lsi::nb_train(ds, 5, 0.1);
    const lsi::FeatureVector query = ds.row(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lsi::nb_predict(model, query));
    }
}
BENCHMARK(BM_PredictNb);

} // namespace

BENCHMARK_MAIN();
