// Serial reference vs OpenMP kernel for each parallel hot path.

#include <benchmark/benchmark.h>

#include "aq/forest.hpp"
#include "aq/grid.hpp"
#include "aq/interpolation.hpp"
#include "aq/random.hpp"
#include "aq/spatial_stats.hpp"

using namespace aq;

namespace {

std::vector<SpatialSample> samples(std::size_t n) {
    Rng rng(1);
    std::vector<SpatialSample> s(n);
    for (auto& q : s) q = {77.0 + 0.5 * uniform01(rng), 28.4 + 0.5 * uniform01(rng), 80.0 + 20.0 * standard_normal(rng)};
    return s;
}

struct MoranSetup {
    std::vector<double> y;
    spatial::WeightMatrix w;
};

MoranSetup moran_setup() {
    const auto s = samples(38);
    std::vector<GeoPoint> pts;
    std::vector<double> y;
    for (const auto& q : s) {
        pts.push_back(q.location());
        y.push_back(q.value);
    }
    return {y, spatial::build_weights(pts, spatial::InverseDistance{})};
}

forest::Dataset forest_data() {
    Rng rng(2);
    forest::Dataset d;
    d.n_features = 7;
    for (int i = 0; i < 200; ++i) {
        double t = 0.0;
        for (int f = 0; f < 7; ++f) {
            const double x = standard_normal(rng);
            d.x.push_back(x);
            t += (f + 1) * x;
        }
        d.y.push_back(t + standard_normal(rng));
    }
    return d;
}

interp::GridSpec grid_for(std::span<const SpatialSample> s) {
    std::vector<GeoPoint> pts;
    for (const auto& q : s) pts.push_back(q.location());
    return interp::GridSpec::around(pts, 0.01);
}

const vario::VariogramModel kModel{vario::Family::Spherical, 3.0, 24.45, 0.28};

void BM_MoransTest_Serial(benchmark::State& st) {
    const auto m = moran_setup();
    for (auto _ : st) benchmark::DoNotOptimize(spatial::morans_test_serial(m.y, m.w, 999, 7));
}
void BM_MoransTest_Parallel(benchmark::State& st) {
    const auto m = moran_setup();
    for (auto _ : st) benchmark::DoNotOptimize(spatial::morans_test(m.y, m.w, 999, 7));
}

void BM_Forest_Serial(benchmark::State& st) {
    const auto d = forest_data();
    for (auto _ : st) benchmark::DoNotOptimize(forest::fit_forest_serial(d, {500, {}, 5, {}, 1}));
}
void BM_Forest_Parallel(benchmark::State& st) {
    const auto d = forest_data();
    for (auto _ : st) benchmark::DoNotOptimize(forest::fit_forest(d, {500, {}, 5, {}, 1}));
}

void BM_OkGrid_Serial(benchmark::State& st) {
    const auto s = samples(38);
    const interp::OrdinaryKriging ok(s, kModel);
    const auto g = grid_for(s);
    for (auto _ : st)
        benchmark::DoNotOptimize(interp::grid_interpolate_serial(g, [&](GeoPoint q) { return ok.predict(q); }));
}
void BM_OkGrid_Parallel(benchmark::State& st) {
    const auto s = samples(38);
    const interp::OrdinaryKriging ok(s, kModel);
    const auto g = grid_for(s);
    for (auto _ : st)
        benchmark::DoNotOptimize(interp::grid_interpolate(g, [&](GeoPoint q) { return ok.predict(q); }));
}

interp::FoldPredictor ok_predictor(const std::vector<SpatialSample>& s) {
    return [&s](std::span<const std::size_t> train, std::span<const std::size_t> test) {
        std::vector<SpatialSample> tr;
        for (std::size_t i : train) tr.push_back(s[i]);
        const interp::OrdinaryKriging ok(tr, kModel);
        std::vector<double> out;
        for (std::size_t i : test) out.push_back(ok.predict(s[i].location()));
        return out;
    };
}

void BM_KfoldCv_Serial(benchmark::State& st) {
    const auto s = samples(200);
    std::vector<double> y;
    for (const auto& q : s) y.push_back(q.value);
    const auto pred = ok_predictor(s);
    for (auto _ : st) benchmark::DoNotOptimize(interp::kfold_cv_serial(y, {10, 3}, pred));
}
void BM_KfoldCv_Parallel(benchmark::State& st) {
    const auto s = samples(200);
    std::vector<double> y;
    for (const auto& q : s) y.push_back(q.value);
    const auto pred = ok_predictor(s);
    for (auto _ : st) benchmark::DoNotOptimize(interp::kfold_cv(y, {10, 3}, pred));
}

}  // namespace

BENCHMARK(BM_MoransTest_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MoransTest_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Forest_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Forest_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OkGrid_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OkGrid_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KfoldCv_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KfoldCv_Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
