#include <doctest.h>

#include <omp.h>

#include "aq/forest.hpp"
#include "aq/grid.hpp"
#include "aq/interpolation.hpp"
#include "aq/random.hpp"
#include "aq/spatial_stats.hpp"

using namespace aq;

namespace {

// Oversubscribe so the parallel paths really interleave even on one core.
struct Threads {
    int saved = omp_get_max_threads();
    explicit Threads(int n) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
};

std::vector<SpatialSample> samples(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<SpatialSample> s(n);
    for (auto& q : s) q = {77.0 + 0.4 * uniform01(rng), 28.4 + 0.4 * uniform01(rng), 60.0 + 20.0 * standard_normal(rng)};
    return s;
}

}  // namespace

TEST_CASE("parallel morans_test equals the serial reference") {
    const Threads t(4);
    const auto s = samples(1, 40);
    std::vector<GeoPoint> pts;
    std::vector<double> y;
    for (const auto& q : s) {
        pts.push_back(q.location());
        y.push_back(q.value);
    }
    const auto w = spatial::build_weights(pts, spatial::InverseDistance{});
    const auto par = spatial::morans_test(y, w, 999, 5);
    const auto ser = spatial::morans_test_serial(y, w, 999, 5);
    CHECK(par.i_statistic == ser.i_statistic);
    CHECK(par.p_value == ser.p_value);
}

TEST_CASE("parallel kfold_cv equals the serial reference") {
    const Threads t(4);
    const auto s = samples(2, 50);
    std::vector<double> y;
    for (const auto& q : s) y.push_back(q.value);
    const interp::IdwParams p{1.5};
    const auto predictor = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
        std::vector<SpatialSample> tr;
        for (std::size_t i : train) tr.push_back(s[i]);
        std::vector<double> out;
        for (std::size_t i : test) out.push_back(interp::idw_interpolate(tr, s[i].location(), p));
        return out;
    };
    const auto par = interp::kfold_cv(y, {10, 3}, predictor);
    const auto ser = interp::kfold_cv_serial(y, {10, 3}, predictor);
    CHECK(par.predictions == ser.predictions);
    CHECK(par.report.rmse == ser.report.rmse);
}

TEST_CASE("parallel fit_forest equals the serial reference") {
    const Threads t(4);
    Rng rng(3);
    forest::Dataset d;
    d.n_features = 3;
    for (int i = 0; i < 120; ++i) {
        const double a = standard_normal(rng), b = standard_normal(rng), c = standard_normal(rng);
        d.x.insert(d.x.end(), {a, b, c});
        d.y.push_back(a * a + b + 0.1 * c);
    }
    const forest::ForestConfig cfg{64, {}, 3, {}, 11};
    const auto par = forest::fit_forest(d, cfg);
    const auto ser = forest::fit_forest_serial(d, cfg);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        CHECK(par.predict(d.row(i)) == ser.predict(d.row(i)));
        CHECK(par.oob_predictions()[i] == ser.oob_predictions()[i]);
    }
    const auto ip = forest::importance(par), is = forest::importance(ser);
    for (std::size_t k = 0; k < ip.entries.size(); ++k) CHECK(ip.entries[k].value == is.entries[k].value);
}

TEST_CASE("parallel grid equals the serial reference") {
    const Threads t(4);
    const auto s = samples(4, 30);
    std::vector<GeoPoint> pts;
    for (const auto& q : s) pts.push_back(q.location());
    const auto grid = interp::GridSpec::around(pts, 0.02);
    const interp::OrdinaryKriging ok(s, {vario::Family::Spherical, 2.0, 40.0, 0.2});
    const interp::PointPredictor f = [&](GeoPoint q) { return ok.predict(q); };
    const auto par = interp::grid_interpolate(grid, f);
    const auto ser = interp::grid_interpolate_serial(grid, f);
    REQUIRE(par.size() == ser.size());
    for (std::size_t k = 0; k < par.size(); ++k) {
        CHECK(par[k].lon == ser[k].lon);
        CHECK(par[k].lat == ser[k].lat);
        CHECK(par[k].value == ser[k].value);
    }
}
