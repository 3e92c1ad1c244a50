#include <doctest.h>

#include <cmath>
#include <numeric>

#include "aq/geo.hpp"
#include "aq/random.hpp"
#include "aq/spatial_stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace aq;
using namespace aq::spatial;

namespace {

WeightMatrix rook_grid(std::size_t side) {
    const std::size_t n = side * side;
    std::vector<double> w(n * n, 0.0);
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) {
            const std::size_t i = r * side + c;
            if (c + 1 < side) w[i * n + i + 1] = w[(i + 1) * n + i] = 1.0;
            if (r + 1 < side) w[i * n + i + side] = w[(i + side) * n + i] = 1.0;
        }
    return WeightMatrix(n, std::move(w), KNearest{4}, false);
}

std::vector<GeoPoint> scatter(Rng& rng, std::size_t n) {
    std::vector<GeoPoint> p(n);
    for (auto& q : p) q = {77.0 + 0.4 * uniform01(rng), 28.4 + 0.4 * uniform01(rng)};
    return p;
}

oracle::Matrix dense(const WeightMatrix& w) {
    oracle::Matrix m(w.n(), std::vector<double>(w.n()));
    for (std::size_t i = 0; i < w.n(); ++i)
        for (std::size_t j = 0; j < w.n(); ++j) m[i][j] = w(i, j);
    return m;
}

}  // namespace

TEST_CASE("haversine and planar distances") {
    CHECK(haversine_km({0, 0}, {180, 0}) == doctest::Approx(20015.1).epsilon(0.1 / 20015.1));
    CHECK(haversine_km({77.2, 28.6}, {77.2, 28.6}) == 0.0);
    CHECK(haversine_km({77.0, 28.0}, {77.3, 28.5}) == doctest::Approx(haversine_km({77.3, 28.5}, {77.0, 28.0})));
    CHECK(planar_degrees({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(parse_metric("km") == DistanceMetric::HaversineKm);
    CHECK(parse_metric("degrees") == DistanceMetric::PlanarDegrees);
    CHECK_FALSE(parse_metric("miles").has_value());
}

TEST_CASE("weight matrix examples") {
    const std::vector<GeoPoint> two{{77.0, 28.0}, {77.1, 28.0}};
    const auto w2 = build_weights(two, KNearest{1});
    CHECK(w2(0, 1) == 1.0);
    CHECK(w2(1, 0) == 1.0);

    const std::vector<GeoPoint> line{{77.0, 28.0}, {77.1, 28.0}, {77.2, 28.0}};
    const auto wl = build_weights(line, InverseDistance{1.0, 50.0, true});
    CHECK(wl(1, 0) == doctest::Approx(0.5));
    CHECK(wl(1, 1) == 0.0);
    CHECK(wl(1, 2) == doctest::Approx(0.5));

    const std::vector<GeoPoint> square{{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1}, {0.1, 0.1}};
    const auto ws = build_weights(square, KNearest{2});
    for (std::size_t i = 0; i < 4; ++i) {
        std::size_t halves = 0;
        for (double v : ws.row(i)) halves += v == 0.5 ? 1 : 0;
        CHECK(halves == 2);
    }
}

TEST_CASE("weight matrix properties and errors") {
    Rng rng(8);
    const auto pts = scatter(rng, 30);
    const auto w = build_weights(pts, InverseDistance{2.0, 20.0, true});
    for (std::size_t i = 0; i < w.n(); ++i) {
        CHECK(w(i, i) == 0.0);
        const auto row = w.row(i);
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        if (sum > 0.0) CHECK(sum == doctest::Approx(1.0));
    }
    const auto far = build_weights(std::vector<GeoPoint>{{0, 0}, {1, 0}, {0, 0.0001}}, InverseDistance{1, 1, true});
    CHECK(far.disconnected_rows() == std::vector<std::size_t>{1});
    CHECK_AQ_ERROR(build_weights(std::vector<GeoPoint>{{1, 1}, {1, 1}}, KNearest{1}), ErrorCode::DuplicateCoordinates);
    CHECK_AQ_ERROR(build_weights(std::vector<GeoPoint>{{1, 1}}, KNearest{1}), ErrorCode::TooFewValues);
    CHECK_AQ_ERROR(build_weights(pts, KNearest{30}), ErrorCode::InvalidArgument);
    CHECK_AQ_ERROR(WeightMatrix(2, {0, -1, 1, 0}, KNearest{1}, false), ErrorCode::InvalidArgument);
    CHECK_AQ_ERROR(WeightMatrix(2, {1, 1, 1, 0}, KNearest{1}, false), ErrorCode::InvalidArgument);
}

TEST_CASE("morans_i on a checkerboard is -1") {
    const auto w = rook_grid(4);
    std::vector<double> y(16);
    for (std::size_t k = 0; k < 16; ++k) y[k] = ((k / 4 + k % 4) % 2 == 0) ? 1.0 : 0.0;
    CHECK(morans_i(y, w) == doctest::Approx(-1.0));
}

TEST_CASE("morans_i matches the double sum and is affine invariant") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + uniform_index(rng, 4);
        const auto pts = scatter(rng, n);
        const WeightScheme scheme = trial % 2 == 0 ? WeightScheme{InverseDistance{1.0, 100.0, trial % 4 == 0}}
                                                   : WeightScheme{KNearest{1 + uniform_index(rng, n - 1)}};
        const auto w = build_weights(pts, scheme);
        std::vector<double> y(n);
        for (auto& v : y) v = 50.0 + 20.0 * standard_normal(rng);
        const double i = morans_i(y, w);
        CHECK(std::abs(i - oracle::morans_i(y, dense(w))) < 1e-12);
        std::vector<double> t(n);
        for (std::size_t k = 0; k < n; ++k) t[k] = 3.5 * y[k] - 40.0;
        CHECK(morans_i(t, w) == doctest::Approx(i).epsilon(1e-10));
    }
}

TEST_CASE("morans_i errors") {
    const auto w = rook_grid(3);
    CHECK_AQ_ERROR(morans_i(std::vector<double>(9, 4.2), w), ErrorCode::ZeroVariance);
    CHECK_AQ_ERROR(morans_i(std::vector<double>(8, 1.0), w), ErrorCode::DimensionMismatch);
    std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK_AQ_ERROR(morans_test(y, w, 50, 1), ErrorCode::InvalidArgument);
}

TEST_CASE("morans_test detects a latitude gradient") {
    Rng rng(2);
    auto pts = scatter(rng, 37);
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a].lat < pts[b].lat; });
    std::vector<double> rank(pts.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = double(r);
    const auto w = build_weights(pts, InverseDistance{});
    const auto res = morans_test(rank, w, 999, 7);
    CHECK(res.i_statistic > res.expected_i);
    CHECK(res.p_value < 0.05);
    CHECK(res.expected_i == doctest::Approx(-1.0 / 36.0));
    CHECK(res.n_permutations == 999);

    const auto few = morans_test(rank, w, 99, 7);
    CHECK(few.p_value == doctest::Approx(1.0 / 100.0));
}

TEST_CASE("morans_test p-value lies on the permutation lattice and is seed deterministic") {
    Rng rng(4);
    const auto pts = scatter(rng, 20);
    std::vector<double> y(20);
    for (auto& v : y) v = standard_normal(rng);
    const auto w = build_weights(pts, KNearest{3});
    const auto a = morans_test(y, w, 199, 99);
    const auto b = morans_test(y, w, 199, 99);
    CHECK(a.p_value == b.p_value);
    const double count = a.p_value * 200.0;
    CHECK(std::abs(count - std::round(count)) < 1e-9);
    CHECK((a.p_value >= 1.0 / 200.0 && a.p_value <= 1.0));
}
