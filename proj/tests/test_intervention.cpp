#include <doctest.h>

#include <cmath>

#include "aq/intervention.hpp"
#include "aq/random.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace aq;
using namespace aq::did;

namespace {

DidPanel cells(const std::array<double, 4>& means, std::size_t per_cell, double noise, Rng* rng,
               std::size_t stations_per_group = 1) {
    // means ordered (I,Z) = (0,0), (1,0), (0,1), (1,1)
    DidPanel p;
    for (int c = 0; c < 4; ++c) {
        const int i = c % 2, z = c / 2;
        for (std::size_t k = 0; k < per_cell; ++k) {
            const double e = noise > 0.0 ? noise * standard_normal(*rng) : 0.0;
            const std::string id = (z ? "T" : "C") + std::to_string(k % stations_per_group);
            p.rows.push_back({means[std::size_t(c)] + e, i, z, id, {}});
        }
    }
    return p;
}

double cell_mean(const DidPanel& p, int i, int z) {
    double s = 0.0;
    int n = 0;
    for (const auto& r : p.rows)
        if (r.treated_time == i && r.group == z) {
            s += r.y;
            ++n;
        }
    return s / n;
}

}  // namespace

TEST_CASE("fit_did recovers the double difference of cell means") {
    const auto p = cells({10, 8, 20, 9.87}, 3, 0.0, nullptr);
    const auto f = fit_did(p);
    CHECK(f.beta[0] == doctest::Approx(10.0));
    CHECK(f.beta[1] == doctest::Approx(-2.0));
    CHECK(f.beta[2] == doctest::Approx(10.0));
    CHECK(f.beta[3] == doctest::Approx(-8.13));
    CHECK(f.residual_variance < 1e-18);
    CHECK(f.n == 12);
    CHECK(f.dof == 8);
}

TEST_CASE("fit_did matches the normal equations and cell means") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        DidPanel p;
        std::vector<double> y;
        std::vector<int> it, z;
        const std::size_t n = 8 + uniform_index(rng, 60);
        for (std::size_t k = 0; k < n; ++k) {
            const int i = k < 4 ? int(k % 2) : int(uniform_index(rng, 2));
            const int g = k < 4 ? int(k / 2) : int(uniform_index(rng, 2));
            const double v = 50.0 + 5.0 * i - 3.0 * g + 2.0 * i * g + 4.0 * standard_normal(rng);
            p.rows.push_back({v, i, g, "s", {}});
            y.push_back(v);
            it.push_back(i);
            z.push_back(g);
        }
        const auto f = fit_did(p);
        const auto ref = oracle::did_normal_equations(y, it, z);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(f.beta[k] - ref[k]) < 1e-9 * std::max(1.0, std::abs(ref[k])));
        const double dd = (cell_mean(p, 1, 1) - cell_mean(p, 0, 1)) - (cell_mean(p, 1, 0) - cell_mean(p, 0, 0));
        CHECK(std::abs(f.beta[3] - dd) < 1e-9);
    }
}

TEST_CASE("fit_did invariances") {
    Rng rng(4);
    const auto p = cells({30, 25, 40, 31}, 20, 2.0, &rng);
    const auto f = fit_did(p);
    auto shifted = p;
    for (auto& r : shifted.rows) r.y += 17.5;
    const auto g = fit_did(shifted);
    CHECK(g.beta[0] == doctest::Approx(f.beta[0] + 17.5));
    for (int k = 1; k < 4; ++k) CHECK(g.beta[k] == doctest::Approx(f.beta[k]).epsilon(1e-9));
    for (int k = 0; k < 4; ++k) CHECK(g.se[k] == doctest::Approx(f.se[k]).epsilon(1e-9));

    const auto same = cells({12, 12, 12, 12}, 5, 0.0, nullptr);
    const auto s = fit_did(same);
    for (int k = 1; k < 4; ++k) CHECK(std::abs(s.beta[k]) < 1e-12);
    CHECK(s.p_value[3] == 1.0);
}

TEST_CASE("fit_did recovers a planted effect within three standard errors") {
    Rng rng(5);
    const auto p = cells({100, 80, 110, 110 - 20 - 2.78}, 100, 1.0, &rng);
    const auto f = fit_did(p);
    CHECK(std::abs(f.beta[3] + 2.78) < 3.0 * f.se[3]);
    CHECK(f.se[3] == doctest::Approx(std::sqrt(4.0 / 100.0)).epsilon(0.15));
    const auto [lo, hi] = f.confidence_interval(3);
    CHECK(lo < f.beta[3]);
    CHECK(hi > f.beta[3]);
    CHECK((hi - lo) / 2.0 == doctest::Approx(1.966 * f.se[3]).epsilon(1e-3));
    CHECK(f.p_value[3] < 0.001);
    CHECK(significance_stars(f.p_value[3]) == "***");
}

TEST_CASE("fit_did clustered standard errors") {
    Rng rng(6);
    const auto p = cells({10, 8, 20, 12}, 40, 1.5, &rng, 4);
    const auto c = fit_did(p, SeType::StationClustered);
    const auto h = fit_did(p);
    CHECK(c.beta == h.beta);
    CHECK(c.dof == 7);
    CHECK(c.se_type == SeType::StationClustered);
    for (int k = 0; k < 4; ++k) CHECK(c.se[k] > 0.0);
    CHECK(to_string(SeType::StationClustered) == "station_clustered");
    const auto one = cells({10, 8, 20, 12}, 10, 1.0, &rng, 1);
    DidPanel single = one;
    for (auto& r : single.rows) r.station_id = "only";
    CHECK_AQ_ERROR(fit_did(single, SeType::StationClustered), ErrorCode::TooFewRows);
}

TEST_CASE("fit_did errors") {
    auto p = cells({10, 8, 20, 9}, 3, 0.0, nullptr);
    for (auto& r : p.rows) r.group = 1;
    CHECK_AQ_ERROR(fit_did(p), ErrorCode::EmptyCell);
    CHECK_AQ_ERROR(fit_did(cells({1, 2, 3, 4}, 1, 0.0, nullptr)), ErrorCode::TooFewRows);
    auto bad = cells({1, 2, 3, 4}, 3, 0.0, nullptr);
    bad.rows[0].treated_time = 2;
    CHECK_AQ_ERROR(fit_did(bad), ErrorCode::InvalidArgument);
}

TEST_CASE("significance_stars thresholds") {
    CHECK(significance_stars(0.0005) == "***");
    CHECK(significance_stars(0.005) == "**");
    CHECK(significance_stars(0.03) == "*");
    CHECK(significance_stars(0.07) == ".");
    CHECK(significance_stars(0.5) == "");
}

TEST_CASE("did_by_zone builds the design from the panel") {
    using testutil::obs;
    using testutil::station;
    const auto periods = PeriodSpec::lockdown_default();
    std::vector<StationMeta> st{station("A", 28.6, 77.2, ActivityZone::Transport),
                                station("B", 28.7, 77.1, ActivityZone::Residential),
                                station("C", 28.5, 77.3, ActivityZone::Commercial)};
    std::vector<Observation> o;
    const auto add = [&](const std::string& id, Date d, double v) { o.push_back(obs(id, d, Pollutant::PM25, v)); };
    for (long d = 0; d < 5; ++d) {
        add("A", add_days(periods.bl.start, d), 20.0);
        add("A", add_days(periods.dl.start, d), 9.87);
        add("B", add_days(periods.bl.start, d), 10.0);
        add("B", add_days(periods.dl.start, d), 8.0);
        add("C", add_days(periods.bl.start, d), 10.0);
        add("C", add_days(periods.dl.start, d), 8.0);
        add("A", add_days(periods.al.start, d), 500.0);
    }
    const StationPanel panel(st, o);
    const auto f = did_by_zone(panel, Pollutant::PM25, periods, ActivityZone::Transport);
    CHECK(f.beta[3] == doctest::Approx(-8.13));
    CHECK(f.n == 30);
    CHECK_AQ_ERROR(did_by_zone(panel, Pollutant::PM25, periods, ActivityZone::Institutional), ErrorCode::NoData);
    CHECK_AQ_ERROR(did_by_zone(panel, Pollutant::NO2, periods, ActivityZone::Transport), ErrorCode::NoData);

    std::vector<Observation> no_bl;
    for (const auto& x : o)
        if (!(x.station_id == "A" && periods.bl.contains(x.date))) no_bl.push_back(x);
    const StationPanel gap(st, no_bl);
    try {
        (void)did_by_zone(gap, Pollutant::PM25, periods, ActivityZone::Transport);
        FAIL("expected NoData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoData);
        CHECK(std::string(e.what()).find("zone BL") != std::string::npos);
    }
}
