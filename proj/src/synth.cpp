#include "aq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <Eigen/Dense>

#include "aq/error.hpp"
#include "aq/random.hpp"

namespace aq::synth {

namespace {

// Stream indices for split_seed, one per independent draw family.
enum Stream : std::uint64_t { kLayout = 1, kStationField, kWeekly, kDaily, kMissing };

std::vector<GeoPoint> place_stations(const FixtureConfig& c, std::size_t n, Rng& rng) {
    constexpr double kMinSeparation = 0.01;
    std::vector<GeoPoint> pts;
    while (pts.size() < n) {
        const GeoPoint p{c.lon_min + uniform01(rng) * (c.lon_max - c.lon_min),
                         c.lat_min + uniform01(rng) * (c.lat_max - c.lat_min)};
        const bool clear = std::all_of(pts.begin(), pts.end(), [&](const GeoPoint& q) {
            return planar_degrees(p, q) >= kMinSeparation;
        });
        if (clear) pts.push_back(p);
    }
    return pts;
}

/// Lower Cholesky factor of the covariance sill - gamma(h) (nugget on the diagonal).
Eigen::MatrixXd covariance_factor(std::span<const GeoPoint> pts, const vario::VariogramModel& m) {
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            cov(i, j) = i == j ? m.sill
                               : m.sill - vario::model_gamma(m, planar_degrees(pts[i], pts[j]));
    cov.diagonal().array() += 1e-9 * m.sill;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularSystem, "field covariance is not positive definite");
    return llt.matrixL();
}

std::vector<double> draw_field(const Eigen::MatrixXd& factor, Rng& rng) {
    Eigen::VectorXd z(factor.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
    const Eigen::VectorXd f = factor * z;
    return {f.data(), f.data() + f.size()};
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

double pm25_aqi(double pm25) {
    struct Band { double c_lo, c_hi, i_lo, i_hi; };
    static constexpr Band kBands[] = {{0, 30, 0, 50},      {30, 60, 51, 100},   {60, 90, 101, 200},
                                      {90, 120, 201, 300}, {120, 250, 301, 400}, {250, 500, 401, 500}};
    const double c = std::clamp(pm25, 0.0, 500.0);
    for (const auto& b : kBands)
        if (c <= b.c_hi) return b.i_lo + (c - b.c_lo) * (b.i_hi - b.i_lo) / (b.c_hi - b.c_lo);
    return 500.0;
}

Fixture generate(const FixtureConfig& c) {
    if (c.end < c.start) throw Error(ErrorCode::InvalidArgument, "fixture end precedes start");
    c.periods.validate();
    std::size_t n = 0;
    for (auto k : c.zone_counts) n += k;
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "fixture needs at least 2 stations");

    Fixture fx;
    fx.config = c;

    Rng layout(split_seed(c.seed, kLayout));
    const auto pts = place_stations(c, n, layout);
    std::vector<ActivityZone> zone_of;
    for (std::size_t z = 0; z < 5; ++z)
        for (std::size_t k = 0; k < c.zone_counts[z]; ++k)
            zone_of.push_back(z < 4 ? kClassifiedZones[z] : ActivityZone::Unclassified);
    shuffle_in_place(std::span<ActivityZone>(zone_of), layout);
    for (std::size_t s = 0; s < n; ++s) {
        char id[32], name[48];
        std::snprintf(id, sizeof id, "S%02zu", s + 1);
        std::snprintf(name, sizeof name, "Station %02zu", s + 1);
        fx.stations.push_back({id, name, std::round(pts[s].lat * 1e6) / 1e6,
                               std::round(pts[s].lon * 1e6) / 1e6, zone_of[s]});
    }

    Rng station_rng(split_seed(c.seed, kStationField));
    const auto offset = draw_field(covariance_factor(pts, c.station_field), station_rng);
    const Eigen::MatrixXd weekly_factor = covariance_factor(pts, c.weekly_field);

    // one outage per station
    Rng miss_rng(split_seed(c.seed, kMissing));
    const long n_days = days_since_epoch(c.end) - days_since_epoch(c.start) + 1;
    std::vector<std::pair<long, long>> outage(n);
    for (auto& o : outage) {
        const long len = static_cast<long>(uniform_index(miss_rng, c.max_gap_days + 1));
        const long first = static_cast<long>(uniform_index(miss_rng, static_cast<std::size_t>(n_days)));
        o = {first, first + len};
    }

    auto zone_shift = [&](ActivityZone z) {
        for (std::size_t k = 0; k < 4; ++k)
            if (kClassifiedZones[k] == z) return c.zone_lockdown_shift[k];
        return 0.0;
    };
    auto dropped = [&](Pollutant p) {
        return std::find(c.dropped_pollutants.begin(), c.dropped_pollutants.end(), p) !=
               c.dropped_pollutants.end();
    };

    std::map<IsoWeek, std::vector<double>> weekly;
    Rng daily_rng(split_seed(c.seed, kDaily));
    // realized pm25 rows in BL/DL, for expected_beta3
    struct DidCell { double shift; bool dl; ActivityZone zone; };
    std::vector<DidCell> did_rows;

    for (long d = 0; d < n_days; ++d) {
        const Date date = add_days(c.start, d);
        const IsoWeek wk = iso_week_of(date);
        auto it = weekly.find(wk);
        if (it == weekly.end()) {
            Rng wr(split_seed(split_seed(c.seed, kWeekly),
                              static_cast<std::uint64_t>(wk.year) * 100 + wk.week));
            it = weekly.emplace(wk, draw_field(weekly_factor, wr)).first;
        }
        const auto period = period_of(date, c.periods);
        const bool lockdown = period == Period::DL;
        const double m = c.season_multiplier[static_cast<std::size_t>(season_of(date))];
        for (std::size_t s = 0; s < n; ++s) {
            const double e1 = standard_normal(daily_rng), e2 = standard_normal(daily_rng);
            const double e3 = standard_normal(daily_rng), e4 = standard_normal(daily_rng);
            const double e5 = standard_normal(daily_rng), e6 = standard_normal(daily_rng);
            std::array<bool, kPollutantCount> miss{};
            for (auto& f : miss) f = uniform01(miss_rng) < c.value_missing_rate;
            if (d >= outage[s].first && d < outage[s].second) continue;

            const double planted = lockdown ? c.common_lockdown_shift + zone_shift(zone_of[s]) : 0.0;
            const double pm25 = std::max(
                1.0, m * c.base_level + offset[s] + it->second[s] + planted + c.noise_sd * e1);
            const double pm10 = std::max(2.0, 1.8 * pm25 + 15.0 * e2);
            const double no2 = std::max(1.0, 0.35 * pm25 + 10.0 + 5.0 * e3);
            const double no = std::max(0.5, 0.2 * pm25 + 4.0 * e4);
            const double nox = std::max(1.0, no + no2 + 3.0 * e5);
            const double co = std::max(0.05, 0.012 * pm25 + 0.2 * e6);
            const double aqi = std::round(pm25_aqi(pm25));

            Observation obs{fx.stations[s].id, date, {}};
            const std::array<double, kPollutantCount> v{no, no2, nox, co, pm10, pm25, aqi};
            for (std::size_t k = 0; k < kPollutantCount; ++k)
                if (!miss[k] && !dropped(kPollutants[k])) obs.values[k] = round2(v[k]);
            if (std::none_of(obs.values.begin(), obs.values.end(), [](auto& x) { return x.has_value(); }))
                continue;
            if (obs.value(Pollutant::PM25) && period && *period != Period::AL)
                did_rows.push_back({lockdown ? zone_shift(zone_of[s]) : 0.0, lockdown, zone_of[s]});
            fx.observations.push_back(std::move(obs));
        }
    }

    for (std::size_t k = 0; k < 4; ++k) {
        const ActivityZone z = kClassifiedZones[k];
        std::array<double, 4> sum{};
        std::array<std::size_t, 4> cnt{};
        for (const auto& r : did_rows) {
            const std::size_t cell = (r.dl ? 2 : 0) + (r.zone == z ? 1 : 0);
            sum[cell] += r.shift;
            ++cnt[cell];
        }
        auto mean = [&](std::size_t i) { return cnt[i] ? sum[i] / static_cast<double>(cnt[i]) : 0.0; };
        fx.zones.push_back({z, c.zone_lockdown_shift[k], (mean(3) - mean(1)) - (mean(2) - mean(0))});
    }
    return fx;
}

}  // namespace aq::synth
