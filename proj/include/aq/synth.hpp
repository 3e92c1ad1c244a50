#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "aq/core.hpp"
#include "aq/variogram.hpp"

namespace aq::synth {

/// Seeded stand-in for a city monitoring network: daily concentrations with
/// multiplicative seasonality, a weekly spatially correlated field, station
/// offsets and an additive lockdown shift planted per activity zone.
struct FixtureConfig {
    std::uint64_t seed = 42;
    Date start = make_date(2019, 1, 1);
    Date end = make_date(2020, 12, 31);
    // stations per zone, in kClassifiedZones order, then unclassified
    std::array<std::size_t, 5> zone_counts{3, 5, 3, 6, 21};
    double lon_min = 76.85, lon_max = 77.35;
    double lat_min = 28.40, lat_max = 28.88;

    double base_level = 100.0;                      // pm25 scale
    std::array<double, 4> season_multiplier{1.6, 1.0, 0.7, 0.7};  // indexed by Season
    vario::VariogramModel station_field{vario::Family::Spherical, 0.0, 100.0, 0.3, 0.0};
    vario::VariogramModel weekly_field{vario::Family::Spherical, 3.0, 24.45, 0.28, 0.0};
    double noise_sd = 6.0;

    PeriodSpec periods = PeriodSpec::lockdown_default();
    double common_lockdown_shift = -25.0;
    std::array<double, 4> zone_lockdown_shift{-8.13, -0.46, -2.78, -1.40};  // kClassifiedZones order

    double value_missing_rate = 0.02;
    std::size_t max_gap_days = 10;  // one contiguous outage per station, length in [0, max]
    /// Pollutants written as all-missing columns.
    std::vector<Pollutant> dropped_pollutants;
};

struct ZoneTruth {
    ActivityZone zone = ActivityZone::Unclassified;
    double planted_shift = 0.0;
    /// Double difference the planted shifts alone produce on the realized
    /// pm25 rows (zone vs all other stations, DL vs BL).
    double expected_beta3 = 0.0;
};

struct Fixture {
    std::vector<StationMeta> stations;
    std::vector<Observation> observations;
    std::vector<ZoneTruth> zones;
    FixtureConfig config;
};

[[nodiscard]] Fixture generate(const FixtureConfig& config);

/// Indian national AQI sub-index for a 24 h PM2.5 concentration.
[[nodiscard]] double pm25_aqi(double pm25);

}  // namespace aq::synth
