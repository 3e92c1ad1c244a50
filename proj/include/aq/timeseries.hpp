#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aq/core.hpp"

namespace aq::ts {

struct AcfResult {
    std::vector<std::size_t> lags;
    std::vector<double> acf;
};

/// Sample autocorrelation with the lag-0 sum as normalizer, so acf[0] == 1
/// and |acf[k]| <= 1.
[[nodiscard]] AcfResult acf(std::span<const double> series, std::size_t max_lag);

/// Missing values are dropped: the mean and lag-0 sum use present values, the
/// lag-k numerator only pairs where both ends are present.
[[nodiscard]] AcfResult acf(std::span<const std::optional<double>> series, std::size_t max_lag);

struct DecompositionResult {
    std::vector<std::optional<double>> trend;      // absent where the centered MA is undefined
    std::vector<double> seasonal;                  // one value per input point
    std::vector<std::optional<double>> remainder;  // cyclical + irregular, absent with trend
    std::size_t period = 0;
};

/// Centered moving average of width `period` (2 x period MA when even).
/// Entries within period/2 of either end are absent.
[[nodiscard]] std::vector<std::optional<double>> centered_moving_average(
    std::span<const double> series, std::size_t period);

/// Additive decomposition y = trend + seasonal + remainder.
[[nodiscard]] DecompositionResult decompose_additive(std::span<const double> series,
                                                     std::size_t period);
/// Throws SeriesHasGaps if any value is missing.
[[nodiscard]] DecompositionResult decompose_additive(std::span<const std::optional<double>> series,
                                                     std::size_t period);

struct SeasonalInfluence {
    /// index - 100 per season, indexed by Season; absent for seasons without data
    std::array<std::optional<double>, 4> deviation{};
    /// number of daily ratios that fed each season's index
    std::array<std::size_t, 4> days{};

    [[nodiscard]] std::optional<double> operator[](Season s) const {
        return deviation[static_cast<std::size_t>(s)];
    }
};

inline constexpr std::size_t kAnnualWindow = 365;

/// Ratio-to-moving-average seasonal indices on a daily series.
///
/// The CMA of width `window` is computed over the whole series (a window needs
/// at least 75% present days); edge days without a full window reuse the
/// nearest defined CMA. Ratios y/CMA*100 are collected for days inside
/// `selection`, the per-season median is taken and the indices are scaled so
/// their day-weighted mean is exactly 100. Throws InsufficientCoverage when a
/// season inside `selection` has no ratio, NoData when nothing is usable.
[[nodiscard]] SeasonalInfluence ratio_to_moving_average(std::span<const std::optional<double>> daily,
                                                        const Date& first_day,
                                                        const DateRange& selection,
                                                        std::size_t window = kAnnualWindow);

/// Daily zone-mean series of `pollutant` (mean over zone stations with a value
/// that day), then ratio_to_moving_average restricted to calendar `year`.
[[nodiscard]] SeasonalInfluence seasonal_influence(const StationPanel& panel, Pollutant pollutant,
                                                   ActivityZone zone, int year,
                                                   std::size_t window = kAnnualWindow);

/// Daily mean over the stations of `zone` (absent on days with no value).
[[nodiscard]] std::vector<std::optional<double>> zone_daily_mean(const StationPanel& panel,
                                                                 Pollutant pollutant,
                                                                 ActivityZone zone);

struct MkResult {
    std::int64_t s_statistic = 0;
    double tau = 0.0;
    double variance = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Mann-Kendall trend test: tau-b, tie-corrected variance, continuity
/// corrected z and a two-sided normal p-value.
[[nodiscard]] MkResult mann_kendall(std::span<const double> series);
/// Missing values are dropped before testing.
[[nodiscard]] MkResult mann_kendall(std::span<const std::optional<double>> series);

/// Percent change of the during-period mean relative to the before-period mean.
[[nodiscard]] double average_declination(double mean_before, double mean_during);

}  // namespace aq::ts
