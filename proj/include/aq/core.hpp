#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace aq {

using Date = std::chrono::year_month_day;

[[nodiscard]] Date make_date(int y, unsigned m, unsigned d);
/// Parses strict ISO-8601 `YYYY-MM-DD`; nullopt on malformed or invalid dates.
[[nodiscard]] std::optional<Date> parse_date(std::string_view text);
[[nodiscard]] std::string format_date(const Date& date);
[[nodiscard]] long days_since_epoch(const Date& date);
[[nodiscard]] Date add_days(const Date& date, long days);

struct IsoWeek {
    int year = 0;
    unsigned week = 0;
    auto operator<=>(const IsoWeek&) const = default;
};

[[nodiscard]] IsoWeek iso_week_of(const Date& date);
/// Monday of the given ISO week.
[[nodiscard]] Date iso_week_start(IsoWeek week);
/// `2019-W20` or `2019-20`.
[[nodiscard]] std::optional<IsoWeek> parse_iso_week(std::string_view text);
[[nodiscard]] std::string format_iso_week(IsoWeek week);

struct DateRange {
    Date start;
    Date end;  // inclusive

    [[nodiscard]] bool contains(const Date& d) const { return start <= d && d <= end; }
};

// --- seasons and periods ------------------------------------------------------

enum class Season { Winter, Spring, Summer, Monsoon };
inline constexpr std::array<Season, 4> kSeasons{Season::Winter, Season::Spring, Season::Summer,
                                                Season::Monsoon};

/// Feb-Mar spring, Apr-Jul summer, Aug-Sep monsoon, Oct-Jan winter.
[[nodiscard]] Season season_of(const Date& date);
[[nodiscard]] std::string_view to_string(Season season);

enum class Period { BL, DL, AL };
[[nodiscard]] std::string_view to_string(Period period);

struct PeriodSpec {
    DateRange bl;
    DateRange dl;
    DateRange al;

    /// Default before/during/after lockdown windows (2019 baseline, 2020 lockdown).
    [[nodiscard]] static PeriodSpec lockdown_default();
    /// Throws InvalidArgument when a range is reversed or two ranges overlap.
    void validate() const;
};

[[nodiscard]] std::optional<Period> period_of(const Date& date, const PeriodSpec& spec);

// --- pollutants, stations, observations --------------------------------------

enum class Pollutant { NO, NO2, NOx, CO, PM10, PM25, AQI };
inline constexpr std::size_t kPollutantCount = 7;
inline constexpr std::array<Pollutant, kPollutantCount> kPollutants{
    Pollutant::NO, Pollutant::NO2, Pollutant::NOx, Pollutant::CO,
    Pollutant::PM10, Pollutant::PM25, Pollutant::AQI};

/// CSV column name (`no`, `no2`, `nox`, `co`, `pm10`, `pm25`, `aqi`).
[[nodiscard]] std::string_view to_string(Pollutant p);
[[nodiscard]] std::optional<Pollutant> parse_pollutant(std::string_view text);

enum class ActivityZone { Transport, Residential, Commercial, Institutional, Unclassified };
inline constexpr std::array<ActivityZone, 4> kClassifiedZones{
    ActivityZone::Transport, ActivityZone::Residential, ActivityZone::Commercial,
    ActivityZone::Institutional};

[[nodiscard]] std::string_view to_string(ActivityZone zone);
/// Case-insensitive.
[[nodiscard]] std::optional<ActivityZone> parse_zone(std::string_view text);

struct StationMeta {
    std::string id;
    std::string name;
    double lat = 0.0;
    double lon = 0.0;
    ActivityZone zone = ActivityZone::Unclassified;
};

using PollutantValues = std::array<std::optional<double>, kPollutantCount>;

struct Observation {
    std::string station_id;
    Date date;
    PollutantValues values;

    [[nodiscard]] std::optional<double> value(Pollutant p) const {
        return values[static_cast<std::size_t>(p)];
    }
};

/// Immutable station-level daily panel. Construction validates coordinates,
/// station-id uniqueness, observation references and (station, date)
/// uniqueness; missing concentrations stay absent.
class StationPanel {
public:
    StationPanel(std::vector<StationMeta> stations, std::vector<Observation> observations);

    [[nodiscard]] std::span<const StationMeta> stations() const { return stations_; }
    [[nodiscard]] std::span<const Observation> observations() const { return observations_; }
    [[nodiscard]] const DateRange& date_range() const { return range_; }
    [[nodiscard]] std::size_t day_count() const;

    /// Index into stations(); throws UnknownStation.
    [[nodiscard]] std::size_t station_index(std::string_view id) const;
    [[nodiscard]] const StationMeta& station(std::string_view id) const {
        return stations_[station_index(id)];
    }

    /// Dense daily series of one station over date_range(); absent where the
    /// observation or the value is missing.
    [[nodiscard]] std::vector<std::optional<double>> daily_series(std::size_t station,
                                                                  Pollutant p) const;

private:
    std::vector<StationMeta> stations_;
    std::vector<Observation> observations_;
    DateRange range_;
    std::unordered_map<std::string, std::size_t> index_;
    // per station: observation indices ordered by date
    std::vector<std::vector<std::size_t>> by_station_;
};

struct WeeklyMean {
    IsoWeek week;
    std::optional<double> mean;
};

/// Mean of present daily values per ISO week spanned by the panel range.
[[nodiscard]] std::vector<WeeklyMean> weekly_average(const StationPanel& panel, Pollutant p,
                                                     std::string_view station_id);

// --- descriptive statistics ---------------------------------------------------

struct DescriptiveSummary {
    std::size_t n = 0;
    double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
    double mode = 0;
    double sd = 0;
    double skewness_pearson1 = 0;
    double excess_kurtosis = 0;
    std::pair<double, double> ci95_mean{0, 0};
};

inline constexpr double kDefaultModeBinWidth = 5.0;

/// Pearson's first skewness coefficient, (mean - mode) / sd.
[[nodiscard]] double pearson_first_skewness(double mean, double mode, double sd);

/// Linear interpolation between order statistics at position q*(n-1).
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double q);

/// Center of the most populated histogram bin; bins are centered on integer
/// multiples of `bin_width`, ties go to the lower bin.
[[nodiscard]] double histogram_mode(std::span<const double> values, double bin_width);

[[nodiscard]] DescriptiveSummary descriptive_summary(std::span<const double> values,
                                                     double mode_bin_width = kDefaultModeBinWidth);

}  // namespace aq
