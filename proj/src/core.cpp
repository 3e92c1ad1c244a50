#include "aq/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "aq/error.hpp"

namespace aq {

using namespace std::chrono;

Date make_date(int y, unsigned m, unsigned d) {
    return Date{year{y}, month{m}, day{d}};
}

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    unsigned y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d))
        return std::nullopt;
    Date date = make_date(static_cast<int>(y), m, d);
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

long days_since_epoch(const Date& date) {
    return static_cast<long>(sys_days{date}.time_since_epoch().count());
}

Date add_days(const Date& date, long days) {
    return Date{sys_days{date} + std::chrono::days{days}};
}

IsoWeek iso_week_of(const Date& date) {
    const sys_days sd{date};
    const unsigned iso_wd = weekday{sd}.iso_encoding();  // Mon=1..Sun=7
    const sys_days thursday = sd + std::chrono::days{4 - static_cast<int>(iso_wd)};
    const Date thu{thursday};
    const sys_days jan1{thu.year() / January / 1};
    const auto ordinal = (thursday - jan1).count();
    return IsoWeek{static_cast<int>(thu.year()), static_cast<unsigned>(ordinal / 7 + 1)};
}

Date iso_week_start(IsoWeek week) {
    // Jan 4 is always in week 1.
    const sys_days jan4{year{week.year} / January / 4};
    const unsigned wd = weekday{jan4}.iso_encoding();
    const sys_days week1_monday = jan4 - std::chrono::days{wd - 1};
    return Date{week1_monday + std::chrono::days{7 * (static_cast<int>(week.week) - 1)}};
}

std::optional<IsoWeek> parse_iso_week(std::string_view text) {
    const auto dash = text.find('-');
    if (dash == std::string_view::npos || dash != 4) return std::nullopt;
    unsigned y = 0, w = 0;
    std::string_view rest = text.substr(dash + 1);
    if (!rest.empty() && (rest.front() == 'W' || rest.front() == 'w')) rest.remove_prefix(1);
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(rest, w)) return std::nullopt;
    if (w < 1 || w > 53) return std::nullopt;
    IsoWeek wk{static_cast<int>(y), w};
    if (iso_week_of(iso_week_start(wk)) != wk) return std::nullopt;
    return wk;
}

std::string format_iso_week(IsoWeek week) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-W%02u", week.year, week.week);
    return buf;
}

Season season_of(const Date& date) {
    switch (static_cast<unsigned>(date.month())) {
        case 2:
        case 3: return Season::Spring;
        case 4:
        case 5:
        case 6:
        case 7: return Season::Summer;
        case 8:
        case 9: return Season::Monsoon;
        default: return Season::Winter;
    }
}

std::string_view to_string(Season season) {
    switch (season) {
        case Season::Winter: return "winter";
        case Season::Spring: return "spring";
        case Season::Summer: return "summer";
        case Season::Monsoon: return "monsoon";
    }
    return "?";
}

std::string_view to_string(Period period) {
    switch (period) {
        case Period::BL: return "BL";
        case Period::DL: return "DL";
        case Period::AL: return "AL";
    }
    return "?";
}

PeriodSpec PeriodSpec::lockdown_default() {
    return PeriodSpec{{make_date(2019, 3, 17), make_date(2019, 6, 29)},
                      {make_date(2020, 3, 22), make_date(2020, 6, 27)},
                      {make_date(2020, 6, 28), make_date(2020, 8, 29)}};
}

void PeriodSpec::validate() const {
    const std::array<const DateRange*, 3> ranges{&bl, &dl, &al};
    for (const auto* r : ranges)
        if (r->end < r->start)
            throw Error(ErrorCode::InvalidArgument,
                        "period range " + format_date(r->start) + ".." + format_date(r->end) +
                            " is reversed");
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            if (ranges[i]->start <= ranges[j]->end && ranges[j]->start <= ranges[i]->end)
                throw Error(ErrorCode::InvalidArgument, "period ranges overlap");
}

std::optional<Period> period_of(const Date& date, const PeriodSpec& spec) {
    if (spec.bl.contains(date)) return Period::BL;
    if (spec.dl.contains(date)) return Period::DL;
    if (spec.al.contains(date)) return Period::AL;
    return std::nullopt;
}

std::string_view to_string(Pollutant p) {
    switch (p) {
        case Pollutant::NO: return "no";
        case Pollutant::NO2: return "no2";
        case Pollutant::NOx: return "nox";
        case Pollutant::CO: return "co";
        case Pollutant::PM10: return "pm10";
        case Pollutant::PM25: return "pm25";
        case Pollutant::AQI: return "aqi";
    }
    return "?";
}

std::optional<Pollutant> parse_pollutant(std::string_view text) {
    std::string s = lower(text);
    if (s == "pm2.5") s = "pm25";
    for (Pollutant p : kPollutants)
        if (s == to_string(p)) return p;
    return std::nullopt;
}

std::string_view to_string(ActivityZone zone) {
    switch (zone) {
        case ActivityZone::Transport: return "transport";
        case ActivityZone::Residential: return "residential";
        case ActivityZone::Commercial: return "commercial";
        case ActivityZone::Institutional: return "institutional";
        case ActivityZone::Unclassified: return "unclassified";
    }
    return "?";
}

std::optional<ActivityZone> parse_zone(std::string_view text) {
    const std::string s = lower(text);
    for (ActivityZone z : {ActivityZone::Transport, ActivityZone::Residential,
                           ActivityZone::Commercial, ActivityZone::Institutional,
                           ActivityZone::Unclassified})
        if (s == to_string(z)) return z;
    return std::nullopt;
}

// --- StationPanel --------------------------------------------------------------

StationPanel::StationPanel(std::vector<StationMeta> stations, std::vector<Observation> observations)
    : stations_(std::move(stations)), observations_(std::move(observations)) {
    for (std::size_t i = 0; i < stations_.size(); ++i) {
        const auto& s = stations_[i];
        if (!(s.lat >= -90.0 && s.lat <= 90.0) || !(s.lon >= -180.0 && s.lon <= 180.0))
            throw Error(ErrorCode::InvalidArgument, "station '" + s.id + "' has invalid coordinates");
        if (!index_.emplace(s.id, i).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate station id '" + s.id + "'");
    }
    by_station_.resize(stations_.size());
    if (observations_.empty()) {
        range_ = DateRange{make_date(1970, 1, 1), make_date(1970, 1, 1)};
        return;
    }
    range_ = DateRange{observations_.front().date, observations_.front().date};
    for (std::size_t k = 0; k < observations_.size(); ++k) {
        const auto& o = observations_[k];
        auto it = index_.find(o.station_id);
        if (it == index_.end())
            throw Error(ErrorCode::UnknownStation, "observation references unknown station '" +
                                                       o.station_id + "'");
        for (const auto& v : o.values)
            if (v && !(std::isfinite(*v) && *v >= 0.0))
                throw Error(ErrorCode::InvalidArgument,
                            "negative or non-finite concentration at station '" + o.station_id +
                                "' on " + format_date(o.date));
        by_station_[it->second].push_back(k);
        range_.start = std::min(range_.start, o.date);
        range_.end = std::max(range_.end, o.date);
    }
    for (auto& idx : by_station_) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return observations_[a].date < observations_[b].date;
        });
        for (std::size_t i = 1; i < idx.size(); ++i)
            if (observations_[idx[i]].date == observations_[idx[i - 1]].date)
                throw Error(ErrorCode::DuplicateObservation,
                            "duplicate observation for station '" +
                                observations_[idx[i]].station_id + "' on " +
                                format_date(observations_[idx[i]].date));
    }
}

std::size_t StationPanel::day_count() const {
    if (observations_.empty()) return 0;
    return static_cast<std::size_t>(days_since_epoch(range_.end) - days_since_epoch(range_.start) + 1);
}

std::size_t StationPanel::station_index(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end())
        throw Error(ErrorCode::UnknownStation, "unknown station '" + std::string(id) + "'");
    return it->second;
}

std::vector<std::optional<double>> StationPanel::daily_series(std::size_t station,
                                                              Pollutant p) const {
    std::vector<std::optional<double>> out(day_count());
    const long origin = days_since_epoch(range_.start);
    for (std::size_t k : by_station_.at(station)) {
        const auto& o = observations_[k];
        out[static_cast<std::size_t>(days_since_epoch(o.date) - origin)] = o.value(p);
    }
    return out;
}

std::vector<WeeklyMean> weekly_average(const StationPanel& panel, Pollutant p,
                                       std::string_view station_id) {
    const std::size_t s = panel.station_index(station_id);
    const auto series = panel.daily_series(s, p);
    std::vector<WeeklyMean> out;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const IsoWeek wk = iso_week_of(add_days(panel.date_range().start, static_cast<long>(t)));
        if (out.empty() || out.back().week != wk) {
            if (!out.empty() && count > 0) out.back().mean = sum / static_cast<double>(count);
            out.push_back({wk, std::nullopt});
            sum = 0.0;
            count = 0;
        }
        if (series[t]) {
            sum += *series[t];
            ++count;
        }
    }
    if (!out.empty() && count > 0) out.back().mean = sum / static_cast<double>(count);
    return out;
}

// --- descriptive statistics ------------------------------------------------------

double pearson_first_skewness(double mean, double mode, double sd) {
    if (!(sd > 0.0)) throw Error(ErrorCode::ZeroVariance, "standard deviation is zero");
    return (mean - mode) / sd;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::TooFewValues, "quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double histogram_mode(std::span<const double> values, double bin_width) {
    if (!(bin_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "mode bin width must be > 0");
    if (values.empty()) throw Error(ErrorCode::TooFewValues, "mode of empty sample");
    std::map<long long, std::size_t> bins;
    for (double v : values) ++bins[static_cast<long long>(std::floor(v / bin_width + 0.5))];
    // std::map iterates in ascending bin order, so strict > keeps the lower bin on ties
    auto best = bins.begin();
    for (auto it = bins.begin(); it != bins.end(); ++it)
        if (it->second > best->second) best = it;
    return static_cast<double>(best->first) * bin_width;
}

DescriptiveSummary descriptive_summary(std::span<const double> values, double mode_bin_width) {
    if (values.size() < 2)
        throw Error(ErrorCode::TooFewValues, "descriptive summary needs at least 2 values");
    for (double v : values)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value in sample");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    DescriptiveSummary s;
    s.n = sorted.size();
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile_sorted(sorted, 0.25);
    s.median = quantile_sorted(sorted, 0.5);
    s.q3 = quantile_sorted(sorted, 0.75);
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;

    double m2 = 0.0, m4 = 0.0;
    for (double v : sorted) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    if (m2 == 0.0) throw Error(ErrorCode::ZeroVariance, "all values are equal");
    s.sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m4 /= n;
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    s.mode = histogram_mode(sorted, mode_bin_width);
    s.skewness_pearson1 = pearson_first_skewness(s.mean, s.mode, s.sd);
    const double half = 1.96 * s.sd / std::sqrt(n);
    s.ci95_mean = {s.mean - half, s.mean + half};
    return s;
}

}  // namespace aq
