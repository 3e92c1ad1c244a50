#include "aq/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aq/error.hpp"

namespace aq::ts {

AcfResult acf(std::span<const std::optional<double>> series, std::size_t max_lag) {
    if (max_lag >= series.size())
        throw Error(ErrorCode::LagTooLarge, "max_lag must be smaller than the series length");
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& v : series)
        if (v) {
            sum += *v;
            ++count;
        }
    if (count == 0) throw Error(ErrorCode::TooFewValues, "series has no values");
    const double mean = sum / static_cast<double>(count);
    double denom = 0.0;
    for (const auto& v : series)
        if (v) denom += (*v - mean) * (*v - mean);
    if (denom == 0.0) throw Error(ErrorCode::ZeroVariance, "series is constant");

    AcfResult out;
    out.lags.resize(max_lag + 1);
    out.acf.resize(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        out.lags[k] = k;
        if (k == 0) {
            out.acf[k] = 1.0;
            continue;
        }
        double num = 0.0;
        for (std::size_t t = 0; t + k < series.size(); ++t)
            if (series[t] && series[t + k]) num += (*series[t] - mean) * (*series[t + k] - mean);
        out.acf[k] = num / denom;
    }
    return out;
}

AcfResult acf(std::span<const double> series, std::size_t max_lag) {
    std::vector<std::optional<double>> wrapped(series.begin(), series.end());
    return acf(std::span<const std::optional<double>>(wrapped), max_lag);
}

std::vector<std::optional<double>> centered_moving_average(std::span<const double> series,
                                                           std::size_t period) {
    if (period < 2) throw Error(ErrorCode::InvalidArgument, "period must be >= 2");
    const std::size_t n = series.size();
    const std::size_t half = period / 2;
    std::vector<std::optional<double>> out(n);
    const bool even = period % 2 == 0;
    for (std::size_t t = half; t + half < n; ++t) {
        double acc = 0.0;
        if (even) {
            acc = 0.5 * (series[t - half] + series[t + half]);
            for (std::size_t i = t - half + 1; i < t + half; ++i) acc += series[i];
        } else {
            for (std::size_t i = t - half; i <= t + half; ++i) acc += series[i];
        }
        out[t] = acc / static_cast<double>(period);
    }
    return out;
}

DecompositionResult decompose_additive(std::span<const double> series, std::size_t period) {
    if (period < 2) throw Error(ErrorCode::InvalidArgument, "period must be >= 2");
    if (series.size() < 2 * period)
        throw Error(ErrorCode::SeriesTooShort, "decomposition needs at least 2 periods of data");

    DecompositionResult r;
    r.period = period;
    r.trend = centered_moving_average(series, period);

    std::vector<double> phase_sum(period, 0.0);
    std::vector<std::size_t> phase_count(period, 0);
    for (std::size_t t = 0; t < series.size(); ++t)
        if (r.trend[t]) {
            phase_sum[t % period] += series[t] - *r.trend[t];
            ++phase_count[t % period];
        }
    std::vector<double> index(period);
    for (std::size_t k = 0; k < period; ++k)
        index[k] = phase_sum[k] / static_cast<double>(phase_count[k]);
    const double centre = std::accumulate(index.begin(), index.end(), 0.0) / static_cast<double>(period);
    for (auto& v : index) v -= centre;

    r.seasonal.resize(series.size());
    r.remainder.resize(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        r.seasonal[t] = index[t % period];
        if (r.trend[t]) r.remainder[t] = series[t] - *r.trend[t] - r.seasonal[t];
    }
    return r;
}

DecompositionResult decompose_additive(std::span<const std::optional<double>> series,
                                       std::size_t period) {
    std::vector<double> dense;
    dense.reserve(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (!series[t])
            throw Error(ErrorCode::SeriesHasGaps,
                        "decomposition needs a gap-free series; missing value at index " +
                            std::to_string(t));
        dense.push_back(*series[t]);
    }
    return decompose_additive(std::span<const double>(dense), period);
}

namespace {

/// Present-only weighted CMA; a window is usable when the present weight is at
/// least 75% of the full window weight.
std::vector<std::optional<double>> sparse_cma(std::span<const std::optional<double>> daily,
                                              std::size_t window) {
    const std::size_t n = daily.size();
    const std::size_t half = window / 2;
    const bool even = window % 2 == 0;
    std::vector<double> psum(n + 1, 0.0), pcnt(n + 1, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        psum[t + 1] = psum[t] + (daily[t] ? *daily[t] : 0.0);
        pcnt[t + 1] = pcnt[t] + (daily[t] ? 1.0 : 0.0);
    }
    std::vector<std::optional<double>> cma(n);
    const double full_weight = static_cast<double>(window);
    for (std::size_t t = half; t + half < n; ++t) {
        double sum = 0.0, weight = 0.0;
        if (even) {
            // interior [t-half+1, t+half-1] at weight 1, both ends at 1/2
            sum = psum[t + half] - psum[t - half + 1];
            weight = pcnt[t + half] - pcnt[t - half + 1];
            for (std::size_t e : {t - half, t + half})
                if (daily[e]) {
                    sum += 0.5 * *daily[e];
                    weight += 0.5;
                }
        } else {
            sum = psum[t + half + 1] - psum[t - half];
            weight = pcnt[t + half + 1] - pcnt[t - half];
        }
        if (weight >= 0.75 * full_weight) cma[t] = sum / weight;
    }
    auto first = std::find_if(cma.begin(), cma.end(), [](const auto& v) { return v.has_value(); });
    if (first == cma.end()) return cma;
    auto last = std::find_if(cma.rbegin(), cma.rend(), [](const auto& v) { return v.has_value(); });
    std::fill(cma.begin(), first, *first);
    std::fill(last.base(), cma.end(), *last);
    return cma;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

SeasonalInfluence ratio_to_moving_average(std::span<const std::optional<double>> daily,
                                          const Date& first_day, const DateRange& selection,
                                          std::size_t window) {
    if (window < 2) throw Error(ErrorCode::InvalidArgument, "window must be >= 2");
    const auto cma = sparse_cma(daily, window);

    std::array<std::vector<double>, 4> ratios;
    std::array<bool, 4> season_in_range{};
    for (std::size_t t = 0; t < daily.size(); ++t) {
        const Date d = add_days(first_day, static_cast<long>(t));
        if (!selection.contains(d)) continue;
        const auto s = static_cast<std::size_t>(season_of(d));
        season_in_range[s] = true;
        if (daily[t] && cma[t] && *cma[t] > 0.0) ratios[s].push_back(*daily[t] / *cma[t] * 100.0);
    }

    SeasonalInfluence out;
    std::array<double, 4> median{};
    double weighted = 0.0;
    std::size_t total = 0;
    for (std::size_t s = 0; s < 4; ++s) {
        if (!season_in_range[s]) continue;
        if (ratios[s].empty())
            throw Error(ErrorCode::InsufficientCoverage,
                        "no moving-average ratios for " + std::string(to_string(kSeasons[s])));
        median[s] = median_of(ratios[s]);
        out.days[s] = ratios[s].size();
        weighted += median[s] * static_cast<double>(out.days[s]);
        total += out.days[s];
    }
    if (total == 0 || !(weighted > 0.0))
        throw Error(ErrorCode::NoData, "no usable days in the selected range");
    const double scale = 100.0 * static_cast<double>(total) / weighted;
    for (std::size_t s = 0; s < 4; ++s)
        if (out.days[s] > 0) out.deviation[s] = median[s] * scale - 100.0;
    return out;
}

std::vector<std::optional<double>> zone_daily_mean(const StationPanel& panel, Pollutant pollutant,
                                                   ActivityZone zone) {
    const std::size_t n = panel.day_count();
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    bool any_station = false;
    for (std::size_t s = 0; s < panel.stations().size(); ++s) {
        if (panel.stations()[s].zone != zone) continue;
        any_station = true;
        const auto series = panel.daily_series(s, pollutant);
        for (std::size_t t = 0; t < n; ++t)
            if (series[t]) {
                sum[t] += *series[t];
                ++count[t];
            }
    }
    if (!any_station)
        throw Error(ErrorCode::NoData, "zone '" + std::string(to_string(zone)) + "' has no stations");
    std::vector<std::optional<double>> out(n);
    for (std::size_t t = 0; t < n; ++t)
        if (count[t]) out[t] = sum[t] / static_cast<double>(count[t]);
    return out;
}

SeasonalInfluence seasonal_influence(const StationPanel& panel, Pollutant pollutant,
                                     ActivityZone zone, int year, std::size_t window) {
    const auto daily = zone_daily_mean(panel, pollutant, zone);
    const DateRange selection{make_date(year, 1, 1), make_date(year, 12, 31)};
    if (selection.end < panel.date_range().start || panel.date_range().end < selection.start)
        throw Error(ErrorCode::NoData, "panel does not cover year " + std::to_string(year));
    return ratio_to_moving_average(daily, panel.date_range().start, selection, window);
}

MkResult mann_kendall(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 3) throw Error(ErrorCode::SeriesTooShort, "Mann-Kendall needs at least 3 values");
    std::int64_t s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            s += (series[j] > series[i]) - (series[j] < series[i]);

    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    double tie_pairs = 0.0, tie_var = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_pairs += t * (t - 1.0) / 2.0;
        tie_var += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    const double nd = static_cast<double>(n);
    const double n0 = nd * (nd - 1.0) / 2.0;
    if (n0 - tie_pairs <= 0.0) throw Error(ErrorCode::AllTied, "all values are tied");

    MkResult r;
    r.n = n;
    r.s_statistic = s;
    r.tau = static_cast<double>(s) / std::sqrt(n0 * (n0 - tie_pairs));
    r.variance = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - tie_var) / 18.0;
    if (s > 0)
        r.z = (static_cast<double>(s) - 1.0) / std::sqrt(r.variance);
    else if (s < 0)
        r.z = (static_cast<double>(s) + 1.0) / std::sqrt(r.variance);
    r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    return r;
}

MkResult mann_kendall(std::span<const std::optional<double>> series) {
    std::vector<double> present;
    for (const auto& v : series)
        if (v) present.push_back(*v);
    return mann_kendall(std::span<const double>(present));
}

double average_declination(double mean_before, double mean_during) {
    if (!(mean_before > 0.0))
        throw Error(ErrorCode::NonPositiveBaseline, "baseline mean must be positive");
    return (mean_during - mean_before) / mean_before * 100.0;
}

}  // namespace aq::ts
