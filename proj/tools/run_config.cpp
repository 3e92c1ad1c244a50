#include "run_config.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "aq/error.hpp"

#ifndef AQ_VERSION
#define AQ_VERSION "0.0.0"
#endif

namespace aq::cli {

std::string_view tool_version() { return AQ_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

std::string file_digest(const std::filesystem::path& p) {
    if (p.empty()) return "";
    std::ifstream in(p, std::ios::binary);
    if (!in) return "unreadable";
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return hex64(fnv1a64(bytes));
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
}

}  // namespace

std::string RunConfig::config_hash() const {
    const std::map<std::string, std::string> kv{
        {"command", command},
        {"stations_digest", file_digest(stations)},
        {"obs_digest", file_digest(obs)},
        {"pollutant", pollutant},
        {"week", week},
        {"seed", std::to_string(seed)},
        {"bl", bl},
        {"dl", dl},
        {"al", al},
        {"method", method},
        {"power", power},
        {"family", family},
        {"metric", metric},
        {"bins", std::to_string(bins)},
        {"cell", num(cell)},
        {"grid_format", grid_format},
        {"folds", std::to_string(folds)},
        {"force", force ? "true" : "false"},
        {"ntree", std::to_string(ntree)},
        {"mtry", std::to_string(mtry)},
        {"min_leaf", std::to_string(min_leaf)},
        {"scheme", scheme},
        {"weight_power", num(weight_power)},
        {"cutoff_km", num(cutoff_km)},
        {"knn", std::to_string(knn)},
        {"permutations", std::to_string(permutations)},
        {"alpha", num(alpha)},
        {"zones", join(zones)},
        {"se", se},
        {"mode_bin", num(mode_bin)},
        {"report_weeks", join(report_weeks)},
        {"drop", join(drop)},
    };
    std::string canon;
    for (const auto& [k, v] : kv) canon += k + "=" + v + "\n";
    return hex64(fnv1a64(canon));
}

Pollutant RunConfig::parsed_pollutant() const {
    const auto p = parse_pollutant(pollutant);
    if (!p) throw Error(ErrorCode::InvalidArgument, "unknown pollutant '" + pollutant + "'");
    return *p;
}

DateRange parse_range(std::string_view text) {
    const auto sep = text.find("..");
    if (sep == std::string_view::npos)
        throw Error(ErrorCode::InvalidArgument, "date range must be START..END, got '" + std::string(text) + "'");
    const auto a = parse_date(text.substr(0, sep));
    const auto b = parse_date(text.substr(sep + 2));
    if (!a || !b) throw Error(ErrorCode::InvalidArgument, "bad date in range '" + std::string(text) + "'");
    return {*a, *b};
}

PeriodSpec RunConfig::periods() const {
    PeriodSpec spec{parse_range(bl), parse_range(dl), parse_range(al)};
    spec.validate();
    return spec;
}

spatial::WeightScheme RunConfig::weight_scheme() const {
    if (scheme == "idw") return spatial::InverseDistance{weight_power, cutoff_km, true};
    if (scheme == "knn") return spatial::KNearest{knn};
    throw Error(ErrorCode::InvalidArgument, "unknown weight scheme '" + scheme + "'");
}

DistanceMetric RunConfig::distance_metric() const {
    const auto m = parse_metric(metric);
    if (!m) throw Error(ErrorCode::InvalidArgument, "unknown metric '" + metric + "'");
    return *m;
}

forest::ForestConfig RunConfig::forest_config() const {
    forest::ForestConfig fc;
    fc.ntree = ntree;
    if (mtry > 0) fc.mtry = mtry;
    fc.min_leaf = min_leaf;
    fc.seed = seed;
    return fc;
}

did::SeType RunConfig::se_type() const {
    if (se == "homoskedastic") return did::SeType::Homoskedastic;
    if (se == "clustered") return did::SeType::StationClustered;
    throw Error(ErrorCode::InvalidArgument, "unknown SE type '" + se + "'");
}

std::vector<ActivityZone> RunConfig::parsed_zones() const {
    std::vector<ActivityZone> out;
    for (const auto& z : zones) {
        const auto parsed = parse_zone(z);
        if (!parsed) throw Error(ErrorCode::InvalidArgument, "unknown zone '" + z + "'");
        out.push_back(*parsed);
    }
    return out;
}

}  // namespace aq::cli
