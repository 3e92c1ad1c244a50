#include "aq/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "aq/error.hpp"

namespace aq::io {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& field, std::size_t line, std::string_view column) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v))
        fail(line, "column '" + std::string(column) + "' is not a number: '" + field + "'");
    return v;
}

void expect_header(const std::string& line, std::string_view expected) {
    std::string got;
    for (const auto& f : split_csv_line(line)) got += (got.empty() ? "" : ",") + trim(f);
    if (got != expected) fail(1, "expected header '" + std::string(expected) + "', got '" + got + "'");
}

bool blank(const std::string& line) { return trim(line).empty(); }

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::vector<StationMeta> read_stations(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(1, "stations file is empty");
    expect_header(line, "id,name,lat,lon,zone");
    std::vector<StationMeta> out;
    std::unordered_set<std::string> seen;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (blank(line)) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) fail(lineno, "expected 5 fields, got " + std::to_string(f.size()));
        StationMeta s;
        s.id = trim(f[0]);
        if (s.id.empty()) fail(lineno, "empty station id");
        s.name = trim(f[1]);
        s.lat = parse_double(trim(f[2]), lineno, "lat");
        s.lon = parse_double(trim(f[3]), lineno, "lon");
        if (s.lat < -90.0 || s.lat > 90.0) fail(lineno, "lat out of range");
        if (s.lon < -180.0 || s.lon > 180.0) fail(lineno, "lon out of range");
        const auto zone = parse_zone(trim(f[4]));
        if (!zone) fail(lineno, "unknown zone '" + trim(f[4]) + "'");
        s.zone = *zone;
        if (!seen.insert(s.id).second) fail(lineno, "duplicate station id '" + s.id + "'");
        out.push_back(std::move(s));
    }
    if (out.empty()) fail(2, "no stations");
    return out;
}

std::vector<Observation> read_observations(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(1, "observations file is empty");
    expect_header(line, "station_id,date,no,no2,nox,co,pm10,pm25,aqi");
    std::vector<Observation> out;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (blank(line)) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 2 + kPollutantCount)
            fail(lineno, "expected 9 fields, got " + std::to_string(f.size()));
        Observation o;
        o.station_id = trim(f[0]);
        if (o.station_id.empty()) fail(lineno, "empty station_id");
        const auto date = parse_date(trim(f[1]));
        if (!date) fail(lineno, "invalid date '" + trim(f[1]) + "'");
        o.date = *date;
        for (std::size_t k = 0; k < kPollutantCount; ++k) {
            const std::string cell = trim(f[2 + k]);
            if (cell.empty()) continue;
            const double v = parse_double(cell, lineno, to_string(kPollutants[k]));
            if (v < 0.0) fail(lineno, "negative concentration in '" +
                                          std::string(to_string(kPollutants[k])) + "'");
            o.values[k] = v;
        }
        out.push_back(std::move(o));
    }
    if (out.empty()) fail(2, "no observations");
    return out;
}

std::vector<StationMeta> read_stations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return read_stations(in);
}

std::vector<Observation> read_observations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return read_observations(in);
}

StationPanel load_panel(const std::filesystem::path& stations_csv,
                        const std::filesystem::path& observations_csv) {
    auto stations = read_stations(stations_csv);
    std::unordered_set<std::string> ids;
    for (const auto& s : stations) ids.insert(s.id);

    std::ifstream in(observations_csv);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + observations_csv.string());
    auto observations = read_observations(in);
    // line numbers: header is line 1 and blank lines are skipped, so recount
    std::ifstream again(observations_csv);
    std::string line;
    std::getline(again, line);
    std::size_t k = 0;
    for (std::size_t lineno = 2; std::getline(again, line) && k < observations.size(); ++lineno) {
        if (blank(line)) continue;
        if (!ids.contains(observations[k].station_id))
            throw Error(ErrorCode::UnknownStation,
                        "line " + std::to_string(lineno) + ": unknown station '" +
                            observations[k].station_id + "'");
        ++k;
    }
    return StationPanel(std::move(stations), std::move(observations));
}

void write_stations(std::ostream& out, std::span<const StationMeta> stations) {
    out << "id,name,lat,lon,zone\n";
    out << std::fixed << std::setprecision(6);
    for (const auto& s : stations)
        out << quote_if_needed(s.id) << ',' << quote_if_needed(s.name) << ',' << s.lat << ','
            << s.lon << ',' << to_string(s.zone) << '\n';
}

void write_observations(std::ostream& out, std::span<const Observation> observations) {
    out << "station_id,date,no,no2,nox,co,pm10,pm25,aqi\n";
    out << std::fixed << std::setprecision(2);
    for (const auto& o : observations) {
        out << quote_if_needed(o.station_id) << ',' << format_date(o.date);
        for (const auto& v : o.values) {
            out << ',';
            if (v) out << *v;
        }
        out << '\n';
    }
}

}  // namespace aq::io
