#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aq/core.hpp"

namespace aq::io {

/// Splits one CSV record; double-quoted fields may contain commas and `""`.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

/// `id,name,lat,lon,zone`. Throws ParseError naming the offending line.
[[nodiscard]] std::vector<StationMeta> read_stations(std::istream& in);
[[nodiscard]] std::vector<StationMeta> read_stations(const std::filesystem::path& path);

/// `station_id,date,no,no2,nox,co,pm10,pm25,aqi`; empty field = missing.
[[nodiscard]] std::vector<Observation> read_observations(std::istream& in);
[[nodiscard]] std::vector<Observation> read_observations(const std::filesystem::path& path);

/// Reads both files and validates cross references. Unknown station ids are
/// reported with the observation's line number.
[[nodiscard]] StationPanel load_panel(const std::filesystem::path& stations_csv,
                                      const std::filesystem::path& observations_csv);

void write_stations(std::ostream& out, std::span<const StationMeta> stations);
void write_observations(std::ostream& out, std::span<const Observation> observations);

}  // namespace aq::io
