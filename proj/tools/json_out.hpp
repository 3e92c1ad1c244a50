#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "aq/core.hpp"
#include "aq/forest.hpp"
#include "aq/grid.hpp"
#include "aq/interpolation.hpp"
#include "aq/intervention.hpp"
#include "aq/spatial_stats.hpp"
#include "aq/timeseries.hpp"
#include "aq/variogram.hpp"
#include "run_config.hpp"

namespace aq::cli {

using Json = nlohmann::ordered_json;

/// {tool, version, command, seed, config_hash}
[[nodiscard]] Json meta(const RunConfig& cfg);

[[nodiscard]] Json opt(const std::optional<double>& v);
[[nodiscard]] Json to_json(const DescriptiveSummary& s);
[[nodiscard]] Json to_json(const spatial::MoranResult& m);
[[nodiscard]] Json to_json(const vario::VariogramModel& m);
[[nodiscard]] Json to_json(const vario::VariogramFit& f);
[[nodiscard]] Json to_json(const interp::AccuracyReport& a);
[[nodiscard]] Json to_json(const did::DidFit& f, ActivityZone zone);
[[nodiscard]] Json to_json(const forest::ImportanceReport& r);
[[nodiscard]] Json to_json(const ts::MkResult& r);
[[nodiscard]] Json to_json(const ts::SeasonalInfluence& s);

/// Pretty-printed with a trailing newline; parent directories are created.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// `lon,lat,value`, coordinates with 6 decimals.
[[nodiscard]] std::string grid_csv(const std::vector<interp::GridNode>& nodes);
/// FeatureCollection of Points carrying a `value` property.
[[nodiscard]] Json grid_geojson(const std::vector<interp::GridNode>& nodes);

}  // namespace aq::cli
