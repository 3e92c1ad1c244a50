#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aq/core.hpp"
#include "aq/forest.hpp"
#include "aq/geo.hpp"
#include "aq/intervention.hpp"
#include "aq/spatial_stats.hpp"

namespace aq::cli {

[[nodiscard]] std::string_view tool_version();

/// Resolved options of one invocation (config file merged under the flags).
struct RunConfig {
    std::string command;
    std::filesystem::path stations;
    std::filesystem::path obs;
    std::filesystem::path out_dir = "out";
    std::string pollutant = "pm25";
    std::string week;
    std::uint64_t seed = 42;

    std::string bl = "2019-03-17..2019-06-29";
    std::string dl = "2020-03-22..2020-06-27";
    std::string al = "2020-06-28..2020-08-29";

    // interpolation
    std::string method = "auto";  // idw | ok | rfk | auto
    std::string power = "auto";    // number or auto
    std::string family = "auto";   // spherical | exponential | gaussian | linear | auto
    std::string metric = "degrees";
    std::size_t bins = 12;
    double cell = 0.01;
    std::string grid_format = "csv";  // csv | geojson
    std::size_t folds = 10;
    bool force = false;

    // forest
    std::size_t ntree = 1000;
    std::size_t mtry = 0;  // 0: max(1, p/3)
    std::size_t min_leaf = 5;

    // moran
    std::string scheme = "idw";  // idw | knn
    double weight_power = 1.0;
    double cutoff_km = 50.0;
    std::size_t knn = 4;
    std::size_t permutations = spatial::kDefaultPermutations;
    double alpha = 0.05;

    // did
    std::vector<std::string> zones{"transport", "residential", "commercial", "institutional"};
    std::string se = "homoskedastic";  // homoskedastic | clustered

    // report
    double mode_bin = kDefaultModeBinWidth;
    std::vector<std::string> report_weeks;  // empty: every week in the panel

    // synth-fixture
    std::vector<std::string> drop;

    /// Digest of the resolved settings plus input file contents. Output
    /// location and the config file path are excluded so reruns elsewhere
    /// hash the same.
    [[nodiscard]] std::string config_hash() const;

    [[nodiscard]] Pollutant parsed_pollutant() const;
    [[nodiscard]] PeriodSpec periods() const;
    [[nodiscard]] spatial::WeightScheme weight_scheme() const;
    [[nodiscard]] DistanceMetric distance_metric() const;
    [[nodiscard]] forest::ForestConfig forest_config() const;
    [[nodiscard]] did::SeType se_type() const;
    [[nodiscard]] std::vector<ActivityZone> parsed_zones() const;
};

/// FNV-1a 64-bit.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
[[nodiscard]] std::string hex64(std::uint64_t v);

[[nodiscard]] DateRange parse_range(std::string_view text);

}  // namespace aq::cli
