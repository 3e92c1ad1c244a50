#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aq/core.hpp"
#include "aq/error.hpp"
#include "aq/forest.hpp"
#include "aq/geo.hpp"
#include "aq/spatial_stats.hpp"
#include "json_out.hpp"
#include "run_config.hpp"

namespace aq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitStatistical = 3;
inline constexpr int kExitUnavailable = 4;

/// Failure that maps straight to an exit code.
class ExitError : public std::runtime_error {
public:
    ExitError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    [[nodiscard]] int code() const { return code_; }

private:
    int code_;
};

[[nodiscard]] int exit_code_for(ErrorCode code);

/// Weekly station means of one ISO week.
struct WeekData {
    IsoWeek week;
    std::vector<std::size_t> stations;         // panel station index per sample
    std::vector<SpatialSample> samples;        // target means at (lon, lat)
    std::vector<forest::LabeledRow> rows;      // covariate means + target, rows with a covariate
};

/// Observations grouped by ISO week (indices into panel.observations()).
using WeekIndex = std::map<IsoWeek, std::vector<std::size_t>>;
[[nodiscard]] WeekIndex index_weeks(const StationPanel& panel);

[[nodiscard]] WeekData week_data(const StationPanel& panel, const std::vector<std::size_t>& obs,
                                 Pollutant target, IsoWeek week);

struct Gate {
    spatial::MoranResult moran;
    bool gated = false;
};

/// Permutation Moran test on the week's station means.
[[nodiscard]] Gate moran_gate(const StationPanel& panel, const WeekData& wd, const RunConfig& cfg);

/// CV (and optionally grids) for each requested method. Per-method failures
/// are recorded when `tolerate_failures`, rethrown otherwise.
[[nodiscard]] Json evaluate_methods(const StationPanel& panel, const WeekData& wd,
                                    const RunConfig& cfg, const std::vector<std::string>& methods,
                                    const std::optional<std::filesystem::path>& grid_dir,
                                    bool tolerate_failures);

int cmd_ingest(const RunConfig& cfg, std::ostream& out);
int cmd_moran(const RunConfig& cfg, std::ostream& out);
int cmd_interpolate(const RunConfig& cfg, std::ostream& out);
int cmd_did(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);
int cmd_synth_fixture(const RunConfig& cfg, std::ostream& out);

}  // namespace aq::cli
