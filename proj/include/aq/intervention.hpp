#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aq/core.hpp"

namespace aq::did {

struct DidRow {
    double y = 0.0;
    int treated_time = 0;  // I: 1 during the intervention window
    int group = 0;         // Z: 1 for the zone of interest
    std::string station_id;
    Date date{};
};

struct DidPanel {
    std::vector<DidRow> rows;
};

enum class SeType { Homoskedastic, StationClustered };

[[nodiscard]] std::string_view to_string(SeType type);

struct DidFit {
    std::array<double, 4> beta{};  // intercept, I, Z, I*Z
    std::array<double, 4> se{};
    std::array<double, 4> t_stat{};
    std::array<double, 4> p_value{};
    std::size_t n = 0;
    std::size_t dof = 0;
    double residual_variance = 0.0;
    SeType se_type = SeType::Homoskedastic;

    /// Two-sided interval from the t distribution with `dof` degrees of freedom.
    [[nodiscard]] std::pair<double, double> confidence_interval(std::size_t k, double level = 0.95) const;
};

/// OLS of y on [1, I, Z, I*Z] via Householder QR. Clustered SEs use the CR1
/// sandwich over station ids and G - 1 degrees of freedom.
[[nodiscard]] DidFit fit_did(const DidPanel& panel, SeType se = SeType::Homoskedastic);

/// I = 1 on DL dates and 0 on BL dates; Z = 1 for stations of `zone`, 0 for
/// every other station. Days outside BL and DL are ignored.
[[nodiscard]] DidFit did_by_zone(const StationPanel& panel, Pollutant pollutant, const PeriodSpec& periods,
                                 ActivityZone zone, SeType se = SeType::Homoskedastic);

/// Conventional significance codes: *** < 0.001, ** < 0.01, * < 0.05, . < 0.1.
[[nodiscard]] std::string_view significance_stars(double p);

}  // namespace aq::did
