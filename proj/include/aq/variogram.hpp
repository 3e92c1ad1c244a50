#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aq/geo.hpp"

namespace aq::vario {

struct EmpiricalVariogram {
    std::vector<double> bin_centers;
    std::vector<double> semivariances;
    std::vector<std::size_t> pair_counts;
    DistanceMetric metric = DistanceMetric::PlanarDegrees;
};

inline constexpr std::size_t kDefaultBins = 12;
inline constexpr double kDefaultMaxDistFraction = 0.5;

/// Classical (Matheron) estimator over equal-width bins on
/// (0, max_dist_fraction * max pairwise distance]; bins are right-closed,
/// centers are bin midpoints and empty bins are dropped.
[[nodiscard]] EmpiricalVariogram empirical_variogram(
    std::span<const SpatialSample> samples, std::size_t n_bins = kDefaultBins,
    double max_dist_fraction = kDefaultMaxDistFraction,
    DistanceMetric metric = DistanceMetric::PlanarDegrees);

/// Declaration order is the selection tie-break precedence.
enum class Family { Spherical, Exponential, Gaussian, Linear };
inline constexpr Family kAllFamilies[] = {Family::Spherical, Family::Exponential, Family::Gaussian,
                                          Family::Linear};

[[nodiscard]] std::string_view to_string(Family f);
[[nodiscard]] std::optional<Family> parse_family(std::string_view text);

struct VariogramModel {
    Family family = Family::Spherical;
    double nugget = 0.0;
    double sill = 0.0;
    double range = 1.0;
    double slope = 0.0;  // Linear only
};

/// Semivariance at lag h. Exponential and Gaussian use the practical range
/// (factor 3). Exactly zero at h == 0; the nugget is the h -> 0+ limit.
[[nodiscard]] double model_gamma(const VariogramModel& model, double h);

struct VariogramFit {
    VariogramModel model;
    double fit_rmse = 0.0;  // unweighted, over the bins used
    std::size_t n_bins_used = 0;
};

/// Pair-count weighted least-squares fit. For the bounded families the range
/// is searched on a grid over [0.01, 2] x the largest bin center with
/// golden-section refinement around the best grid minima; nugget and partial
/// sill are solved exactly (non-negative) for each candidate range.
[[nodiscard]] VariogramFit fit_variogram(const EmpiricalVariogram& emp, Family family);

/// Lowest fit_rmse wins; equal RMSEs go to the earlier family in precedence order.
[[nodiscard]] const VariogramFit& select_best(std::span<const VariogramFit> fits);

/// Fits every family (concurrently) and returns select_best of the successes.
/// Rethrows only when every family fails.
[[nodiscard]] VariogramFit select_variogram(const EmpiricalVariogram& emp,
                                            std::span<const Family> families);

}  // namespace aq::vario
