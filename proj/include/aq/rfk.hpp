#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "aq/forest.hpp"
#include "aq/interpolation.hpp"
#include "aq/variogram.hpp"

namespace aq::forest {

struct RfkConfig {
    ForestConfig forest;
    std::vector<vario::Family> families{vario::Family::Spherical};
    std::size_t n_bins = vario::kDefaultBins;
    double max_dist_fraction = vario::kDefaultMaxDistFraction;
    DistanceMetric metric = DistanceMetric::PlanarDegrees;
    /// When set, residuals are kriged with this model instead of a fitted one.
    std::optional<vario::VariogramModel> residual_model;
};

/// Mean model plus an ordinary-kriged residual field:
/// y(q) = mean(q) + OK(residuals)(location of q).
class RegressionKriging {
public:
    using MeanFunction = std::function<double(const FeatureRow&)>;

    /// A residual field with zero variance contributes that constant and no
    /// variogram is fitted.
    RegressionKriging(MeanFunction mean, std::vector<SpatialSample> residuals, const RfkConfig& config);

    [[nodiscard]] double predict(const FeatureRow& query) const;
    [[nodiscard]] double mean(const FeatureRow& query) const { return mean_(query); }
    [[nodiscard]] double residual_at(GeoPoint location) const;
    [[nodiscard]] const std::optional<vario::VariogramFit>& residual_variogram() const {
        return fit_;
    }
    [[nodiscard]] std::span<const SpatialSample> residuals() const { return residuals_; }

private:
    MeanFunction mean_;
    std::vector<SpatialSample> residuals_;
    std::optional<vario::VariogramFit> fit_;
    std::optional<interp::OrdinaryKriging> kriging_;
    double constant_residual_ = 0.0;
};

struct RfkModel {
    std::shared_ptr<const RegressionForest> forest;
    RegressionKriging kriging;

    [[nodiscard]] double predict(const FeatureRow& query) const { return kriging.predict(query); }
};

/// Forest on the training rows, then kriging of its out-of-bag residuals at
/// the row locations (east, north).
[[nodiscard]] RfkModel fit_rfk(std::span<const LabeledRow> train, const RfkConfig& config);

/// Regression kriging around an arbitrary mean function; residuals are
/// in-sample y - mean(x).
[[nodiscard]] RegressionKriging regression_kriging(std::span<const LabeledRow> train,
                                                   RegressionKriging::MeanFunction mean,
                                                   const RfkConfig& config);

[[nodiscard]] std::vector<double> rfk_interpolate(std::span<const LabeledRow> train,
                                                  std::span<const FeatureRow> query,
                                                  const RfkConfig& config);

/// Pollutant covariates at an unobserved location, IDW-interpolated (power
/// `power`) from the training rows that carry each pollutant.
[[nodiscard]] FeatureRow covariates_at(std::span<const LabeledRow> stations, GeoPoint location,
                                       double power = 2.0);

[[nodiscard]] interp::CvResult rfk_kfold_cv(std::span<const LabeledRow> rows, const RfkConfig& config,
                                            const interp::CvConfig& cv);
[[nodiscard]] interp::CvResult forest_kfold_cv(std::span<const LabeledRow> rows,
                                               const ForestConfig& config,
                                               const interp::CvConfig& cv);

}  // namespace aq::forest
