#include "aq/rfk.hpp"

#include <algorithm>
#include <cmath>

#include "aq/error.hpp"

namespace aq::forest {

RegressionKriging::RegressionKriging(MeanFunction mean, std::vector<SpatialSample> residuals,
                                     const RfkConfig& config)
    : mean_(std::move(mean)), residuals_(std::move(residuals)) {
    if (residuals_.empty()) throw Error(ErrorCode::TooFewSamples, "no residuals to krige");
    const double first = residuals_.front().value;
    const bool constant = std::all_of(residuals_.begin(), residuals_.end(),
                                      [&](const SpatialSample& s) { return s.value == first; });
    if (constant) {
        constant_residual_ = first;
        return;
    }
    vario::VariogramModel model;
    if (config.residual_model) {
        model = *config.residual_model;
    } else {
        const auto emp = vario::empirical_variogram(residuals_, config.n_bins,
                                                    config.max_dist_fraction, config.metric);
        fit_ = vario::select_variogram(emp, config.families);
        model = fit_->model;
    }
    kriging_.emplace(residuals_, model, config.metric);
}

double RegressionKriging::residual_at(GeoPoint location) const {
    return kriging_ ? kriging_->predict(location) : constant_residual_;
}

double RegressionKriging::predict(const FeatureRow& query) const {
    return mean_(query) + residual_at(query.location());
}

RfkModel fit_rfk(std::span<const LabeledRow> train, const RfkConfig& config) {
    auto forest = std::make_shared<const RegressionForest>(fit_forest(train, config.forest));
    const OobResiduals oob = oob_residuals(*forest);
    std::vector<SpatialSample> residuals;
    residuals.reserve(oob.rows.size());
    for (std::size_t k = 0; k < oob.rows.size(); ++k) {
        const auto& f = train[oob.rows[k]].features;
        residuals.push_back({f.east, f.north, oob.residuals[k]});
    }
    RegressionKriging rk([forest](const FeatureRow& q) { return forest->predict(q); },
                         std::move(residuals), config);
    return RfkModel{std::move(forest), std::move(rk)};
}

RegressionKriging regression_kriging(std::span<const LabeledRow> train,
                                     RegressionKriging::MeanFunction mean, const RfkConfig& config) {
    std::vector<SpatialSample> residuals;
    residuals.reserve(train.size());
    for (const auto& r : train)
        residuals.push_back({r.features.east, r.features.north, r.target - mean(r.features)});
    return RegressionKriging(std::move(mean), std::move(residuals), config);
}

std::vector<double> rfk_interpolate(std::span<const LabeledRow> train,
                                    std::span<const FeatureRow> query, const RfkConfig& config) {
    const RfkModel model = fit_rfk(train, config);
    std::vector<double> out;
    out.reserve(query.size());
    for (const auto& q : query) out.push_back(model.predict(q));
    return out;
}

FeatureRow covariates_at(std::span<const LabeledRow> stations, GeoPoint location, double power) {
    FeatureRow row;
    row.east = location.lon;
    row.north = location.lat;
    const interp::IdwParams params{power, interp::AllSamples{}, DistanceMetric::PlanarDegrees};
    for (std::size_t k = 0; k < row.pollutants.size(); ++k) {
        std::vector<SpatialSample> carriers;
        for (const auto& s : stations)
            if (s.features.pollutants[k])
                carriers.push_back({s.features.east, s.features.north, *s.features.pollutants[k]});
        if (!carriers.empty()) row.pollutants[k] = interp::idw_interpolate(carriers, location, params);
    }
    return row;
}

namespace {

std::vector<LabeledRow> pick(std::span<const LabeledRow> rows, std::span<const std::size_t> idx) {
    std::vector<LabeledRow> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(rows[i]);
    return out;
}

std::vector<double> targets(std::span<const LabeledRow> rows) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(r.target);
    return y;
}

}  // namespace

interp::CvResult rfk_kfold_cv(std::span<const LabeledRow> rows, const RfkConfig& config,
                              const interp::CvConfig& cv) {
    const auto y = targets(rows);
    return interp::kfold_cv(y, cv, [&](std::span<const std::size_t> train,
                                       std::span<const std::size_t> test) {
        const auto tr = pick(rows, train);
        const RfkModel model = fit_rfk(tr, config);
        std::vector<double> out;
        for (std::size_t i : test) out.push_back(model.predict(rows[i].features));
        return out;
    });
}

interp::CvResult forest_kfold_cv(std::span<const LabeledRow> rows, const ForestConfig& config,
                                 const interp::CvConfig& cv) {
    const auto y = targets(rows);
    return interp::kfold_cv(y, cv, [&](std::span<const std::size_t> train,
                                       std::span<const std::size_t> test) {
        const auto tr = pick(rows, train);
        const RegressionForest forest = fit_forest(tr, config);
        std::vector<double> out;
        for (std::size_t i : test) out.push_back(forest.predict(rows[i].features));
        return out;
    });
}

}  // namespace aq::forest
