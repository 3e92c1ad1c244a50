#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "aq/geo.hpp"
#include "aq/variogram.hpp"

namespace aq::interp {

// --- IDW -------------------------------------------------------------------------

struct AllSamples {};
struct NearestK {
    std::size_t k = 8;
};
struct WithinRadius {
    double radius = 0.1;  // metric units
};
using Neighbourhood = std::variant<AllSamples, NearestK, WithinRadius>;

struct IdwParams {
    double power = 2.0;
    Neighbourhood neighbourhood = AllSamples{};
    DistanceMetric metric = DistanceMetric::PlanarDegrees;
};

/// Samples closer than this (planar degrees) to the target are treated as coincident.
inline constexpr double kCoincidentDegrees = 1e-12;

/// Weighted mean with weights 1/d^p over the neighbourhood. A target that
/// coincides with a sample returns that sample's value.
[[nodiscard]] double idw_interpolate(std::span<const SpatialSample> samples, GeoPoint target,
                                     const IdwParams& params);

// --- accuracy ----------------------------------------------------------------------

struct AccuracyReport {
    std::size_t n = 0;
    double sse = 0.0;
    double mse = 0.0;
    double tss = 0.0;
    double rmse = 0.0;
    std::optional<double> r2;  // absent when tss == 0
};

[[nodiscard]] AccuracyReport accuracy(std::span<const double> observed,
                                      std::span<const double> predicted);

// --- ordinary kriging --------------------------------------------------------------

struct KrigingWeights {
    std::vector<double> weights;
    double lagrange = 0.0;
};

/// Ordinary kriging system [Gamma 1; 1' 0][w; mu] = [gamma_0; 1], factored
/// once (LU with partial pivoting) and reused for every target. A singular
/// system is retried once with 1e-10 * sill added to Gamma's diagonal.
class OrdinaryKriging {
public:
    OrdinaryKriging(std::vector<SpatialSample> samples, const vario::VariogramModel& model,
                    DistanceMetric metric = DistanceMetric::PlanarDegrees);
    ~OrdinaryKriging();
    OrdinaryKriging(OrdinaryKriging&&) noexcept;
    OrdinaryKriging& operator=(OrdinaryKriging&&) noexcept;

    [[nodiscard]] KrigingWeights weights(GeoPoint target) const;
    [[nodiscard]] double predict(GeoPoint target) const;
    [[nodiscard]] bool regularized() const { return regularized_; }
    [[nodiscard]] const vario::VariogramModel& model() const { return model_; }
    [[nodiscard]] std::span<const SpatialSample> samples() const { return samples_; }

private:
    struct Factor;
    std::vector<SpatialSample> samples_;
    vario::VariogramModel model_;
    DistanceMetric metric_;
    bool regularized_ = false;
    std::unique_ptr<Factor> factor_;
};

[[nodiscard]] KrigingWeights ok_weights(std::span<const SpatialSample> samples, GeoPoint target,
                                        const vario::VariogramModel& model,
                                        DistanceMetric metric = DistanceMetric::PlanarDegrees);

[[nodiscard]] double ok_interpolate(std::span<const SpatialSample> samples, GeoPoint target,
                                    const vario::VariogramModel& model,
                                    DistanceMetric metric = DistanceMetric::PlanarDegrees);

// --- cross-validation --------------------------------------------------------------

struct CvConfig {
    std::size_t k = 10;
    std::uint64_t seed = 0;
};

/// Seeded shuffle dealt round-robin into k folds (sizes differ by at most 1).
[[nodiscard]] std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                               std::uint64_t seed);

/// Predicts the `test` rows from a model trained on the `train` rows.
using FoldPredictor = std::function<std::vector<double>(std::span<const std::size_t> train,
                                                        std::span<const std::size_t> test)>;

struct CvResult {
    AccuracyReport report;
    std::vector<double> predictions;  // held-out prediction per row
};

/// Pools held-out predictions over all folds. Folds run in parallel.
[[nodiscard]] CvResult kfold_cv(std::span<const double> observed, const CvConfig& cv,
                                const FoldPredictor& predictor);
/// Single-threaded reference; identical output.
[[nodiscard]] CvResult kfold_cv_serial(std::span<const double> observed, const CvConfig& cv,
                                       const FoldPredictor& predictor);

[[nodiscard]] AccuracyReport kfold_cv(std::span<const SpatialSample> samples, const CvConfig& cv,
                                      const IdwParams& params);
[[nodiscard]] AccuracyReport kfold_cv(std::span<const SpatialSample> samples, const CvConfig& cv,
                                      const vario::VariogramModel& model,
                                      DistanceMetric metric = DistanceMetric::PlanarDegrees);

// --- IDW power selection -----------------------------------------------------------

struct PowerScore {
    double power = 0.0;
    double rmse = 0.0;
    std::optional<double> r2;
};

struct PowerSelection {
    double best_power = 0.0;
    std::vector<PowerScore> per_power;  // ascending power
};

/// 0.1, 0.2, ..., 2.0
[[nodiscard]] std::vector<double> default_power_grid();

/// argmin RMSE; equal minima resolve to the smaller power.
[[nodiscard]] PowerSelection select_power(std::vector<PowerScore> scores);

[[nodiscard]] PowerSelection idw_select_power(std::span<const SpatialSample> samples,
                                              std::span<const double> power_grid,
                                              const CvConfig& cv, IdwParams base = {});

}  // namespace aq::interp
