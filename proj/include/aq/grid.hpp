#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "aq/geo.hpp"
#include "aq/interpolation.hpp"
#include "aq/rfk.hpp"

namespace aq::interp {

inline constexpr double kDefaultCellDegrees = 0.01;

struct GridSpec {
    double lon_min = 0.0;
    double lon_max = 0.0;
    double lat_min = 0.0;
    double lat_max = 0.0;
    double cell = kDefaultCellDegrees;

    void validate() const;
    [[nodiscard]] std::size_t nx() const;
    [[nodiscard]] std::size_t ny() const;
    [[nodiscard]] std::size_t size() const { return nx() * ny(); }
    /// Row-major: node k sits at column k % nx (lon), row k / nx (lat).
    [[nodiscard]] GeoPoint node(std::size_t k) const;

    /// Bounding box of the samples padded by one cell on every side.
    [[nodiscard]] static GridSpec around(std::span<const GeoPoint> points,
                                         double cell = kDefaultCellDegrees);
};

struct GridNode {
    double lon = 0.0;
    double lat = 0.0;
    double value = 0.0;
};

using PointPredictor = std::function<double(GeoPoint)>;

/// Evaluates `predict` at every node in parallel; output is row-major. An
/// Error at a node is rethrown with the node coordinates prepended.
[[nodiscard]] std::vector<GridNode> grid_interpolate(const GridSpec& grid, const PointPredictor& predict);
/// Single-threaded reference.
[[nodiscard]] std::vector<GridNode> grid_interpolate_serial(const GridSpec& grid,
                                                            const PointPredictor& predict);

[[nodiscard]] std::vector<GridNode> grid_interpolate(std::span<const SpatialSample> samples,
                                                     const GridSpec& grid, const IdwParams& params);
[[nodiscard]] std::vector<GridNode> grid_interpolate(std::span<const SpatialSample> samples,
                                                     const GridSpec& grid,
                                                     const vario::VariogramModel& model,
                                                     DistanceMetric metric = DistanceMetric::PlanarDegrees);
/// RFK surface: node covariates come from forest::covariates_at over `stations`.
[[nodiscard]] std::vector<GridNode> grid_interpolate(std::span<const forest::LabeledRow> stations,
                                                     const GridSpec& grid,
                                                     const forest::RfkModel& model,
                                                     double covariate_power = 2.0);

}  // namespace aq::interp
