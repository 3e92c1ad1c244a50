#include "aq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "aq/error.hpp"

namespace aq::interp {

void GridSpec::validate() const {
    if (!(lon_min < lon_max) || !(lat_min < lat_max))
        throw Error(ErrorCode::InvalidArgument, "grid bounds need min < max on both axes");
    if (!(cell > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid cell must be > 0");
}

std::size_t GridSpec::nx() const {
    return static_cast<std::size_t>(std::floor((lon_max - lon_min) / cell + 1e-9)) + 1;
}

std::size_t GridSpec::ny() const {
    return static_cast<std::size_t>(std::floor((lat_max - lat_min) / cell + 1e-9)) + 1;
}

GeoPoint GridSpec::node(std::size_t k) const {
    const std::size_t cols = nx();
    return {lon_min + static_cast<double>(k % cols) * cell,
            lat_min + static_cast<double>(k / cols) * cell};
}

GridSpec GridSpec::around(std::span<const GeoPoint> points, double cell) {
    if (points.empty()) throw Error(ErrorCode::TooFewSamples, "grid needs at least one point");
    GridSpec g;
    g.cell = cell;
    g.lon_min = g.lat_min = std::numeric_limits<double>::infinity();
    g.lon_max = g.lat_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        g.lon_min = std::min(g.lon_min, p.lon);
        g.lon_max = std::max(g.lon_max, p.lon);
        g.lat_min = std::min(g.lat_min, p.lat);
        g.lat_max = std::max(g.lat_max, p.lat);
    }
    g.lon_min -= cell;
    g.lon_max += cell;
    g.lat_min -= cell;
    g.lat_max += cell;
    return g;
}

namespace {

GridNode eval_node(const GridSpec& grid, std::size_t k, const PointPredictor& predict) {
    const GeoPoint p = grid.node(k);
    try {
        return {p.lon, p.lat, predict(p)};
    } catch (const Error& e) {
        char where[64];
        std::snprintf(where, sizeof where, "at node (%.6f, %.6f): ", p.lon, p.lat);
        throw Error(e.code(), where + e.detail());
    }
}

}  // namespace

std::vector<GridNode> grid_interpolate(const GridSpec& grid, const PointPredictor& predict) {
    grid.validate();
    const std::size_t n = grid.size();
    std::vector<GridNode> out(n);
    std::vector<std::optional<Error>> errors(n);
    const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            out[i] = eval_node(grid, i, predict);
        } catch (const Error& e) {
            errors[i] = e;
        }
    }
    for (auto& e : errors)
        if (e) throw *e;
    return out;
}

std::vector<GridNode> grid_interpolate_serial(const GridSpec& grid, const PointPredictor& predict) {
    grid.validate();
    std::vector<GridNode> out;
    out.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out.push_back(eval_node(grid, k, predict));
    return out;
}

std::vector<GridNode> grid_interpolate(std::span<const SpatialSample> samples, const GridSpec& grid,
                                       const IdwParams& params) {
    return grid_interpolate(grid, [&](GeoPoint p) { return idw_interpolate(samples, p, params); });
}

std::vector<GridNode> grid_interpolate(std::span<const SpatialSample> samples, const GridSpec& grid,
                                       const vario::VariogramModel& model, DistanceMetric metric) {
    const OrdinaryKriging ok({samples.begin(), samples.end()}, model, metric);
    return grid_interpolate(grid, [&](GeoPoint p) { return ok.predict(p); });
}

std::vector<GridNode> grid_interpolate(std::span<const forest::LabeledRow> stations,
                                       const GridSpec& grid, const forest::RfkModel& model,
                                       double covariate_power) {
    return grid_interpolate(grid, [&](GeoPoint p) {
        return model.predict(forest::covariates_at(stations, p, covariate_power));
    });
}

}  // namespace aq::interp
