#pragma once

#include <string_view>
#include <optional>

namespace aq {

struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance on a sphere of radius 6371 km.
[[nodiscard]] double haversine_km(GeoPoint a, GeoPoint b);

/// Euclidean distance in degree space (lon, lat treated as planar axes).
[[nodiscard]] double planar_degrees(GeoPoint a, GeoPoint b);

enum class DistanceMetric { PlanarDegrees, HaversineKm };

[[nodiscard]] inline double distance(GeoPoint a, GeoPoint b, DistanceMetric metric) {
    return metric == DistanceMetric::PlanarDegrees ? planar_degrees(a, b) : haversine_km(a, b);
}

[[nodiscard]] std::string_view to_string(DistanceMetric metric);

/// One observed value at a location; the unit of all interpolation.
struct SpatialSample {
    double lon = 0.0;
    double lat = 0.0;
    double value = 0.0;

    [[nodiscard]] GeoPoint location() const { return {lon, lat}; }
};
/// `degrees` or `km`.
[[nodiscard]] std::optional<DistanceMetric> parse_metric(std::string_view text);

}  // namespace aq
