#include "aq/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aq {

double haversine_km(GeoPoint a, GeoPoint b) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * rad;
    const double dlon = (b.lon - a.lon) * rad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(a.lat * rad) * std::cos(b.lat * rad) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double planar_degrees(GeoPoint a, GeoPoint b) {
    return std::hypot(a.lon - b.lon, a.lat - b.lat);
}

std::string_view to_string(DistanceMetric metric) {
    return metric == DistanceMetric::PlanarDegrees ? "degrees" : "km";
}

std::optional<DistanceMetric> parse_metric(std::string_view text) {
    if (text == "degrees" || text == "deg") return DistanceMetric::PlanarDegrees;
    if (text == "km" || text == "haversine") return DistanceMetric::HaversineKm;
    return std::nullopt;
}

}  // namespace aq
