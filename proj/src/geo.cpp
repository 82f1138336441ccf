#include "vtp/geo.hpp"

#include <cmath>

namespace vtp::geo {

double normalize_deg(double deg) {
  double x = std::fmod(deg, 360.0);
  if (x <= -180.0) x += 360.0;
  if (x > 180.0) x -= 360.0;
  return x;
}

bool GeoPoint::valid() const {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

// Local east/north displacement in nautical miles.
static void displacement_nmi(const GeoPoint& from, const GeoPoint& to, double& east,
                             double& north) {
  const double mean_lat_rad = 0.5 * (from.lat + to.lat) * kDegToRad;
  const double dlat_rad = (to.lat - from.lat) * kDegToRad;
  const double dlon_rad = normalize_deg(to.lon - from.lon) * kDegToRad;
  east = kEarthRadiusNmi * dlon_rad * std::cos(mean_lat_rad);
  north = kEarthRadiusNmi * dlat_rad;
}

double equirect_distance_nmi(const GeoPoint& a, const GeoPoint& b) {
  double east = 0.0, north = 0.0;
  displacement_nmi(a, b, east, north);
  return std::sqrt(east * east + north * north);
}

std::optional<AngleDeg> heading_from_displacement(const GeoPoint& prev, const GeoPoint& curr) {
  double east = 0.0, north = 0.0;
  displacement_nmi(prev, curr, east, north);
  if (std::sqrt(east * east + north * north) < kStationaryNmi) return std::nullopt;
  return AngleDeg(std::atan2(east, north) * kRadToDeg);
}

std::optional<AngleDeg> relative_bearing(const GeoPoint& own, AngleDeg own_heading,
                                         const GeoPoint& other) {
  const auto sight_line = heading_from_displacement(own, other);
  if (!sight_line) return std::nullopt;
  return AngleDeg(sight_line->deg() - own_heading.deg());
}

double relative_heading_deg(AngleDeg a, AngleDeg b) {
  return std::abs(normalize_deg(b.deg() - a.deg()));
}

GeoPoint offset_nmi(const GeoPoint& origin, double east_nmi, double north_nmi) {
  const double cos_lat = std::cos(origin.lat * kDegToRad);
  GeoPoint p;
  p.lat = origin.lat + (north_nmi / kEarthRadiusNmi) * kRadToDeg;
  p.lon = origin.lon + (east_nmi / (kEarthRadiusNmi * cos_lat)) * kRadToDeg;
  return p;
}

}  // namespace vtp::geo
