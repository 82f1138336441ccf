#pragma once

#include <optional>

namespace vtp::geo {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

// mean Earth radius in nautical miles
inline constexpr double kEarthRadiusNmi = 3440.065;

// displacements below this are treated as stationary
inline constexpr double kStationaryNmi = 1e-9;

// Normalizes degrees to (-180, 180]; idempotent.
double normalize_deg(double deg);

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  bool valid() const;
};

// Compass-style angle, normalized to (-180, 180] on construction.
class AngleDeg {
 public:
  AngleDeg() = default;
  explicit AngleDeg(double deg) : deg_(normalize_deg(deg)) {}
  double deg() const { return deg_; }

 private:
  double deg_ = 0.0;
};

// Flat-earth distance with longitude scaled by cos of the mean latitude.
double equirect_distance_nmi(const GeoPoint& a, const GeoPoint& b);

// Compass heading of the displacement prev -> curr (0 = north, 90 = east).
// nullopt when the displacement is below the stationary threshold; the
// caller carries the previous heading forward.
std::optional<AngleDeg> heading_from_displacement(const GeoPoint& prev, const GeoPoint& curr);

// Bearing of `other` relative to own heading: 0 = dead ahead, 180 = astern,
// positive to starboard. nullopt for coincident positions.
std::optional<AngleDeg> relative_bearing(const GeoPoint& own, AngleDeg own_heading,
                                         const GeoPoint& other);

// Absolute heading difference folded to [0, 180]: 0 = same direction,
// 180 = head-on. Symmetric.
double relative_heading_deg(AngleDeg a, AngleDeg b);

// Point at the given local east/north offset from origin (tangent-plane
// inverse of the equirectangular projection at origin's latitude).
GeoPoint offset_nmi(const GeoPoint& origin, double east_nmi, double north_nmi);

}  // namespace vtp::geo
