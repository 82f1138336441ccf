#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vtp/geo.hpp"
#include "vtp/rng.hpp"

using namespace vtp;
using geo::AngleDeg;
using geo::GeoPoint;

TEST_CASE("normalize_deg range and idempotence") {
  CHECK(geo::normalize_deg(180.0) == 180.0);
  CHECK(geo::normalize_deg(-180.0) == 180.0);
  CHECK(geo::normalize_deg(540.0) == 180.0);
  CHECK(geo::normalize_deg(370.0) == doctest::Approx(10.0));
  CHECK(geo::normalize_deg(-350.0) == doctest::Approx(10.0));

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-1e4, 1e4);
    const double once = geo::normalize_deg(x);
    CHECK(once > -180.0);
    CHECK(once <= 180.0);
    CHECK(geo::normalize_deg(once) == once);
  }
}

TEST_CASE("equirectangular distance") {
  const GeoPoint p{32.0, -117.0};
  CHECK(geo::equirect_distance_nmi(p, p) == 0.0);

  // one degree of pure latitude: R * pi/180
  const double expect_lat = geo::kEarthRadiusNmi * geo::kPi / 180.0;
  CHECK(expect_lat == doctest::Approx(60.04).epsilon(0.0002));
  CHECK(geo::equirect_distance_nmi(p, GeoPoint{33.0, -117.0}) ==
        doctest::Approx(expect_lat).epsilon(1e-12));

  // one degree of longitude scales by cos of the mean latitude
  const double expect_lon = expect_lat * std::cos(32.0 * geo::kDegToRad);
  CHECK(geo::equirect_distance_nmi(p, GeoPoint{32.0, -116.0}) ==
        doctest::Approx(expect_lon).epsilon(1e-3));
  CHECK(geo::equirect_distance_nmi(p, GeoPoint{32.0, -116.0}) ==
        doctest::Approx(50.91).epsilon(1e-3));
}

TEST_CASE("distance symmetry property") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const GeoPoint a{rng.uniform(-60.0, 60.0), rng.uniform(-179.0, 179.0)};
    const GeoPoint b{a.lat + rng.uniform(-0.5, 0.5), a.lon + rng.uniform(-0.5, 0.5)};
    CHECK(geo::equirect_distance_nmi(a, b) == geo::equirect_distance_nmi(b, a));
    CHECK(geo::equirect_distance_nmi(a, a) == 0.0);
  }
}

TEST_CASE("heading from displacement") {
  const GeoPoint base{32.7, -117.2};
  CHECK(geo::heading_from_displacement(base, GeoPoint{32.8, -117.2})->deg() == 0.0);
  CHECK(geo::heading_from_displacement(base, GeoPoint{32.7, -117.1})->deg() == 90.0);
  CHECK_FALSE(geo::heading_from_displacement(base, base).has_value());

  // equal north and east displacement at the equator -> 45 degrees
  const GeoPoint eq{0.0, 10.0};
  const auto h = geo::heading_from_displacement(eq, GeoPoint{0.01, 10.01});
  CHECK(h->deg() == doctest::Approx(45.0).epsilon(1e-6));
}

TEST_CASE("relative bearing") {
  const GeoPoint own{32.7, -117.2};
  const AngleDeg north(0.0);
  CHECK(geo::relative_bearing(own, north, GeoPoint{32.8, -117.2})->deg() == 0.0);
  CHECK(geo::relative_bearing(own, north, GeoPoint{32.6, -117.2})->deg() == 180.0);
  CHECK(geo::relative_bearing(own, north, GeoPoint{32.7, -117.1})->deg() == 90.0);
  CHECK_FALSE(geo::relative_bearing(own, north, own).has_value());
}

TEST_CASE("relative bearing shifts opposite to heading") {
  Rng rng(29);
  const GeoPoint own{32.7, -117.2};
  for (int i = 0; i < 100; ++i) {
    const GeoPoint other{own.lat + rng.uniform(-0.05, 0.05), own.lon + rng.uniform(-0.05, 0.05)};
    if (geo::equirect_distance_nmi(own, other) < 1e-6) continue;
    const double h = rng.uniform(-180.0, 180.0);
    const double delta = rng.uniform(-360.0, 360.0);
    const auto b0 = geo::relative_bearing(own, AngleDeg(h), other);
    const auto b1 = geo::relative_bearing(own, AngleDeg(h + delta), other);
    const double diff = geo::normalize_deg(b1->deg() - (b0->deg() - delta));
    CHECK(std::abs(diff) < 1e-9);
  }
}

TEST_CASE("relative heading") {
  CHECK(geo::relative_heading_deg(AngleDeg(0.0), AngleDeg(180.0)) == 180.0);
  CHECK(geo::relative_heading_deg(AngleDeg(0.0), AngleDeg(0.0)) == 0.0);
  CHECK(geo::relative_heading_deg(AngleDeg(350.0), AngleDeg(10.0)) == doctest::Approx(20.0));

  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const AngleDeg a(rng.uniform(-720.0, 720.0));
    const AngleDeg b(rng.uniform(-720.0, 720.0));
    const double ab = geo::relative_heading_deg(a, b);
    CHECK(ab == geo::relative_heading_deg(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 180.0);
  }
}

TEST_CASE("geo point validity") {
  CHECK(GeoPoint{32.0, -117.0}.valid());
  CHECK_FALSE(GeoPoint{91.0, 0.0}.valid());
  CHECK_FALSE(GeoPoint{0.0, 181.0}.valid());
  CHECK_FALSE(GeoPoint{std::nan(""), 0.0}.valid());
}
