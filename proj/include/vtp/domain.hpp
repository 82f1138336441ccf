#pragma once

#include <vector>

namespace vtp::domain {

// Bin layout of the learnable vessel-domain table: relative bearing split
// into equal sectors with the "dead ahead" sector centered on 0, relative
// heading split into equal bins over [0, 180].
//
// With the defaults (6 x 3): bearing sectors (-30,30], (30,90], (90,150],
// (150,210]=astern (wrapping), (-150,-90], (-90,-30]; heading bins [0,60),
// [60,120), [120,180].
struct BinSpec {
  int n_bearing = 6;
  int n_heading = 3;

  int cells() const { return n_bearing * n_heading; }

  // theta in degrees, any range; sectors are half-open (lo, hi]
  int bearing_bin(double theta_deg) const;

  // phi in [0, 180]; bins half-open [lo, hi) except the last, closed at 180
  int heading_bin(double phi_deg) const;

  int cell(double theta_deg, double phi_deg) const {
    return bearing_bin(theta_deg) * n_heading + heading_bin(phi_deg);
  }

  double bearing_width_deg() const { return 360.0 / n_bearing; }
  double heading_width_deg() const { return 180.0 / n_heading; }

  // sector centers, normalized to (-180, 180]
  double bearing_center_deg(int bin) const;
  double heading_center_deg(int bin) const;

  std::vector<double> bearing_edges_deg() const;  // n_bearing+1 ascending, from -width/2
  std::vector<double> heading_edges_deg() const;  // n_heading+1, 0..180

  bool operator==(const BinSpec&) const = default;
};

}  // namespace vtp::domain
