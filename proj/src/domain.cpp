#include "vtp/domain.hpp"

#include <cmath>

#include "vtp/geo.hpp"

namespace vtp::domain {

int BinSpec::bearing_bin(double theta_deg) const {
  const double w = bearing_width_deg();
  const double t = geo::normalize_deg(theta_deg);
  // half-open (lo, hi] sectors centered on multiples of w
  int bin = static_cast<int>(std::ceil((t - 0.5 * w) / w));
  bin %= n_bearing;
  if (bin < 0) bin += n_bearing;
  return bin;
}

int BinSpec::heading_bin(double phi_deg) const {
  const double w = heading_width_deg();
  int bin = static_cast<int>(std::floor(phi_deg / w));
  if (bin < 0) bin = 0;
  if (bin >= n_heading) bin = n_heading - 1;  // phi == 180 lands in the last bin
  return bin;
}

double BinSpec::bearing_center_deg(int bin) const {
  return geo::normalize_deg(bin * bearing_width_deg());
}

double BinSpec::heading_center_deg(int bin) const {
  return (bin + 0.5) * heading_width_deg();
}

std::vector<double> BinSpec::bearing_edges_deg() const {
  std::vector<double> edges;
  const double w = bearing_width_deg();
  for (int i = 0; i <= n_bearing; ++i) edges.push_back(-0.5 * w + i * w);
  return edges;
}

std::vector<double> BinSpec::heading_edges_deg() const {
  std::vector<double> edges;
  const double w = heading_width_deg();
  for (int i = 0; i <= n_heading; ++i) edges.push_back(i * w);
  return edges;
}

}  // namespace vtp::domain
