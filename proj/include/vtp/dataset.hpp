#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vtp/ais.hpp"
#include "vtp/geo.hpp"

namespace vtp::dataset {

// A window of consecutive frames in raw geographic coordinates, restricted
// to the vessels present in every frame of the window.
struct Window {
  std::int64_t start_minute = 0;
  int t_obs = 5;
  int t_pred = 5;
  std::vector<std::string> mmsis;
  std::vector<double> latlon;  // [t][v][2] = lat, lon

  int n() const { return static_cast<int>(mmsis.size()); }
  int t_total() const { return t_obs + t_pred; }
  double lat(int t, int v) const { return latlon[(t * n() + v) * 2 + 0]; }
  double lon(int t, int v) const { return latlon[(t * n() + v) * 2 + 1]; }
};

// One training instance: local east/north offsets in nautical miles from
// the sample origin (the centroid of the first frame). Euclidean distance
// in these coordinates equals the equirectangular distance by construction.
struct Sample {
  std::int64_t id = 0;
  std::int64_t start_minute = 0;
  int t_obs = 5;
  int t_pred = 5;
  geo::GeoPoint origin;
  std::vector<std::string> mmsis;
  std::vector<double> coords;  // [t][v][2] = x_east, y_north, nmi

  int n() const { return static_cast<int>(mmsis.size()); }
  int t_total() const { return t_obs + t_pred; }
  double x(int t, int v) const { return coords[(t * n() + v) * 2 + 0]; }
  double y(int t, int v) const { return coords[(t * n() + v) * 2 + 1]; }
  double& x(int t, int v) { return coords[(t * n() + v) * 2 + 0]; }
  double& y(int t, int v) { return coords[(t * n() + v) * 2 + 1]; }
};

struct WindowizeOptions {
  int t_obs = 5;
  int t_pred = 5;
  int stride = 5;  // defaults to t_obs: non-overlapping observation windows
  int min_vessels = 3;
};

// Sliding windows of t_obs+t_pred consecutive minutes anchored on a stride
// grid starting at the first frame; keeps vessels present in all frames of
// a window, drops windows with fewer than min_vessels such vessels.
std::vector<Window> windowize(const std::vector<ais::Frame>& frames,
                              const WindowizeOptions& opts = {});

// Local tangent-plane projection around the window's first-frame centroid.
Sample normalize(const Window& w);
geo::GeoPoint denormalize(const geo::GeoPoint& origin, double x_east, double y_north);

struct SplitSamples {
  std::vector<Sample> train, val, test;
};

// Deterministic shuffle under `seed`, then partition; val/test sizes are
// the rounded ratios, remainder goes to train.
SplitSamples split(std::vector<Sample> samples, double train_ratio, double val_ratio,
                   double test_ratio, std::uint64_t seed);

// Newline-delimited sample records; field order is fixed:
// id, t0, t_obs, t_pred, origin{lat,lon}, mmsis, coords[t][v][2].
void write_samples_jsonl(std::ostream& out, const std::vector<Sample>& samples);
std::vector<Sample> read_samples_jsonl(std::istream& in);

}  // namespace vtp::dataset
