#include "vtp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "json.hpp"
#include "vtp/errors.hpp"
#include "vtp/rng.hpp"

namespace vtp::dataset {

std::vector<Window> windowize(const std::vector<ais::Frame>& frames,
                              const WindowizeOptions& opts) {
  std::vector<Window> windows;
  if (frames.empty()) return windows;

  std::map<std::int64_t, const ais::Frame*> by_minute;
  for (const ais::Frame& f : frames) by_minute[f.minute] = &f;

  const std::int64_t first = by_minute.begin()->first;
  const std::int64_t last = by_minute.rbegin()->first;
  const int t_total = opts.t_obs + opts.t_pred;

  for (std::int64_t start = first; start + t_total - 1 <= last; start += opts.stride) {
    std::vector<const ais::Frame*> slab;
    slab.reserve(t_total);
    bool contiguous = true;
    for (int k = 0; k < t_total; ++k) {
      const auto it = by_minute.find(start + k);
      if (it == by_minute.end()) {
        contiguous = false;
        break;
      }
      slab.push_back(it->second);
    }
    if (!contiguous) continue;

    // vessels present in every frame of the window
    std::map<std::string, int> presence;
    for (const ais::Frame* f : slab) {
      for (const auto& p : f->entries) ++presence[p.mmsi];
    }
    std::vector<std::string> mmsis;
    for (const auto& [mmsi, count] : presence) {
      if (count == t_total) mmsis.push_back(mmsi);
    }
    if (static_cast<int>(mmsis.size()) < opts.min_vessels) continue;

    Window w;
    w.start_minute = start;
    w.t_obs = opts.t_obs;
    w.t_pred = opts.t_pred;
    w.mmsis = mmsis;
    w.latlon.resize(static_cast<std::size_t>(t_total) * mmsis.size() * 2);
    for (int t = 0; t < t_total; ++t) {
      const ais::Frame* f = slab[static_cast<std::size_t>(t)];
      for (std::size_t v = 0; v < mmsis.size(); ++v) {
        const auto it = std::find_if(f->entries.begin(), f->entries.end(),
                                     [&](const ais::TrajectoryPoint& p) {
                                       return p.mmsi == mmsis[v];
                                     });
        w.latlon[(t * mmsis.size() + v) * 2 + 0] = it->pos.lat;
        w.latlon[(t * mmsis.size() + v) * 2 + 1] = it->pos.lon;
      }
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

Sample normalize(const Window& w) {
  Sample s;
  s.start_minute = w.start_minute;
  s.t_obs = w.t_obs;
  s.t_pred = w.t_pred;
  s.mmsis = w.mmsis;

  const int n = w.n();
  double lat_sum = 0.0, lon_sum = 0.0;
  for (int v = 0; v < n; ++v) {
    lat_sum += w.lat(0, v);
    lon_sum += w.lon(0, v);
  }
  s.origin = geo::GeoPoint{lat_sum / n, lon_sum / n};

  const double cos_lat = std::cos(s.origin.lat * geo::kDegToRad);
  s.coords.resize(w.latlon.size());
  for (int t = 0; t < w.t_total(); ++t) {
    for (int v = 0; v < n; ++v) {
      const double dlat_rad = (w.lat(t, v) - s.origin.lat) * geo::kDegToRad;
      const double dlon_rad = (w.lon(t, v) - s.origin.lon) * geo::kDegToRad;
      s.coords[(t * n + v) * 2 + 0] = geo::kEarthRadiusNmi * dlon_rad * cos_lat;
      s.coords[(t * n + v) * 2 + 1] = geo::kEarthRadiusNmi * dlat_rad;
    }
  }
  return s;
}

geo::GeoPoint denormalize(const geo::GeoPoint& origin, double x_east, double y_north) {
  const double cos_lat = std::cos(origin.lat * geo::kDegToRad);
  geo::GeoPoint p;
  p.lat = origin.lat + (y_north / geo::kEarthRadiusNmi) * geo::kRadToDeg;
  p.lon = origin.lon + (x_east / (geo::kEarthRadiusNmi * cos_lat)) * geo::kRadToDeg;
  return p;
}

SplitSamples split(std::vector<Sample> samples, double train_ratio, double val_ratio,
                   double test_ratio, std::uint64_t seed) {
  if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9) {
    throw NumericalError("split: ratios must sum to 1");
  }
  Rng rng(seed);
  rng.shuffle(samples);

  const std::size_t n = samples.size();
  const auto n_val = static_cast<std::size_t>(std::lround(val_ratio * static_cast<double>(n)));
  const auto n_test = static_cast<std::size_t>(std::lround(test_ratio * static_cast<double>(n)));
  const std::size_t n_train = n - std::min(n, n_val + n_test);  // remainder to train

  SplitSamples out;
  out.train.assign(samples.begin(), samples.begin() + n_train);
  out.val.assign(samples.begin() + n_train, samples.begin() + n_train + n_val);
  out.test.assign(samples.begin() + n_train + n_val, samples.end());
  return out;
}

void write_samples_jsonl(std::ostream& out, const std::vector<Sample>& samples) {
  for (const Sample& s : samples) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["t0"] = s.start_minute * 60;
    j["t_obs"] = s.t_obs;
    j["t_pred"] = s.t_pred;
    j["origin"] = {{"lat", s.origin.lat}, {"lon", s.origin.lon}};
    j["mmsis"] = s.mmsis;
    auto& coords = j["coords"] = nlohmann::ordered_json::array();
    for (int t = 0; t < s.t_total(); ++t) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int v = 0; v < s.n(); ++v) {
        row.push_back({s.x(t, v), s.y(t, v)});
      }
      coords.push_back(std::move(row));
    }
    out << j.dump() << '\n';
  }
}

std::vector<Sample> read_samples_jsonl(std::istream& in) {
  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("samples line " + std::to_string(line_no) + ": " + e.what());
    }
    Sample s;
    s.id = j.at("id").get<std::int64_t>();
    s.start_minute = j.at("t0").get<std::int64_t>() / 60;
    s.t_obs = j.at("t_obs").get<int>();
    s.t_pred = j.at("t_pred").get<int>();
    s.origin.lat = j.at("origin").at("lat").get<double>();
    s.origin.lon = j.at("origin").at("lon").get<double>();
    s.mmsis = j.at("mmsis").get<std::vector<std::string>>();
    const auto& coords = j.at("coords");
    if (static_cast<int>(coords.size()) != s.t_total()) {
      throw SchemaError("samples line " + std::to_string(line_no) + ": bad coord block");
    }
    s.coords.reserve(static_cast<std::size_t>(s.t_total()) * s.n() * 2);
    for (const auto& row : coords) {
      if (static_cast<int>(row.size()) != s.n()) {
        throw SchemaError("samples line " + std::to_string(line_no) + ": bad coord row");
      }
      for (const auto& xy : row) {
        s.coords.push_back(xy.at(0).get<double>());
        s.coords.push_back(xy.at(1).get<double>());
      }
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace vtp::dataset
