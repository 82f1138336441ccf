#include "vtp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "vtp/ais.hpp"
#include "vtp/errors.hpp"

namespace vtp::synthetic {

namespace {

double compass_deg(double dx_east, double dy_north) {
  return geo::normalize_deg(std::atan2(dx_east, dy_north) * geo::kRadToDeg);
}

void unit_vec(double course_deg, double& east, double& north) {
  east = std::sin(course_deg * geo::kDegToRad);
  north = std::cos(course_deg * geo::kDegToRad);
}

// average ranks with tie handling
std::vector<double> ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size(), 0.0);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

TrueDomain TrueDomain::standard(const domain::BinSpec& bins) {
  TrueDomain d;
  d.bins = bins;
  d.values.resize(bins.cells());
  for (int b = 0; b < bins.n_bearing; ++b) {
    const double center = std::abs(bins.bearing_center_deg(b));
    const double base = center <= 60.0 + 1e-9 ? 1.0 : 0.3;  // ahead vs astern sectors
    for (int h = 0; h < bins.n_heading; ++h) {
      const bool head_on = h == bins.n_heading - 1;
      d.values[static_cast<std::size_t>(b) * bins.n_heading + h] = base * (head_on ? 1.5 : 1.0);
    }
  }
  return d;
}

double TrueDomain::at(double theta_deg, double phi_deg) const {
  return values[static_cast<std::size_t>(bins.cell(theta_deg, phi_deg))];
}

double TrueDomain::max_value() const { return *std::max_element(values.begin(), values.end()); }

double avoidance_turn_deg(const Scene& scene, const ScenarioConfig& cfg,
                          const std::vector<double>& xs, const std::vector<double>& ys, int i) {
  double turn = 0.0;
  for (int j = 0; j < scene.n(); ++j) {
    if (j == i) continue;
    const double dx = xs[j] - xs[i];
    const double dy = ys[j] - ys[i];
    const double d = std::sqrt(dx * dx + dy * dy);
    const double course_i = scene.vessels[i].course_deg;
    const double course_j = scene.vessels[j].course_deg;
    const double theta =
        d < geo::kStationaryNmi ? 0.0 : geo::normalize_deg(compass_deg(dx, dy) - course_i);
    const double phi =
        geo::relative_heading_deg(geo::AngleDeg(course_j), geo::AngleDeg(course_i));
    const double dom = cfg.domain.at(theta, phi);
    if (d < dom) {
      // turn away from the intruder; dead ahead resolves to starboard
      const double direction = theta > 0.0 ? -1.0 : 1.0;
      turn += direction * cfg.turn_gain_deg_per_nmi * (dom - d);
    }
  }
  return std::clamp(turn, -cfg.turn_cap_deg, cfg.turn_cap_deg);
}

Scene simulate(std::vector<VesselInit> vessels, std::int64_t t0_minute,
               const ScenarioConfig& cfg, Rng& rng) {
  Scene scene;
  scene.t0_minute = t0_minute;
  scene.vessels = std::move(vessels);
  const int n = scene.n();
  scene.track_x.assign(n, {});
  scene.track_y.assign(n, {});

  std::vector<double> xs(n), ys(n);
  for (int v = 0; v < n; ++v) {
    xs[v] = scene.vessels[v].x_nmi;
    ys[v] = scene.vessels[v].y_nmi;
  }
  for (int t = 0; t < cfg.duration_min; ++t) {
    for (int v = 0; v < n; ++v) {
      scene.track_x[v].push_back(xs[v]);
      scene.track_y[v].push_back(ys[v]);
    }
    std::vector<double> nx(n), ny(n);
    for (int v = 0; v < n; ++v) {
      const double heading =
          scene.vessels[v].course_deg + avoidance_turn_deg(scene, cfg, xs, ys, v);
      double e, no;
      unit_vec(heading, e, no);
      const double step = scene.vessels[v].speed_kn / 60.0;
      nx[v] = xs[v] + step * e + cfg.noise_std_nmi * rng.normal();
      ny[v] = ys[v] + step * no + cfg.noise_std_nmi * rng.normal();
    }
    xs = nx;
    ys = ny;
  }
  return scene;
}

std::vector<Scene> generate(const ScenarioConfig& cfg) {
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(cfg.scenes));

  for (int sc = 0; sc < cfg.scenes; ++sc) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(sc)));
    const int n = cfg.n_vessels_min +
                  static_cast<int>(rng.integer(
                      static_cast<std::uint64_t>(cfg.n_vessels_max - cfg.n_vessels_min + 1)));

    auto speed = [&] { return cfg.base_speed_kn + rng.uniform(-cfg.speed_jitter_kn,
                                                              cfg.speed_jitter_kn); };
    auto mmsi = [&](int v) {
      return "SYN" + std::to_string(100000000 + sc * 100 + v);
    };

    std::vector<VesselInit> vessels;
    // reference vessel heading for the meeting point at time tau
    const double chi0 = rng.uniform(-180.0, 180.0);
    const double tau = rng.uniform(6.0, 12.0);
    const double ex = rng.uniform(-0.5, 0.5);
    const double ey = rng.uniform(-0.5, 0.5);

    auto approach = [&](double course, double arrival_min, double lateral) {
      double e, no;
      unit_vec(course, e, no);
      double pe, pn;  // perpendicular, to starboard of the course
      unit_vec(course + 90.0, pe, pn);
      VesselInit v;
      v.course_deg = geo::normalize_deg(course);
      v.speed_kn = speed();
      const double back = v.speed_kn / 60.0 * arrival_min;
      v.x_nmi = ex - e * back + pe * lateral;
      v.y_nmi = ey - no * back + pn * lateral;
      return v;
    };

    // v0: reference; v1: head-on partner; v2/v4: crossings from either
    // side; v3: overtaker from astern
    vessels.push_back(approach(chi0, tau, 0.0));
    if (n >= 2) {
      vessels.push_back(approach(chi0 + 180.0 + rng.uniform(-8.0, 8.0), tau,
                                 rng.uniform(0.03, 0.15)));
    }
    if (n >= 3) {
      vessels.push_back(approach(chi0 + rng.uniform(60.0, 110.0), tau + rng.uniform(-2.0, 2.0),
                                 rng.uniform(-0.1, 0.1)));
    }
    if (n >= 4) {
      VesselInit v3;
      v3.course_deg = geo::normalize_deg(chi0 + rng.uniform(-5.0, 5.0));
      v3.speed_kn = vessels[0].speed_kn + rng.uniform(2.5, 4.0);
      double e, no, pe, pn;
      unit_vec(chi0, e, no);
      unit_vec(chi0 + 90.0, pe, pn);
      const double behind = rng.uniform(0.4, 0.8);
      const double lateral = rng.uniform(0.02, 0.10);
      v3.x_nmi = vessels[0].x_nmi - e * behind + pe * lateral;
      v3.y_nmi = vessels[0].y_nmi - no * behind + pn * lateral;
      vessels.push_back(v3);
    }
    if (n >= 5) {
      vessels.push_back(approach(chi0 - rng.uniform(60.0, 110.0), tau + rng.uniform(-2.0, 2.0),
                                 rng.uniform(-0.1, 0.1)));
    }
    for (int v = 0; v < n; ++v) vessels[static_cast<std::size_t>(v)].mmsi = mmsi(v);

    const std::int64_t t0 =
        cfg.start_minute + static_cast<std::int64_t>(sc) * (cfg.duration_min + cfg.scene_gap_min);
    scenes.push_back(simulate(std::move(vessels), t0, cfg, rng));
  }
  return scenes;
}

double replay_deviation_nmi(const Scene& scene, const ScenarioConfig& cfg) {
  const int n = scene.n();
  double worst = 0.0;
  for (int t = 0; t + 1 < scene.minutes(); ++t) {
    std::vector<double> xs(n), ys(n);
    for (int v = 0; v < n; ++v) {
      xs[v] = scene.track_x[v][static_cast<std::size_t>(t)];
      ys[v] = scene.track_y[v][static_cast<std::size_t>(t)];
    }
    for (int v = 0; v < n; ++v) {
      const double heading =
          scene.vessels[v].course_deg + avoidance_turn_deg(scene, cfg, xs, ys, v);
      double e, no;
      unit_vec(heading, e, no);
      const double step = scene.vessels[v].speed_kn / 60.0;
      const double px = xs[v] + step * e;
      const double py = ys[v] + step * no;
      const double dx = scene.track_x[v][static_cast<std::size_t>(t + 1)] - px;
      const double dy = scene.track_y[v][static_cast<std::size_t>(t + 1)] - py;
      worst = std::max(worst, std::sqrt(dx * dx + dy * dy));
    }
  }
  return worst;
}

void write_scenes_csv(std::ostream& out, const std::vector<Scene>& scenes,
                      const ScenarioConfig& cfg) {
  out << "MMSI,BaseDateTime,LAT,LON,SOG,COG,Heading\n";
  out.precision(12);
  for (const Scene& scene : scenes) {
    for (int t = 0; t < scene.minutes(); ++t) {
      for (int v = 0; v < scene.n(); ++v) {
        const auto p = geo::offset_nmi(cfg.center, scene.track_x[v][static_cast<std::size_t>(t)],
                                       scene.track_y[v][static_cast<std::size_t>(t)]);
        out << scene.vessels[v].mmsi << ','
            << ais::format_timestamp((scene.t0_minute + t) * 60) << ',' << p.lat << ',' << p.lon
            << ',' << scene.vessels[v].speed_kn << ',' << scene.vessels[v].course_deg << ','
            << scene.vessels[v].course_deg << '\n';
      }
    }
  }
}

double domain_recovery_score(const std::vector<double>& learned_effective,
                             const TrueDomain& truth,
                             const std::vector<std::int64_t>& exposure,
                             std::int64_t min_exposure) {
  if (learned_effective.size() != truth.values.size() ||
      exposure.size() != truth.values.size()) {
    throw DimensionError("domain_recovery: bin structure mismatch");
  }
  std::vector<double> a, b;
  for (std::size_t i = 0; i < truth.values.size(); ++i) {
    if (exposure[i] >= min_exposure) {
      a.push_back(learned_effective[i]);
      b.push_back(truth.values[i]);
    }
  }
  if (a.size() < 3) {
    throw NumericalError("domain_recovery: only " + std::to_string(a.size()) +
                         " bins meet the exposure threshold");
  }
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(ra.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) {
    throw NumericalError("domain_recovery: degenerate ranks (all values tied)");
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace vtp::synthetic
