#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vtp/domain.hpp"
#include "vtp/geo.hpp"
#include "vtp/rng.hpp"

namespace vtp::synthetic {

// Ground-truth interaction domain, same bin structure as the learnable
// table. Default: 1.0 nmi in the forward-looking bearing sectors, 0.3 nmi
// astern, scaled by 1.5 in the head-on relative-heading bin.
struct TrueDomain {
  domain::BinSpec bins;
  std::vector<double> values;  // [bearing * n_heading + heading], nmi

  static TrueDomain standard(const domain::BinSpec& bins = {});
  double at(double theta_deg, double phi_deg) const;
  double max_value() const;
};

struct ScenarioConfig {
  int scenes = 100;
  int n_vessels_min = 3;
  int n_vessels_max = 5;
  double base_speed_kn = 6.0;
  double speed_jitter_kn = 1.5;
  double noise_std_nmi = 0.005;
  int duration_min = 20;
  double turn_gain_deg_per_nmi = 40.0;
  double turn_cap_deg = 30.0;
  std::uint64_t seed = 1;
  TrueDomain domain = TrueDomain::standard();
  geo::GeoPoint center{32.72, -117.20};
  std::int64_t start_minute = 24733440;  // 2017-01-10T00:00 UTC
  int scene_gap_min = 40;                // idle minutes between scenes
};

// One vessel's script: start position in the local east/north plane around
// the scenario center, preferred course, commanded speed.
struct VesselInit {
  std::string mmsi;
  double x_nmi = 0.0;
  double y_nmi = 0.0;
  double course_deg = 0.0;
  double speed_kn = 0.0;
};

struct Scene {
  std::int64_t t0_minute = 0;
  std::vector<VesselInit> vessels;
  std::vector<std::vector<double>> track_x;  // [v][minute], nmi east
  std::vector<std::vector<double>> track_y;  // [v][minute], nmi north

  int n() const { return static_cast<int>(vessels.size()); }
  int minutes() const { return track_x.empty() ? 0 : static_cast<int>(track_x[0].size()); }
};

// Repulsive course offset for vessel i given current positions: every
// neighbor inside the true domain contributes gain * intrusion depth away
// from its bearing, summed and clamped to +/- turn_cap.
double avoidance_turn_deg(const Scene& scene, const ScenarioConfig& cfg,
                          const std::vector<double>& xs, const std::vector<double>& ys, int i);

// Steps the scripted vessels minute by minute; Gaussian position noise is
// injected into the state, so emitted tracks are the dynamic state.
Scene simulate(std::vector<VesselInit> vessels, std::int64_t t0_minute,
               const ScenarioConfig& cfg, Rng& rng);

// Scenes with head-on, crossing and overtaking encounters by construction
// of the initial placements. Deterministic per (seed, scene index).
std::vector<Scene> generate(const ScenarioConfig& cfg);

// Largest deviation (nmi) between each emitted step and a replay of the
// avoidance rule from the emitted state; zero when noise_std is zero.
double replay_deviation_nmi(const Scene& scene, const ScenarioConfig& cfg);

// Same CSV schema as raw AIS input, so scenes feed the normal pipeline.
void write_scenes_csv(std::ostream& out, const std::vector<Scene>& scenes,
                      const ScenarioConfig& cfg);

// Spearman rank correlation between learned and true bin values over bins
// with at least min_exposure pair observations. Throws NumericalError when
// fewer than 3 bins qualify.
double domain_recovery_score(const std::vector<double>& learned_effective,
                             const TrueDomain& truth,
                             const std::vector<std::int64_t>& exposure,
                             std::int64_t min_exposure = 50);

}  // namespace vtp::synthetic
