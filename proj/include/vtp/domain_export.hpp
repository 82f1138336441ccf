#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "vtp/model.hpp"

namespace vtp::domain_export {

struct DomainRecord {
  double bearing_center_deg = 0.0;
  double heading_center_deg = 0.0;
  double raw_value_nmi = 0.0;
  double effective_value_nmi = 0.0;  // max(raw, 0); negative raw disables the sector
  std::int64_t exposure = 0;
};

// One record per bin in row-major (bearing, heading) order. Raw values are
// kept alongside the clamped ones, so the export is lossless. Throws
// VariantError for a model trained without spatial attention.
std::vector<DomainRecord> export_domain(const model::ModelParams& params,
                                        std::span<const std::int64_t> exposure = {});

void write_domain_csv(std::ostream& out, const std::vector<DomainRecord>& records);

struct RobustnessRecord {
  double bearing_center_deg = 0.0;
  double heading_center_deg = 0.0;
  double mean = 0.0;
  double stdev = 0.0;  // sample std over seeds
  double cv = 0.0;     // stdev / mean; 0 when the mean vanishes
  bool exposed = false;
  std::int64_t min_exposure_seen = 0;
};

// Per-bin statistics of the effective domain over checkpoints that differ
// only in seed. Requires at least two checkpoints with identical bin
// structures.
std::vector<RobustnessRecord> seed_robustness(
    std::span<const model::ModelParams> checkpoints,
    std::span<const std::vector<std::int64_t>> exposures, std::int64_t min_exposure = 50);

void write_robustness_csv(std::ostream& out, const std::vector<RobustnessRecord>& records);

// Bearing sector with the largest mean effective value over its exposed
// heading bins; -1 when nothing is exposed.
int argmax_bearing_sector(const model::ModelParams& params,
                          std::span<const std::int64_t> exposure, std::int64_t min_exposure = 50);

}  // namespace vtp::domain_export
