#include "vtp/domain_export.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "vtp/errors.hpp"

namespace vtp::domain_export {

std::vector<DomainRecord> export_domain(const model::ModelParams& params,
                                        std::span<const std::int64_t> exposure) {
  if (!params.cfg.use_spatial) {
    throw VariantError("export_domain: checkpoint variant '" +
                       model::variant_name(params.cfg) + "' has no spatial attention");
  }
  const domain::BinSpec& bins = params.cfg.bins;
  if (!exposure.empty() && static_cast<int>(exposure.size()) != bins.cells()) {
    throw DimensionError("export_domain: exposure size does not match bin structure");
  }
  std::vector<DomainRecord> out;
  out.reserve(static_cast<std::size_t>(bins.cells()));
  for (int b = 0; b < bins.n_bearing; ++b) {
    for (int h = 0; h < bins.n_heading; ++h) {
      const std::size_t cell = static_cast<std::size_t>(b) * bins.n_heading + h;
      DomainRecord rec;
      rec.bearing_center_deg = bins.bearing_center_deg(b);
      rec.heading_center_deg = bins.heading_center_deg(h);
      rec.raw_value_nmi = params.domain_table.v[cell];
      rec.effective_value_nmi = std::max(rec.raw_value_nmi, 0.0);
      rec.exposure = exposure.empty() ? 0 : exposure[cell];
      out.push_back(rec);
    }
  }
  return out;
}

void write_domain_csv(std::ostream& out, const std::vector<DomainRecord>& records) {
  out << "bearing_deg_center,heading_deg_center,raw_value_nmi,effective_value_nmi,exposure\n";
  out.precision(17);
  for (const auto& r : records) {
    out << r.bearing_center_deg << ',' << r.heading_center_deg << ',' << r.raw_value_nmi << ','
        << r.effective_value_nmi << ',' << r.exposure << '\n';
  }
}

std::vector<RobustnessRecord> seed_robustness(
    std::span<const model::ModelParams> checkpoints,
    std::span<const std::vector<std::int64_t>> exposures, std::int64_t min_exposure) {
  if (checkpoints.size() < 2) {
    throw DimensionError("seed_robustness: need at least 2 checkpoints, got " +
                         std::to_string(checkpoints.size()));
  }
  const domain::BinSpec& bins = checkpoints[0].cfg.bins;
  for (const auto& c : checkpoints) {
    if (!c.cfg.use_spatial) throw VariantError("seed_robustness: non-spatial checkpoint");
    if (!(c.cfg.bins == bins)) {
      throw DimensionError("seed_robustness: mismatched bin structures");
    }
  }
  if (!exposures.empty() && exposures.size() != checkpoints.size()) {
    throw DimensionError("seed_robustness: exposure list does not match checkpoints");
  }

  std::vector<RobustnessRecord> out;
  for (int b = 0; b < bins.n_bearing; ++b) {
    for (int h = 0; h < bins.n_heading; ++h) {
      const std::size_t cell = static_cast<std::size_t>(b) * bins.n_heading + h;
      RobustnessRecord rec;
      rec.bearing_center_deg = bins.bearing_center_deg(b);
      rec.heading_center_deg = bins.heading_center_deg(h);

      double sum = 0.0;
      for (const auto& c : checkpoints) sum += std::max(c.domain_table.v[cell], 0.0);
      rec.mean = sum / static_cast<double>(checkpoints.size());
      double ss = 0.0;
      for (const auto& c : checkpoints) {
        const double e = std::max(c.domain_table.v[cell], 0.0) - rec.mean;
        ss += e * e;
      }
      rec.stdev = std::sqrt(ss / static_cast<double>(checkpoints.size() - 1));
      rec.cv = rec.mean > 1e-9 ? rec.stdev / rec.mean : 0.0;

      rec.min_exposure_seen = 0;
      if (!exposures.empty()) {
        rec.min_exposure_seen = exposures[0][cell];
        for (const auto& e : exposures) {
          rec.min_exposure_seen = std::min(rec.min_exposure_seen, e[cell]);
        }
      }
      rec.exposed = !exposures.empty() && rec.min_exposure_seen >= min_exposure;
      out.push_back(rec);
    }
  }
  return out;
}

void write_robustness_csv(std::ostream& out, const std::vector<RobustnessRecord>& records) {
  out << "bearing_deg_center,heading_deg_center,mean,std,cv,exposed,min_exposure\n";
  out.precision(17);
  for (const auto& r : records) {
    out << r.bearing_center_deg << ',' << r.heading_center_deg << ',' << r.mean << ','
        << r.stdev << ',' << r.cv << ',' << (r.exposed ? 1 : 0) << ',' << r.min_exposure_seen
        << '\n';
  }
}

int argmax_bearing_sector(const model::ModelParams& params,
                          std::span<const std::int64_t> exposure, std::int64_t min_exposure) {
  const domain::BinSpec& bins = params.cfg.bins;
  int best = -1;
  double best_value = -1.0;
  for (int b = 0; b < bins.n_bearing; ++b) {
    double sum = 0.0;
    int count = 0;
    for (int h = 0; h < bins.n_heading; ++h) {
      const std::size_t cell = static_cast<std::size_t>(b) * bins.n_heading + h;
      if (!exposure.empty() && exposure[cell] < min_exposure) continue;
      sum += std::max(params.domain_table.v[cell], 0.0);
      ++count;
    }
    if (count == 0) continue;
    const double mean = sum / count;
    if (mean > best_value) {
      best_value = mean;
      best = b;
    }
  }
  return best;
}

}  // namespace vtp::domain_export
