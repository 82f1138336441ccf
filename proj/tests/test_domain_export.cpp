#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "vtp/domain_export.hpp"
#include "vtp/rng.hpp"

using namespace vtp;
using model::ModelConfig;
using model::ModelParams;

TEST_CASE("export of a fresh model shows the initialization everywhere") {
  ModelConfig cfg;
  const ModelParams p = ModelParams::init(cfg, 1);
  const auto records = domain_export::export_domain(p);
  CHECK(records.size() == 18);  // 6 x 3 table
  for (const auto& r : records) {
    CHECK(r.raw_value_nmi == 0.5);
    CHECK(r.effective_value_nmi == 0.5);
  }
}

TEST_CASE("export is lossless and clamps the effective value") {
  ModelConfig cfg;
  ModelParams p = ModelParams::init(cfg, 1);
  p.domain_table.v[0] = -0.75;
  p.domain_table.v[5] = 1.5;
  const auto records = domain_export::export_domain(p);
  CHECK(records[0].raw_value_nmi == -0.75);
  CHECK(records[0].effective_value_nmi == 0.0);
  CHECK(records[5].raw_value_nmi == 1.5);
  CHECK(records[5].effective_value_nmi == 1.5);

  std::ostringstream csv;
  domain_export::write_domain_csv(csv, records);
  CHECK(csv.str().find("-0.75") != std::string::npos);
  CHECK(csv.str().find("bearing_deg_center") != std::string::npos);
}

TEST_CASE("export refuses non-spatial checkpoints") {
  ModelConfig cfg;
  model::apply_variant(cfg, "temporal");
  const ModelParams p = ModelParams::init(cfg, 1);
  CHECK_THROWS_AS(domain_export::export_domain(p), VariantError);
}

TEST_CASE("seed robustness statistics") {
  ModelConfig cfg;
  SUBCASE("identical checkpoints have zero std everywhere") {
    const ModelParams a = ModelParams::init(cfg, 1);
    const ModelParams b = a;
    const std::vector<ModelParams> ckpts = {a, b};
    const auto records = domain_export::seed_robustness(ckpts, {});
    for (const auto& r : records) {
      CHECK(r.stdev == 0.0);
      CHECK(r.cv == 0.0);
      CHECK(r.mean == 0.5);
    }
  }
  SUBCASE("one checkpoint is a precondition error") {
    const std::vector<ModelParams> ckpts = {ModelParams::init(cfg, 1)};
    CHECK_THROWS_AS(domain_export::seed_robustness(ckpts, {}), DimensionError);
  }
  SUBCASE("mismatched bin structures are rejected") {
    ModelConfig other = cfg;
    other.bins.n_bearing = 4;
    const std::vector<ModelParams> ckpts = {ModelParams::init(cfg, 1),
                                            ModelParams::init(other, 2)};
    CHECK_THROWS_AS(domain_export::seed_robustness(ckpts, {}), DimensionError);
  }
}

TEST_CASE("robustness statistics are recomputable from exported records") {
  ModelConfig cfg;
  Rng rng(7);
  std::vector<ModelParams> ckpts;
  std::vector<std::vector<std::int64_t>> exposures;
  for (int k = 0; k < 5; ++k) {
    ModelParams p = ModelParams::init(cfg, static_cast<std::uint64_t>(k));
    for (double& v : p.domain_table.v) v = rng.uniform(-0.2, 1.4);
    ckpts.push_back(std::move(p));
    exposures.emplace_back(static_cast<std::size_t>(cfg.bins.cells()), 100);
  }
  const auto records = domain_export::seed_robustness(ckpts, exposures, 50);

  for (int cell = 0; cell < cfg.bins.cells(); ++cell) {
    // recompute mean/std from the per-seed exports
    std::vector<double> eff;
    for (const auto& c : ckpts) {
      const auto rec = domain_export::export_domain(c);
      eff.push_back(rec[static_cast<std::size_t>(cell)].effective_value_nmi);
    }
    double mean = 0.0;
    for (const double e : eff) mean += e;
    mean /= static_cast<double>(eff.size());
    double ss = 0.0;
    for (const double e : eff) ss += (e - mean) * (e - mean);
    const double stdev = std::sqrt(ss / static_cast<double>(eff.size() - 1));

    CHECK(records[static_cast<std::size_t>(cell)].mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(records[static_cast<std::size_t>(cell)].stdev ==
          doctest::Approx(stdev).epsilon(1e-12));
    CHECK(records[static_cast<std::size_t>(cell)].exposed);
  }

  std::ostringstream csv;
  domain_export::write_robustness_csv(csv, records);
  CHECK(csv.str().find("cv") != std::string::npos);
}

TEST_CASE("argmax bearing sector aggregates exposed cells") {
  ModelConfig cfg;
  ModelParams p = ModelParams::init(cfg, 1);
  std::fill(p.domain_table.v.begin(), p.domain_table.v.end(), 0.2);
  // sector 2 has the largest mean over its exposed cells
  p.domain_table.v[static_cast<std::size_t>(2 * 3 + 1)] = 1.6;
  std::vector<std::int64_t> exposure(static_cast<std::size_t>(cfg.bins.cells()), 100);
  CHECK(domain_export::argmax_bearing_sector(p, exposure) == 2);

  // masking that cell's exposure moves the argmax elsewhere
  exposure[static_cast<std::size_t>(2 * 3 + 1)] = 0;
  CHECK(domain_export::argmax_bearing_sector(p, exposure) != 2);
}
