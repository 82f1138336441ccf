#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vtp/dataset.hpp"
#include "vtp/model.hpp"
#include "vtp/training.hpp"

namespace vtp::evaluation {

// pred/truth: [t][v][2] flat blocks of one sample, normalized nmi.
double ade(std::span<const double> pred, std::span<const double> truth, int n, int t_pred);
double fde(std::span<const double> pred, std::span<const double> truth, int n, int t_pred);

struct SampleEval {
  std::int64_t sample_id = 0;
  int n = 0;
  std::vector<double> per_step_mean;  // displacement mean over vessels, per step
  double ade = 0.0;
  double fde = 0.0;
};

struct EvalResult {
  double ade = 0.0;  // pooled over all (vessel, step) pairs across samples
  double fde = 0.0;  // pooled over all vessels at the final step
  std::size_t samples = 0;
  std::size_t vessel_steps = 0;
  std::vector<SampleEval> per_sample;
};

// Autoregressive decoding (the deployment condition), regardless of the
// training-time teacher forcing setting.
EvalResult evaluate(model::ModelParams& params, const std::vector<dataset::Sample>& samples);

struct AblationRun {
  std::string variant;
  std::uint64_t seed = 0;
  bool failed = false;
  double test_ade = 0.0;
  double test_fde = 0.0;
  int best_epoch = -1;
  double train_s = 0.0;
};

struct VariantSummary {
  std::string variant;
  int runs = 0;
  double ade_mean = 0.0, ade_std = 0.0;
  double fde_mean = 0.0, fde_std = 0.0;
};

struct AblationReport {
  std::vector<AblationRun> runs;
  std::vector<VariantSummary> summary;  // vanilla, temporal, spatial, full

  const VariantSummary* find(const std::string& variant) const;
};

// Trains every variant with identical data and batch order per seed,
// evaluates on the test split, and aggregates mean +/- sample std per
// variant. A diverging run is marked failed; the others proceed.
AblationReport ablation(const model::ModelConfig& base_cfg, const training::TrainConfig& base_tc,
                        const dataset::SplitSamples& splits,
                        std::span<const std::uint64_t> seeds, std::ostream* log = nullptr,
                        std::vector<model::ModelParams>* full_models = nullptr,
                        std::vector<std::vector<std::int64_t>>* full_exposures = nullptr);

void write_ablation_table(std::ostream& out, const AblationReport& report);
void write_ablation_jsonl(std::ostream& out, const AblationReport& report);

}  // namespace vtp::evaluation
