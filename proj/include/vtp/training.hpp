#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vtp/dataset.hpp"
#include "vtp/model.hpp"

namespace vtp::training {

struct TrainConfig {
  int epochs = 500;
  int batch_size = 64;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  bool teacher_forcing = true;
  double grad_clip = 0.0;  // 0 disables; global-norm clip otherwise
};

// First/second moment accumulators, one slot per named parameter.
struct AdamState {
  struct Slot {
    std::vector<double> m, v;
  };
  std::vector<Slot> slots;
  std::int64_t step = 0;

  static AdamState init(std::span<const ad::NamedParam> params);
  bool mirrors(std::span<const ad::NamedParam> params) const;
};

// Bias-corrected Adam update from the gradients currently accumulated in
// the parameters. Throws NumericalError (with the parameter path) on a
// non-finite gradient.
void adam_step(std::span<ad::NamedParam> params, AdamState& state, const TrainConfig& cfg);

// Mean Euclidean displacement over vessels and prediction steps, in
// normalized nmi coordinates (equals the equirectangular displacement by
// the normalization construction).
ad::Ref ade_loss(ad::Tape& tape, const model::Prediction& pred, const dataset::Sample& sample);

struct EpochRecord {
  int epoch = 0;
  double train_ade = 0.0;
  double val_ade = 0.0;
  double wall_s = 0.0;
};

struct TrainResult {
  model::ModelParams final_params;
  model::ModelParams best_params;  // lowest validation ADE (autoregressive)
  int best_epoch = -1;
  double best_val_ade = 0.0;
  std::vector<EpochRecord> history;
  bool diverged = false;
  std::vector<std::int64_t> exposure;  // domain-cell observation counts
};

// Epochs of shuffled batches with gradient accumulation across the batch
// and one Adam step per batch. Deterministic under a fixed seed. On
// divergence the last finite epoch's parameters are returned.
TrainResult train(const model::ModelConfig& cfg, const TrainConfig& tc,
                  const std::vector<dataset::Sample>& train_set,
                  const std::vector<dataset::Sample>& val_set);

}  // namespace vtp::training
