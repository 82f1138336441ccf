#include "vtp/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "vtp/evaluation.hpp"
#include "vtp/rng.hpp"

namespace vtp::training {

AdamState AdamState::init(std::span<const ad::NamedParam> params) {
  AdamState state;
  state.slots.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.slots[i].m.assign(params[i].tensor->size(), 0.0);
    state.slots[i].v.assign(params[i].tensor->size(), 0.0);
  }
  return state;
}

bool AdamState::mirrors(std::span<const ad::NamedParam> params) const {
  if (slots.size() != params.size()) return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (slots[i].m.size() != params[i].tensor->size()) return false;
    if (slots[i].v.size() != params[i].tensor->size()) return false;
  }
  return true;
}

void adam_step(std::span<ad::NamedParam> params, AdamState& state, const TrainConfig& cfg) {
  if (!state.mirrors(params)) throw DimensionError("adam_step: state does not mirror parameters");

  for (const auto& p : params) {
    for (const double g : p.tensor->g) {
      if (!std::isfinite(g)) throw NumericalError("adam_step: non-finite gradient in " + p.name);
    }
  }

  if (cfg.grad_clip > 0.0) {
    double norm_sq = 0.0;
    for (const auto& p : params) {
      for (const double g : p.tensor->g) norm_sq += g * g;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > cfg.grad_clip) {
      const double scale = cfg.grad_clip / norm;
      for (auto& p : params) {
        for (double& g : p.tensor->g) g *= scale;
      }
    }
  }

  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    ad::Tensor& t = *params[i].tensor;
    AdamState::Slot& slot = state.slots[i];
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double g = t.g[k];
      slot.m[k] = cfg.beta1 * slot.m[k] + (1.0 - cfg.beta1) * g;
      slot.v[k] = cfg.beta2 * slot.v[k] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = slot.m[k] / bc1;
      const double v_hat = slot.v[k] / bc2;
      t.v[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

ad::Ref ade_loss(ad::Tape& tape, const model::Prediction& pred, const dataset::Sample& sample) {
  const int n = pred.n;
  const int t_pred = pred.t_pred;
  if (n != sample.n() || t_pred != sample.t_pred) {
    throw DimensionError("ade_loss: prediction does not match sample layout");
  }
  ad::Ref total = tape.scalar(0.0);
  for (int k = 0; k < t_pred; ++k) {
    for (int v = 0; v < n; ++v) {
      const int t = sample.t_obs + k;
      const ad::Ref truth = tape.constant({2}, {sample.x(t, v), sample.y(t, v)});
      const ad::Ref diff = tape.sub(pred.ref(k, v), truth);
      total = tape.add(total, tape.sqrt(tape.sum(tape.mul(diff, diff))));
    }
  }
  return tape.mul(total, tape.scalar(1.0 / (static_cast<double>(n) * t_pred)));
}

TrainResult train(const model::ModelConfig& cfg, const TrainConfig& tc,
                  const std::vector<dataset::Sample>& train_set,
                  const std::vector<dataset::Sample>& val_set) {
  if (train_set.empty()) throw DimensionError("train: empty training set");

  TrainResult result;
  result.final_params = model::ModelParams::init(cfg, tc.seed);
  result.best_params = result.final_params;
  result.exposure = model::bin_exposure(train_set, cfg);

  auto params = result.final_params.named_params();
  AdamState adam = AdamState::init(params);
  Rng shuffle_rng(mix_seed(tc.seed, 1));

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  model::ModelParams last_good = result.final_params;
  bool have_val = !val_set.empty();
  const auto t_start = std::chrono::steady_clock::now();

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    bool finite = true;
    try {
      for (std::size_t pos = 0; pos < order.size() && finite;) {
        const std::size_t batch_end = std::min(pos + static_cast<std::size_t>(tc.batch_size),
                                               order.size());
        const double batch_count = static_cast<double>(batch_end - pos);
        result.final_params.zero_grad();
        for (; pos < batch_end; ++pos) {
          const dataset::Sample& s = train_set[order[pos]];
          ad::Tape tape;
          const auto pred = model::forward(tape, result.final_params, s, tc.teacher_forcing);
          const ad::Ref loss = ade_loss(tape, pred, s);
          const double loss_v = tape.value(loss);
          if (!std::isfinite(loss_v)) {
            finite = false;
            break;
          }
          epoch_loss += loss_v;
          tape.backward(loss);
        }
        if (!finite) break;
        // accumulated sum -> batch mean
        for (auto& p : params) {
          for (double& g : p.tensor->g) g /= batch_count;
        }
        adam_step(params, adam, tc);
        if (!result.final_params.finite()) {
          finite = false;
          break;
        }
      }
    } catch (const NumericalError&) {
      // non-finite intermediates surface the same way a non-finite loss does
      finite = false;
    }

    if (!finite) {
      result.diverged = true;
      result.final_params = last_good;
      break;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_ade = epoch_loss / static_cast<double>(train_set.size());
    if (have_val) {
      // validation decodes autoregressively, matching evaluation conditions
      rec.val_ade = evaluation::evaluate(result.final_params, val_set).ade;
      if (result.best_epoch < 0 || rec.val_ade < result.best_val_ade) {
        result.best_val_ade = rec.val_ade;
        result.best_epoch = epoch;
        result.best_params = result.final_params;
      }
    }
    rec.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    result.history.push_back(rec);
    last_good = result.final_params;
  }

  if (!have_val || result.best_epoch < 0) {
    result.best_params = result.final_params;
    result.best_epoch = static_cast<int>(result.history.size()) - 1;
    result.best_val_ade = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace vtp::training
