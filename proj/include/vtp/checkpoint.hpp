#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vtp/model.hpp"
#include "vtp/training.hpp"

namespace vtp::checkpoint {

struct Checkpoint {
  model::ModelParams params;
  training::TrainConfig train_config;
  std::vector<std::int64_t> exposure;  // empty for untrained/non-spatial
};

// Self-describing JSON: every parameter tensor with name and shape, the
// variant flags, domain bin edges and the training config. Text encoding
// is byte-order independent and doubles round-trip exactly, so identical
// parameters produce identical files.
void save(const std::string& path, const Checkpoint& ckpt);
Checkpoint load(const std::string& path);

}  // namespace vtp::checkpoint
