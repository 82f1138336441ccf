#include "vtp/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "vtp/errors.hpp"

namespace vtp::checkpoint {

namespace {
constexpr const char* kFormat = "vtp-checkpoint/1";
}

void save(const std::string& path, const Checkpoint& ckpt) {
  const model::ModelConfig& cfg = ckpt.params.cfg;
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["variant"] = {{"name", model::variant_name(cfg)},
                  {"use_spatial", cfg.use_spatial},
                  {"use_temporal", cfg.use_temporal}};
  j["model"] = {{"hidden", cfg.hidden},
                {"input", cfg.input},
                {"t_obs", cfg.t_obs},
                {"t_pred", cfg.t_pred},
                {"normalize_pool", cfg.normalize_pool},
                {"domain_init_nmi", cfg.domain_init_nmi}};
  j["domain_bins"] = {{"n_bearing", cfg.bins.n_bearing},
                      {"n_heading", cfg.bins.n_heading},
                      {"bearing_edges_deg", cfg.bins.bearing_edges_deg()},
                      {"heading_edges_deg", cfg.bins.heading_edges_deg()}};
  j["train"] = {{"epochs", ckpt.train_config.epochs},
                {"batch_size", ckpt.train_config.batch_size},
                {"learning_rate", ckpt.train_config.learning_rate},
                {"beta1", ckpt.train_config.beta1},
                {"beta2", ckpt.train_config.beta2},
                {"epsilon", ckpt.train_config.epsilon},
                {"seed", ckpt.train_config.seed},
                {"teacher_forcing", ckpt.train_config.teacher_forcing},
                {"grad_clip", ckpt.train_config.grad_clip}};
  j["exposure"] = ckpt.exposure;

  auto& params = j["params"] = nlohmann::ordered_json::array();
  for (auto& p : const_cast<model::ModelParams&>(ckpt.params).named_params()) {
    nlohmann::ordered_json tj;
    tj["name"] = p.name;
    tj["shape"] = p.tensor->shape;
    tj["values"] = p.tensor->v;
    params.push_back(std::move(tj));
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("checkpoint: cannot write " + path);
  out << j.dump(2) << '\n';
}

Checkpoint load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("checkpoint: cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("checkpoint: " + path + ": " + e.what());
  }
  if (j.value("format", "") != kFormat) {
    throw SchemaError("checkpoint: " + path + ": unknown format");
  }

  model::ModelConfig cfg;
  const auto& m = j.at("model");
  cfg.hidden = m.at("hidden").get<int>();
  cfg.input = m.at("input").get<int>();
  cfg.t_obs = m.at("t_obs").get<int>();
  cfg.t_pred = m.at("t_pred").get<int>();
  cfg.normalize_pool = m.at("normalize_pool").get<bool>();
  cfg.domain_init_nmi = m.at("domain_init_nmi").get<double>();
  cfg.bins.n_bearing = j.at("domain_bins").at("n_bearing").get<int>();
  cfg.bins.n_heading = j.at("domain_bins").at("n_heading").get<int>();
  cfg.use_spatial = j.at("variant").at("use_spatial").get<bool>();
  cfg.use_temporal = j.at("variant").at("use_temporal").get<bool>();

  Checkpoint ckpt;
  ckpt.params = model::ModelParams::init(cfg, 0);
  ckpt.train_config.epochs = j.at("train").at("epochs").get<int>();
  ckpt.train_config.batch_size = j.at("train").at("batch_size").get<int>();
  ckpt.train_config.learning_rate = j.at("train").at("learning_rate").get<double>();
  ckpt.train_config.beta1 = j.at("train").at("beta1").get<double>();
  ckpt.train_config.beta2 = j.at("train").at("beta2").get<double>();
  ckpt.train_config.epsilon = j.at("train").at("epsilon").get<double>();
  ckpt.train_config.seed = j.at("train").at("seed").get<std::uint64_t>();
  ckpt.train_config.teacher_forcing = j.at("train").at("teacher_forcing").get<bool>();
  ckpt.train_config.grad_clip = j.at("train").at("grad_clip").get<double>();
  ckpt.exposure = j.at("exposure").get<std::vector<std::int64_t>>();

  auto named = ckpt.params.named_params();
  std::size_t loaded = 0;
  for (const auto& tj : j.at("params")) {
    const std::string name = tj.at("name").get<std::string>();
    const auto shape = tj.at("shape").get<ad::Shape>();
    const auto values = tj.at("values").get<std::vector<double>>();
    bool found = false;
    for (auto& p : named) {
      if (p.name != name) continue;
      if (p.tensor->shape != shape) {
        throw SchemaError("checkpoint: " + name + " has shape " + ad::shape_str(shape) +
                          ", expected " + ad::shape_str(p.tensor->shape));
      }
      p.tensor->v = values;
      found = true;
      ++loaded;
      break;
    }
    if (!found) throw SchemaError("checkpoint: unknown parameter " + name);
  }
  if (loaded != named.size()) {
    throw SchemaError("checkpoint: " + path + " is missing parameters");
  }
  return ckpt;
}

}  // namespace vtp::checkpoint
