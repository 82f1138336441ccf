#include "vtp/io.hpp"

#include <fstream>
#include <sstream>

#include "vtp/errors.hpp"

namespace vtp::io {

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("digest: cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path);
  out << content;
}

void write_manifest(const std::string& artifact_path, const std::string& subcommand,
                    const nlohmann::ordered_json& config, std::span<const std::string> inputs,
                    std::span<const std::string> outputs) {
  nlohmann::ordered_json j;
  j["tool"] = std::string("vtp ") + kVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  auto& ins = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& path : inputs) {
    ins.push_back({{"path", path}, {"fnv1a64", hex64(fnv1a64_file(path))}});
  }
  j["outputs"] = std::vector<std::string>(outputs.begin(), outputs.end());
  write_file(artifact_path + ".manifest.json", j.dump(2) + "\n");
}

}  // namespace vtp::io
