#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace vtp::io {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a over the file bytes; stable input fingerprint for manifests.
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Reproducibility record written next to every artifact: the effective
// config, the seed, and digests of all inputs.
void write_manifest(const std::string& artifact_path, const std::string& subcommand,
                    const nlohmann::ordered_json& config, std::span<const std::string> inputs,
                    std::span<const std::string> outputs);

}  // namespace vtp::io
