#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tfc/control.hpp"
#include "tfc/dp.hpp"
#include "tfc/protocol_min.hpp"

namespace tfc {

// Doubles are rounded to nine significant digits before they enter JSON.
double round9(double v);

nlohmann::ordered_json to_json(const ProtocolTable& table);
ProtocolTable protocol_table_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const MinimalSet& set);
MinimalSet minimal_set_from_json(const nlohmann::json& j);

// Grid metadata and solver statistics written next to the policy CSV.
nlohmann::ordered_json policy_sidecar(const PolicyField& field);

nlohmann::json read_json_file(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

// Collects every artifact of a run and writes manifest.json last. Files are
// written in full from memory so the hash is of exactly what hit the disk.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::ordered_json& j);
  void write_manifest(const std::string& command, const nlohmann::ordered_json& config);

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;  // name, sha256
};

}  // namespace tfc
