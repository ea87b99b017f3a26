#include "tfc/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>

#include "tfc/errors.hpp"
#include "tfc/format.hpp"

namespace tfc {

using nlohmann::json;
using nlohmann::ordered_json;

double round9(double v) { return std::stod(fmt9(v)); }

namespace {

double field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw IoError("cli-harness", "read", where + ": missing numeric field '" + key + "'");
  }
  return it->get<double>();
}

const json& array_field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
    throw IoError("cli-harness", "read", where + ": expected an object with array '" + key + "'");
  }
  return j.at(key);
}

}  // namespace

ordered_json to_json(const ProtocolTable& table) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : table.entries) {
    entries.push_back({{"theta_dot_0", round9(e.theta_dot_0)},
                       {"t1", round9(e.protocol.t1)},
                       {"tau", round9(e.protocol.tau)},
                       {"u_on", round9(e.protocol.u_on)},
                       {"cost", round9(e.cost)}});
  }
  return {{"entries", entries}};
}

ProtocolTable protocol_table_from_json(const json& j) {
  ProtocolTable table;
  for (const auto& e : array_field(j, "entries", "protocol table")) {
    const std::string where = "protocol table entry " + std::to_string(table.entries.size());
    table.entries.push_back({field(e, "theta_dot_0", where),
                             {field(e, "t1", where), field(e, "tau", where), field(e, "u_on", where)},
                             field(e, "cost", where)});
  }
  return table;
}

ordered_json to_json(const MinimalSet& set) {
  ordered_json protocols = ordered_json::array();
  for (const auto& p : set.protocols) {
    protocols.push_back({{"label", p.label},
                         {"t1", round9(p.protocol.t1)},
                         {"tau", round9(p.protocol.tau)},
                         {"u_on", round9(p.protocol.u_on)},
                         {"lo", round9(p.lo)},
                         {"hi", round9(p.hi)},
                         {"source_theta_dot_0", round9(p.source_theta_dot_0)}});
  }
  return {{"protocols", protocols}};
}

MinimalSet minimal_set_from_json(const json& j) {
  MinimalSet set;
  for (const auto& p : array_field(j, "protocols", "minimal set")) {
    const std::string where = "minimal set entry " + std::to_string(set.protocols.size());
    MinimalEntry e;
    e.label = p.value("label", "U" + std::to_string(set.protocols.size() + 1));
    e.protocol = {field(p, "t1", where), field(p, "tau", where), field(p, "u_on", where)};
    e.lo = field(p, "lo", where);
    e.hi = field(p, "hi", where);
    e.source_theta_dot_0 = p.contains("source_theta_dot_0") ? field(p, "source_theta_dot_0", where) : e.lo;
    set.protocols.push_back(e);
  }
  if (!set.valid()) throw IoError("cli-harness", "read", "minimal set intervals are not contiguous from 0");
  return set;
}

ordered_json policy_sidecar(const PolicyField& field) {
  const DpGrid& g = field.grid;
  std::size_t goal_cells = 0;
  for (auto m : field.goal_mask) goal_cells += m;
  ordered_json history = ordered_json::array();
  for (double r : field.residual_history) history.push_back(round9(r));
  return {{"n_theta", g.n_theta},
          {"n_theta_dot", g.n_theta_dot},
          {"theta_range", {0.0, round9(kTwoPi)}},
          {"theta_periodic", true},
          {"theta_dot_max", round9(g.theta_dot_max)},
          {"h", round9(g.h)},
          {"actions", g.actions},
          {"tol", round9(g.tol)},
          {"iterations", field.iterations},
          {"residual", round9(field.residual)},
          {"slack", round9(field.slack)},
          {"goal_cells", goal_cells},
          {"csv_order", "theta-major, theta_dot-minor"},
          {"residual_history", history}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cli-harness", "read", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("cli-harness", "read", path.string() + ": invalid JSON: " + e.what());
  }
}

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw IoError("cli-harness", "sha256", "digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cli-harness", "write", "cannot create " + dir_.string() + ": " + ec.message());
}

void ArtifactWriter::write(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw IoError("cli-harness", "write", "cannot write " + path.string());
  files_.emplace_back(name, sha256_hex(content));
}

void ArtifactWriter::write_json(const std::string& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }

void ArtifactWriter::write_manifest(const std::string& command, const ordered_json& config) {
  ordered_json files = ordered_json::array();
  for (const auto& [name, hash] : files_) files.push_back({{"path", name}, {"sha256", hash}});
  const ordered_json manifest{
      {"command", command},
      {"config", config},
      {"rng",
       "output k = splitmix64(key + k * 0x9e3779b97f4a7c15), key = splitmix64(splitmix64(seed ^ fnv1a64(module)) ^ salt)"},
      {"files", files}};
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  out.close();
  if (!out) throw IoError("cli-harness", "write", "cannot write " + path.string());
}

}  // namespace tfc
