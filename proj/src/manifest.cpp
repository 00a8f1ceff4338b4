#include "revmine/manifest.hpp"

#include <fstream>

#include "json.hpp"

namespace revmine {

using nlohmann::ordered_json;

std::string Manifest::to_json() const {
  ordered_json j;
  j["tool"] = kToolVersion;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  ordered_json in = ordered_json::object();
  for (const auto& [label, path] : inputs) {
    in[label] = {{"path", path}, {"fnv1a64", util::file_checksum_hex(path)}};
  }
  j["inputs"] = in;
  ordered_json out = ordered_json::object();
  for (const auto& [label, path] : outputs) {
    out[label] = {{"path", path}, {"fnv1a64", util::file_checksum_hex(path)}};
  }
  j["outputs"] = out;
  return j.dump(2);
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path);
  out << to_json() << '\n';
  if (!out) throw Error("write failed: " + path);
}

Manifest make_manifest(const std::string& command, const KeyValueConfig& cfg) {
  Manifest m;
  m.command = command;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    util::fnv1a64(cfg.canonical_text())));
  m.config_hash = buf;
  m.seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
  return m;
}

}  // namespace revmine
