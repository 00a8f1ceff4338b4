#pragma once

#include <string>
#include <utility>
#include <vector>

#include "revmine/config.hpp"

namespace revmine {

inline constexpr const char* kToolVersion = "revmine 0.1.0";

// Reproducibility record written next to each run's outputs: the hashed
// canonical config, the seed, and checksums of every input and derived
// file. Contains no timestamps so identical runs produce identical
// manifests.
struct Manifest {
  std::string command;
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;   // label -> path
  std::vector<std::pair<std::string, std::string>> outputs;  // label -> path

  void add_input(const std::string& label, const std::string& path) {
    inputs.emplace_back(label, path);
  }
  void add_output(const std::string& label, const std::string& path) {
    outputs.emplace_back(label, path);
  }

  // Serializes with fresh checksums of all listed files.
  std::string to_json() const;
  void write(const std::string& path) const;
};

Manifest make_manifest(const std::string& command, const KeyValueConfig& cfg);

}  // namespace revmine
