#pragma once

#include <map>
#include <optional>
#include <string>

#include "revmine/util.hpp"

namespace revmine {

// Flat key=value configuration. '#' starts a comment, blank lines are
// ignored. Later assignments win; CLI flags override via set().
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(std::string_view text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string require(const std::string& key) const;

  // Sorted `key=value` lines; the manifest hashes this form so flag
  // overrides and file entries hash identically.
  std::string canonical_text() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace revmine
