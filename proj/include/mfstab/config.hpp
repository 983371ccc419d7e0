#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mfstab {

/// Flat key=value configuration with dotted keys ("sampler.coupling = 0.5").
/// '#' starts a comment; blank lines are ignored. Keys outside the known
/// schema are rejected and `seed` is mandatory.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>");
  static Config load(const std::string& path);
  /// Parses without the schema and seed checks (used for parameter files).
  static Config parse_loose(std::istream& in, const std::string& origin = "<params>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

  std::uint64_t seed() const { return get_u64("seed", 0); }
  /// Directory of the config file; relative paths resolve against it.
  const std::string& base_dir() const { return base_dir_; }
  std::string resolve_path(const std::string& p) const;

  /// Sorted "key=value" lines.
  std::string canonical() const;
  /// FNV-1a of canonical(), as 16 hex digits.
  std::string hash() const;
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
  std::string base_dir_ = ".";
};

/// Every key the CLI understands.
const std::vector<std::string>& known_config_keys();

}  // namespace mfstab
