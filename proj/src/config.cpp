#include "mfstab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfstab/errors.hpp"
#include "mfstab/rng.hpp"

namespace mfstab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

Config parse_impl(std::istream& in, const std::string& origin, bool strict) {
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw InvalidInput(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw InvalidInput(origin + ":" + std::to_string(lineno) + ": empty key");
    if (strict) {
      const auto& known = known_config_keys();
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw InvalidInput(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (cfg.has(key))
      throw InvalidInput(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.set(key, value);
  }
  if (strict && !cfg.has("seed")) throw InvalidInput(origin + ": missing mandatory key 'seed'");
  if (cfg.has("seed")) cfg.get_u64("seed", 0);
  return cfg;
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "seed", "output",
      "graph.kind", "graph.n", "graph.p", "graph.path",
      "sampler.kind", "sampler.dim", "sampler.feature_bound", "sampler.label_bound",
      "sampler.noise", "sampler.coupling", "sampler.field", "sampler.sweeps",
      "sampler.label_rule", "sampler.replace",
      "objective.kind", "objective.lambda", "objective.gamma", "objective.amplitude",
      "objective.radius",
      "sgd.alpha", "sgd.steps", "sgd.project",
      "harness.k", "harness.k_test", "harness.trials", "harness.m", "harness.test_graphs",
      "harness.vertex",
      "bounds.delta", "bounds.alpha_dob",
      "gnn.kind", "gnn.method", "gnn.gamma_reg", "gnn.epsilon", "gnn.feature_dim",
      "gnn.weight_norm", "gnn.test_draws", "gnn.densities", "gnn.sizes", "gnn.replicates",
      "srm.d_max", "srm.lambda", "srm.epsilon", "srm.instances",
      "concentration.draws", "concentration.thin", "concentration.grid",
  };
  return keys;
}

Config Config::parse(std::istream& in, const std::string& origin) {
  Config c = parse_impl(in, origin, true);
  c.origin_ = origin;
  return c;
}

Config Config::parse_loose(std::istream& in, const std::string& origin) {
  Config c = parse_impl(in, origin, false);
  c.origin_ = origin;
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  Config c = parse(in, path);
  c.base_dir_ = std::filesystem::path(path).parent_path().string();
  if (c.base_dir_.empty()) c.base_dir_ = ".";
  if (c.has("graph.path") && !std::filesystem::exists(c.resolve_path(c.get("graph.path", ""))))
    throw InvalidInput("graph.path does not exist: " + c.get("graph.path", ""));
  return c;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InvalidInput(origin_ + ": missing key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key, "");
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidInput(origin_ + ": key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key, "");
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw InvalidInput(origin_ + ": key '" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key, "");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidInput(origin_ + ": key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  std::stringstream ss(get(key, ""));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidInput(origin_ + ": key '" + key + "' expects a comma-separated list of numbers");
    }
  }
  return out;
}

std::string Config::resolve_path(const std::string& p) const {
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base_dir_) / path).string();
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string Config::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

}  // namespace mfstab
