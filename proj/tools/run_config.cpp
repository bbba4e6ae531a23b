#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

namespace wplus::cli {

namespace {

// Defaults follow the library's EmbedConfig, GeneratorConfig and LossWeights.
const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"init", "mean"},
      {"space", "wplus"},
      {"steps", "5000"},
      {"lr", "0.01"},
      {"beta1", "0.9"},
      {"beta2", "0.999"},
      {"epsilon", "1e-8"},
      {"lambda_mse", "1"},
      {"lambda_stage1", "1"},
      {"lambda_stage2", "1"},
      {"lambda_stage3", "1"},
      {"lambda_stage4", "1"},
      {"loss_resolution", "256"},
      {"seed", "0"},
      {"record_every", "10"},
      {"mean_samples", "10000"},
      {"mean_seed", "0"},
      {"resolution", "1024"},
      {"style_dim", "512"},
      {"mapping_layers", "3"},
      {"base_channels", "32"},
      {"channel_cap", "512"},
      {"generator_seed", "0"},
      {"extractor_widths", "64,64,256,512"},
      {"extractor_seed", "0"},
      {"jobs", "1"},
      {"rounds", "7"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || !std::isdigit(static_cast<unsigned char>(s[0])) || *end != '\0' || errno == ERANGE)
    throw ConfigError(what + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || std::isspace(static_cast<unsigned char>(s[0])) || *end != '\0' || errno == ERANGE ||
      !std::isfinite(v))
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  return v;
}

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) values_[k] = v;
}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& kv : defaults()) out.push_back(kv.first);
    return out;
  }();
  return keys;
}

bool RunConfig::is_known(const std::string& key) {
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  load_text(text.str(), path.string());
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!is_known(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    values_[key] = trim(line.substr(eq + 1));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!is_known(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const { return parse_double(get(key), key); }

std::uint64_t RunConfig::get_u64(const std::string& key) const { return parse_u64(get(key), key); }

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& s = get(key);
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + s + "'");
}

}  // namespace wplus::cli
