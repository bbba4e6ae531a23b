#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wplus::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict numeric parsing; `what` names the value in the error message.
std::uint64_t parse_u64(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);

/// Layered key=value settings: built-in defaults, then a config file, then
/// command-line flags. Later layers win. Only known keys are accepted.
///
/// File syntax: one `key = value` per line, `#` starts a comment, blank lines
/// ignored.
class RunConfig {
 public:
  RunConfig();

  static const std::vector<std::string>& known_keys();
  static bool is_known(const std::string& key);

  /// Overlays a file; throws ConfigError on unknown keys or bad syntax.
  void load_file(const std::filesystem::path& path);
  void load_text(const std::string& text, const std::string& origin = "<text>");
  /// Flag layer.
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace wplus::cli
