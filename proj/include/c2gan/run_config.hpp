#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace c2gan {

/// Flat key=value run configuration. Every key has a documented default;
/// unknown keys are rejected with ConfigError naming the key.
class RunConfig {
 public:
  struct Key {
    std::string_view name;
    std::string_view default_value;
    std::string_view doc;
  };
  /// All recognised keys in documentation order.
  static const std::vector<Key>& keys();

  RunConfig();

  /// Lines are `key = value`; `#` starts a comment; blank lines are skipped.
  static RunConfig from_text(std::string_view text, std::string_view origin = "<text>");
  static RunConfig from_file(const std::filesystem::path& path);

  void set(std::string_view key, std::string_view value);
  /// `key=value` form used by --set.
  void set_assignment(std::string_view assignment);
  void merge(const RunConfig& other);

  const std::string& get(std::string_view key) const;
  std::string get_string(std::string_view key) const { return get(key); }
  int64_t get_int(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool get_bool(std::string_view key) const;

  /// Keys explicitly assigned (from a file or set), as opposed to defaults.
  bool is_set(std::string_view key) const;

  /// Every key with its effective value, one `key = value` per line, in
  /// documentation order.
  std::string echo() const;
  /// Defaults with their documentation, as a commented config file.
  static std::string documented_defaults();

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::map<std::string, bool, std::less<>> explicit_;
};

}  // namespace c2gan
