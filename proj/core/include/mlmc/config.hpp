#pragma once

// Line-oriented `key = value` configuration with `[section]` headers.
// Keys are addressed as "section.key". Lists are comma separated.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mlmc {

class Config {
 public:
  Config();
  ~Config();
  Config(const Config&);
  Config& operator=(const Config&);

  // Throws ConfigError (with the line number) on malformed input.
  static Config parse(std::istream& is, const std::filesystem::path& base_dir = {});
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::optional<std::string> raw(const std::string& key) const;
  // 0 when the key is absent.
  long line(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::int64_t> get_ints(const std::string& key, std::vector<std::int64_t> fallback) const;
  // Relative paths resolve against the config file's directory.
  std::filesystem::path get_path(const std::string& key, const std::filesystem::path& fallback) const;

  // Overrides (e.g. from the command line); marks the key as line 0.
  void set(const std::string& key, const std::string& value);
  std::vector<std::string> keys() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mlmc
