#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace qtomo::cli {

/// Flat key=value settings. Later sources override earlier ones:
/// built-in defaults, QTOMO_SEED, config file, command-line settings.
class ExperimentConfig {
 public:
  void load_file(const std::filesystem::path& path);
  /// Parses one "key=value" token.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace qtomo::cli
