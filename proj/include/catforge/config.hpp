#pragma once

// key = value run configuration with [section] headers. Keys are addressed
// as "section.key".

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catforge/errors.hpp"

namespace catforge {

/// Missing or malformed configuration entry; the message names the key.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class RunConfig {
 public:
  RunConfig();
  ~RunConfig();
  RunConfig(const RunConfig&);
  RunConfig& operator=(const RunConfig&);
  RunConfig(RunConfig&&) noexcept;
  RunConfig& operator=(RunConfig&&) noexcept;

  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  std::string require_string(const std::string& key) const;
  double require_double(const std::string& key) const;
  int require_int(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;

  /// Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key) const;

  /// Relative paths in the file resolve against its directory.
  std::filesystem::path resolve_path(const std::string& value) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace catforge
