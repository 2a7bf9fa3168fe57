#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace xxlseg::cli {

namespace fs = std::filesystem;

/// Hex SHA-256 of a file's bytes, or nullopt if it cannot be read.
std::optional<std::string> sha256_file(const fs::path& path);

/// Files making up an on-disk volume (sidecar, then payload when known).
std::vector<fs::path> volume_files(const fs::path& path);

/// Every regular file below `dir`, sorted.
std::vector<fs::path> directory_files(const fs::path& dir);

/// `<dir>/<stem>.manifest.json` for a volume output path.
fs::path manifest_for_volume(const fs::path& out);

class RunManifest {
 public:
  explicit RunManifest(std::string command);

  nlohmann::json& parameters() { return parameters_; }
  nlohmann::json& results() { return results_; }
  void add_input(const fs::path& path);
  void add_output(const fs::path& path);
  void set_location(fs::path path) { location_ = std::move(path); }
  const std::optional<fs::path>& location() const { return location_; }

  nlohmann::json to_json(const std::optional<std::string>& error) const;
  /// Writes the manifest if a location is known. Never throws.
  void write(const std::optional<std::string>& error = std::nullopt) const;

 private:
  std::string command_;
  nlohmann::json parameters_ = nlohmann::json::object();
  nlohmann::json results_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  std::vector<std::string> outputs_;
  std::optional<fs::path> location_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace xxlseg::cli
