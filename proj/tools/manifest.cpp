#include "manifest.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "xxlseg/version.hpp"
#include "xxlseg/volume_io.hpp"

namespace xxlseg::cli {

std::optional<std::string> sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) return std::nullopt;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) return std::nullopt;
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

std::vector<fs::path> volume_files(const fs::path& path) {
  const fs::path sidecar = sidecar_path(path);
  std::vector<fs::path> files{sidecar};
  std::ifstream in(sidecar);
  if (!in) return files;
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_object() && j.contains("payload") && j["payload"].is_string()) {
    files.push_back(sidecar.parent_path() / j["payload"].get<std::string>());
  }
  return files;
}

std::vector<fs::path> directory_files(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
    if (it->is_regular_file()) files.push_back(it->path());
  std::sort(files.begin(), files.end());
  return files;
}

fs::path manifest_for_volume(const fs::path& out) {
  std::string name = sidecar_path(out).filename().string();
  name.erase(name.size() - std::string(".vol.json").size());
  return sidecar_path(out).parent_path() / (name + ".manifest.json");
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::add_input(const fs::path& path) {
  const auto hash = sha256_file(path);
  inputs_.push_back({{"path", path.generic_string()}, {"sha256", hash ? nlohmann::json(*hash) : nlohmann::json()}});
}

void RunManifest::add_output(const fs::path& path) { outputs_.push_back(path.generic_string()); }

nlohmann::json RunManifest::to_json(const std::optional<std::string>& error) const {
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json j{{"command", command_},
                   {"parameters", parameters_},
                   {"inputs", inputs_},
                   {"outputs", outputs_},
                   {"version", XXLSEG_VERSION},
                   {"wall_clock_seconds", seconds},
                   {"error", error ? nlohmann::json(*error) : nlohmann::json()}};
  if (!results_.empty()) j["results"] = results_;
  return j;
}

void RunManifest::write(const std::optional<std::string>& error) const {
  if (!location_) return;
  std::error_code ec;
  if (location_->has_parent_path()) fs::create_directories(location_->parent_path(), ec);
  std::ofstream out(*location_, std::ios::trunc);
  if (out) out << to_json(error).dump(2) << '\n';
}

}  // namespace xxlseg::cli
