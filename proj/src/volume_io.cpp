#include "xxlseg/volume_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace xxlseg {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kSidecarSuffix = ".vol.json";

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string stem_of(const fs::path& sidecar) {
  std::string name = sidecar.filename().string();
  return name.substr(0, name.size() - kSidecarSuffix.size());
}

template <typename T>
void byteswap_all(std::vector<T>& values) {
  if constexpr (std::endian::native == std::endian::big) {
    for (T& v : values) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = (bits >> 24) | ((bits >> 8) & 0xff00u) | ((bits << 8) & 0xff0000u) | (bits << 24);
      std::memcpy(&v, &bits, 4);
    }
  }
}

Vec3 read_triple(const json& j, const char* field, const fs::path& where) {
  if (!j.contains(field) || !j[field].is_array() || j[field].size() != 3) {
    throw IoError(IoErrorKind::MalformedSidecar,
                  where.string() + ": field '" + field + "' must be an array of 3 integers");
  }
  Vec3 v;
  for (int a = 0; a < 3; ++a) {
    if (!j[field][a].is_number_integer()) {
      throw IoError(IoErrorKind::MalformedSidecar,
                    where.string() + ": field '" + field + "' must hold integers");
    }
    v[a] = j[field][a].get<std::int64_t>();
  }
  return v;
}

struct Sidecar {
  VolumeMeta meta;
  fs::path payload;
};

Sidecar read_sidecar(const fs::path& path) {
  const fs::path side = sidecar_path(path);
  std::ifstream in(side);
  if (!in) throw IoError(IoErrorKind::MissingFile, "missing volume sidecar " + side.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(IoErrorKind::MalformedSidecar, side.string() + ": " + e.what());
  }
  if (!j.is_object()) throw IoError(IoErrorKind::MalformedSidecar, side.string() + ": not a JSON object");

  Sidecar s;
  s.meta.dims = read_triple(j, "dims", side);
  if (s.meta.dims.x < 1 || s.meta.dims.y < 1 || s.meta.dims.z < 1) {
    throw IoError(IoErrorKind::MalformedSidecar, side.string() + ": dims must all be >= 1");
  }
  s.meta.origin = j.contains("origin") ? read_triple(j, "origin", side) : Vec3{};
  if (!j.contains("voxel_kind") || !j["voxel_kind"].is_string()) {
    throw IoError(IoErrorKind::MalformedSidecar, side.string() + ": field 'voxel_kind' must be a string");
  }
  s.meta.voxel_kind = voxel_kind_from_name(j["voxel_kind"].get<std::string>());
  if (!j.contains("payload") || !j["payload"].is_string()) {
    throw IoError(IoErrorKind::MalformedSidecar, side.string() + ": field 'payload' must be a string");
  }
  s.payload = side.parent_path() / j["payload"].get<std::string>();
  return s;
}

template <typename T>
Volume<T> read_payload(const Sidecar& s) {
  std::ifstream in(s.payload, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::MissingFile, "missing volume payload " + s.payload.string());
  const auto expected = static_cast<std::uintmax_t>(s.meta.voxel_count()) * sizeof(T);
  const auto actual = fs::file_size(s.payload);
  if (actual != expected) {
    throw IoError(IoErrorKind::PayloadLengthMismatch,
                  s.payload.string() + ": payload has " + std::to_string(actual / sizeof(T)) +
                      " elements (" + std::to_string(actual) + " bytes), dims require " +
                      std::to_string(s.meta.voxel_count()));
  }
  std::vector<T> voxels(static_cast<std::size_t>(s.meta.voxel_count()));
  in.read(reinterpret_cast<char*>(voxels.data()), static_cast<std::streamsize>(expected));
  if (!in) throw IoError(IoErrorKind::IoFailure, "failed reading " + s.payload.string());
  byteswap_all(voxels);
  return Volume<T>(s.meta, std::move(voxels));
}

template <typename T>
void write_volume(const Volume<T>& volume, const fs::path& path) {
  const fs::path side = sidecar_path(path);
  const std::string stem = stem_of(side);
  const fs::path payload = side.parent_path() / (stem + ".raw");

  std::error_code ec;
  if (!side.parent_path().empty()) fs::create_directories(side.parent_path(), ec);

  {
    std::ofstream out(payload, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoErrorKind::IoFailure, "cannot write " + payload.string());
    if constexpr (std::endian::native == std::endian::little) {
      const auto v = volume.voxels();
      out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
    } else {
      std::vector<T> copy(volume.data());
      byteswap_all(copy);
      out.write(reinterpret_cast<const char*>(copy.data()),
                static_cast<std::streamsize>(copy.size() * sizeof(T)));
    }
    if (!out) throw IoError(IoErrorKind::IoFailure, "failed writing " + payload.string());
  }

  const VolumeMeta& m = volume.meta();
  json j;
  j["dims"] = {m.dims.x, m.dims.y, m.dims.z};
  j["origin"] = {m.origin.x, m.origin.y, m.origin.z};
  j["voxel_kind"] = std::string(voxel_kind_name(voxel_kind_of<T>()));
  j["payload"] = stem + ".raw";
  std::ofstream out(side, std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::IoFailure, "cannot write " + side.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError(IoErrorKind::IoFailure, "failed writing " + side.string());
}

}  // namespace

fs::path sidecar_path(const fs::path& path) {
  const std::string s = path.string();
  if (ends_with(s, kSidecarSuffix)) return path;
  return fs::path(s + std::string(kSidecarSuffix));
}

AnyVolume load_volume(const fs::path& path) {
  const Sidecar s = read_sidecar(path);
  if (s.meta.voxel_kind == VoxelKind::Label32) return read_payload<Label>(s);
  return read_payload<float>(s);
}

LabelVolume load_label_volume(const fs::path& path) {
  const Sidecar s = read_sidecar(path);
  if (s.meta.voxel_kind != VoxelKind::Label32) {
    throw IoError(IoErrorKind::UnknownVoxelKind, sidecar_path(path).string() + ": expected a label-u32 volume");
  }
  return read_payload<Label>(s);
}

ScalarVolume load_scalar_volume(const fs::path& path) {
  const Sidecar s = read_sidecar(path);
  if (s.meta.voxel_kind != VoxelKind::Scalar32) {
    throw IoError(IoErrorKind::UnknownVoxelKind, sidecar_path(path).string() + ": expected a scalar-f32 volume");
  }
  return read_payload<float>(s);
}

void save_volume(const LabelVolume& volume, const fs::path& path) { write_volume(volume, path); }
void save_volume(const ScalarVolume& volume, const fs::path& path) { write_volume(volume, path); }

}  // namespace xxlseg
