#include "xxlseg/slice_stack.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "xxlseg/volume_io.hpp"

namespace xxlseg {
namespace fs = std::filesystem;
using nlohmann::json;

SliceStack::SliceStack(const VolumeMeta& meta) : meta_(meta) {
  meta_.voxel_kind = VoxelKind::Label32;
  for (Axis a : kAxes) {
    maps_[axis_index(a)].assign(static_cast<std::size_t>(meta.dims[a]), LabelMap(slice_dims(meta.dims, a)));
  }
}

SliceStack::SliceStack(const VolumeMeta& meta, std::array<std::vector<LabelMap>, 3> maps)
    : meta_(meta), maps_(std::move(maps)) {
  meta_.voxel_kind = VoxelKind::Label32;
  validate();
}

void SliceStack::validate() const {
  for (Axis a : kAxes) {
    const auto& seq = maps_[axis_index(a)];
    if (static_cast<std::int64_t>(seq.size()) != meta_.dims[a]) {
      throw InvalidArgument("slice stack axis " + std::string(axis_name(a)) + " has " +
                            std::to_string(seq.size()) + " maps, dims require " + std::to_string(meta_.dims[a]));
    }
    const Vec3 want = slice_dims(meta_.dims, a);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i].dims() != want) {
        throw InvalidArgument("slice stack map " + std::string(axis_name(a)) + "/" + std::to_string(i) +
                              " has dims inconsistent with the stack meta");
      }
    }
  }
}

SliceStack slice_volume(const LabelVolume& volume) {
  std::array<std::vector<LabelMap>, 3> maps;
  for (Axis a : kAxes) {
    auto& seq = maps[axis_index(a)];
    seq.reserve(static_cast<std::size_t>(volume.dims()[a]));
    for (std::int64_t i = 0; i < volume.dims()[a]; ++i) seq.push_back(extract_slice(volume, a, i));
  }
  return SliceStack(volume.meta(), std::move(maps));
}

namespace {

std::string map_name(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld.vol.json", static_cast<long long>(index));
  return buf;
}

}  // namespace

void save_slice_stack(const SliceStack& stack, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(IoErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  json j;
  const VolumeMeta& m = stack.meta();
  j["meta"] = {{"dims", {m.dims.x, m.dims.y, m.dims.z}}, {"origin", {m.origin.x, m.origin.y, m.origin.z}}};
  j["axes"] = json::object();
  for (Axis a : kAxes) {
    j["axes"][std::string(axis_name(a))] = stack.slice_count(a);
    const fs::path sub = dir / std::string(axis_name(a));
    for (std::int64_t i = 0; i < stack.slice_count(a); ++i) save_volume(stack.map(a, i), sub / map_name(i));
  }
  std::ofstream out(dir / "stack.json", std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::IoFailure, "cannot write " + (dir / "stack.json").string());
  out << j.dump(2) << '\n';
}

SliceStack load_slice_stack(const fs::path& dir) {
  const fs::path manifest = dir / "stack.json";
  std::ifstream in(manifest);
  if (!in) throw IoError(IoErrorKind::MissingFile, "missing stack manifest " + manifest.string());
  json j;
  try {
    in >> j;
    VolumeMeta meta;
    const auto& dims = j.at("meta").at("dims");
    const auto& origin = j["meta"].contains("origin") ? j["meta"]["origin"] : json::array({0, 0, 0});
    for (int a = 0; a < 3; ++a) {
      meta.dims[a] = dims.at(a).get<std::int64_t>();
      meta.origin[a] = origin.at(a).get<std::int64_t>();
    }
    if (meta.dims.x < 1 || meta.dims.y < 1 || meta.dims.z < 1) {
      throw IoError(IoErrorKind::MalformedSidecar, manifest.string() + ": dims must all be >= 1");
    }
    std::array<std::vector<LabelMap>, 3> maps;
    for (Axis a : kAxes) {
      const auto n = j.at("axes").at(std::string(axis_name(a))).get<std::int64_t>();
      const fs::path sub = dir / std::string(axis_name(a));
      for (std::int64_t i = 0; i < n; ++i) maps[axis_index(a)].push_back(load_label_volume(sub / map_name(i)));
    }
    return SliceStack(meta, std::move(maps));
  } catch (const json::exception& e) {
    throw IoError(IoErrorKind::MalformedSidecar, manifest.string() + ": " + e.what());
  }
}

}  // namespace xxlseg
